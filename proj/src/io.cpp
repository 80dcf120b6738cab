#include "tnsvd/io.hpp"

#include <mpfr.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace tnsvd {

std::string format_hex(const XFloat& x) {
    if (x.m == 0) return std::signbit(x.m) ? "-0x0p+0" : "0x0p+0";
    // m in [1/2, 1): print 2m, whose exponent is 0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", 2 * x.m);
    std::string s(buf);
    s.erase(s.find('p'));
    const long long e = x.e - 1;
    return s + (e < 0 ? "p" : "p+") + std::to_string(e);
}

std::string format_decimal(const XFloat& x, int digits) {
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_set_d(t, x.m, MPFR_RNDN);
    if (x.m != 0) mpfr_mul_2si(t, t, long(x.e), MPFR_RNDN);
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "%.*Re", digits - 1, t);
    mpfr_clear(t);
    return buf;
}

XFloat parse_number(const std::string& s) {
    mpfr_t t;
    mpfr_init2(t, 53);
    char* end = nullptr;
    mpfr_strtofr(t, s.c_str(), &end, 0, MPFR_RNDN);
    const bool ok = end && end != s.c_str() && *end == '\0' && mpfr_number_p(t);
    XFloat r;
    if (ok) {
        long e = 0;
        const double m = mpfr_zero_p(t) ? (mpfr_signbit(t) ? -0.0 : 0.0) : mpfr_get_d_2exp(&e, t, MPFR_RNDN);
        r = XFloat::make(m, e);
    }
    mpfr_clear(t);
    if (!ok) throw parse_error("not a number: '" + s + "'");
    return r;
}

namespace {

struct LineReader {
    std::istream& in;
    int line = 0;
    std::vector<std::string> words;

    // next nonblank line split into words, comments dropped
    bool next() {
        std::string s;
        while (std::getline(in, s)) {
            ++line;
            if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
            std::istringstream ss(s);
            words.clear();
            for (std::string w; ss >> w;) words.push_back(w);
            if (!words.empty()) return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error("line " + std::to_string(line) + ": " + msg);
    }
    int integer(std::size_t k) const {
        if (k >= words.size()) fail("missing field");
        try {
            std::size_t pos = 0;
            const int v = std::stoi(words[k], &pos);
            if (pos != words[k].size()) fail("bad integer '" + words[k] + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("bad integer '" + words[k] + "'");
        }
    }
    XFloat number(std::size_t k) const {
        if (k >= words.size()) fail("missing field");
        try {
            return parse_number(words[k]);
        } catch (const parse_error& e) {
            fail(e.what());
        }
    }
    void expect(std::size_t n) const {
        if (words.size() != n) fail("expected " + std::to_string(n) + " fields in '" + words[0] + "' line");
    }
};

std::string pair_line(const char* tag, const std::string& idx, const XFloat& b, const XFloat& o) {
    return std::string(tag) + " " + idx + " " + format_hex(b) + " " + format_hex(o) + "  # " + format_decimal(b) +
           " " + format_decimal(o) + "\n";
}

}  // namespace

void write_bdp(std::ostream& out, const BidiagonalProduct<XFloat>& P, const std::string& gen) {
    P.validate();
    out << "bdp 1\n";
    if (!gen.empty()) out << "gen " << gen << "\n";
    out << "# " << P.rows() << "x" << P.cols() << ", " << P.factors.size() << " factors\n";
    for (std::size_t k = 0; k < P.factors.size(); ++k) {
        const auto& f = P.factors[k];
        out << "factor " << k + 1 << ' ' << (f.orientation == Orientation::lower ? "lower" : "upper") << ' ' << f.rows
            << ' ' << f.cols << "\n";
        for (const auto& p : f.pairs) out << pair_line("pair", std::to_string(p.i), p.bar, p.off);
    }
}

ChainFile read_bdp(std::istream& in) {
    LineReader r{in};
    if (!r.next() || r.words[0] != "bdp") throw parse_error("missing 'bdp 1' header");
    r.expect(2);
    if (r.integer(1) != 1) r.fail("unsupported bdp version");
    ChainFile cf;
    while (r.next()) {
        const auto& w = r.words;
        if (w[0] == "gen") {
            if (!cf.chain.factors.empty()) r.fail("'gen' must precede the factors");
            for (std::size_t k = 1; k < w.size(); ++k) cf.gen += (k > 1 ? " " : "") + w[k];
        } else if (w[0] == "factor") {
            r.expect(5);
            if (r.integer(1) != int(cf.chain.factors.size()) + 1) r.fail("factors must be numbered 1, 2, ...");
            BidiagonalFactor<XFloat> f;
            if (w[2] == "lower") f.orientation = Orientation::lower;
            else if (w[2] == "upper") f.orientation = Orientation::upper;
            else r.fail("orientation must be lower or upper");
            f.rows = r.integer(3);
            f.cols = r.integer(4);
            if (f.rows < 1 || f.cols < 1) r.fail("factor dimensions must be positive");
            cf.chain.factors.push_back(std::move(f));
        } else if (w[0] == "pair") {
            r.expect(4);
            if (cf.chain.factors.empty()) r.fail("'pair' before any 'factor'");
            cf.chain.factors.back().pairs.push_back({r.integer(1), r.number(2), r.number(3)});
        } else {
            r.fail("unknown record '" + w[0] + "'");
        }
    }
    if (cf.chain.factors.empty()) throw parse_error("chain has no factors");
    try {
        cf.chain.validate();
    } catch (const domain_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("invalid chain: ") + e.what());
    }
    return cf;
}

void write_bdr(std::ostream& out, const Repr<XFloat>& R) {
    out << "bdr 1 " << R.n << ' ' << R.m << "\n";
    for (int i = 1; i <= R.n; ++i)
        for (int j = 1; j <= R.m; ++j) {
            const XFloat& b = R.bar(i, j);
            const XFloat& o = R.off(i, j);
            if (b != XFloat(1) || o != XFloat(0))
                out << pair_line("cell", std::to_string(i) + " " + std::to_string(j), b, o);
        }
}

Repr<XFloat> read_bdr(std::istream& in) {
    LineReader r{in};
    if (!r.next() || r.words[0] != "bdr") throw parse_error("missing 'bdr 1 <rows> <cols>' header");
    r.expect(4);
    if (r.integer(1) != 1) r.fail("unsupported bdr version");
    const int n = r.integer(2), m = r.integer(3);
    if (n < 1 || m < 1) r.fail("dimensions must be positive");
    Repr<XFloat> R(n, m);
    while (r.next()) {
        if (r.words[0] != "cell") r.fail("unknown record '" + r.words[0] + "'");
        r.expect(5);
        const int i = r.integer(1), j = r.integer(2);
        if (i < 1 || i > n || j < 1 || j > m) r.fail("cell outside the grid");
        R.bar(i, j) = r.number(3);
        R.off(i, j) = r.number(4);
        if (!finite_nonneg(R.bar(i, j)) || !finite_nonneg(R.off(i, j))) throw domain_error("bdr: entries must be finite and nonnegative");
    }
    return R;
}

std::string to_bdp(const BidiagonalProduct<XFloat>& P, const std::string& gen) {
    std::ostringstream o;
    write_bdp(o, P, gen);
    return o.str();
}
std::string to_bdr(const Repr<XFloat>& R) {
    std::ostringstream o;
    write_bdr(o, R);
    return o.str();
}
ChainFile bdp_from_string(const std::string& s) {
    std::istringstream i(s);
    return read_bdp(i);
}
Repr<XFloat> bdr_from_string(const std::string& s) {
    std::istringstream i(s);
    return read_bdr(i);
}

namespace {
std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return in;
}
}  // namespace

ChainFile load_bdp(const std::string& path) {
    auto in = open_in(path);
    return read_bdp(in);
}
Repr<XFloat> load_bdr(const std::string& path) {
    auto in = open_in(path);
    return read_bdr(in);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, p);
}

}  // namespace tnsvd
