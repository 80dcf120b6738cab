// tnsvd: command-line front end.
// Exit codes: 0 ok, 1 a verified property failed, 2 usage or parse error,
// 3 numeric or domain error, 4 oracle failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "tnsvd/assembly.hpp"
#include "tnsvd/extraction.hpp"
#include "tnsvd/io.hpp"
#include "tnsvd/repro.hpp"
#include "tnsvd/verify.hpp"

using namespace tnsvd;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<int> int_list(const std::string& s) {
    std::vector<int> v;
    for (const auto& w : split_list(s)) {
        std::size_t pos = 0;
        int x = 0;
        try {
            x = std::stoi(w, &pos);
        } catch (const std::logic_error&) {
            pos = 0;
        }
        if (pos != w.size() || w.empty()) throw parse_error("bad integer '" + w + "' in list");
        v.push_back(x);
    }
    return v;
}

std::vector<Rational> rational_list(const std::string& s) {
    std::vector<Rational> v;
    for (const auto& w : split_list(s)) {
        try {
            v.push_back(parse_rational(w));
        } catch (const std::invalid_argument& e) {
            throw parse_error(e.what());
        }
    }
    return v;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") std::cout << content << std::flush;
    else write_file_atomic(path, content);
}

std::string hex(double x) { return format_hex(XFloat(x)); }

// --- gen ---
struct GenArgs {
    std::string what, x, y, row_counts, col_counts, out;
    int cols = 0, l = 0, row_mult = 1, col_mult = 1;
    std::uint64_t seed = 7;
};

int run_gen(const GenArgs& a) {
    BidiagonalProduct<XFloat> chain;
    std::string gen = a.what;
    if (a.what.rfind("example", 0) == 0) {
        const Example e = make_example(a.what, a.seed);
        chain = e.chain.template cast<XFloat>();
        if (a.what == "example4") gen += " --seed " + std::to_string(a.seed);
    } else {
        NodeSpec s;
        try {
            s.family = parse_family(a.what);
        } catch (const generation_error& e) {
            throw parse_error(e.what());
        }
        s.x_nodes = rational_list(a.x);
        s.y_nodes = rational_list(a.y);
        s.cols = a.cols;
        s.l = a.l;
        if (!a.row_counts.empty()) s.row_counts = int_list(a.row_counts);
        else s.row_counts.assign(s.x_nodes.size(), a.row_mult);
        const int dc = s.family == Family::cauchy ? int(s.y_nodes.size()) : s.cols;
        if (!a.col_counts.empty()) s.col_counts = int_list(a.col_counts);
        else s.col_counts.assign(std::max(dc, 0), a.col_mult);
        s.validate();
        chain = expand_repeated(s).template cast<XFloat>();
        gen += " --x " + a.x;
        if (!a.y.empty()) gen += " --y " + a.y;
        if (a.cols) gen += " --cols " + std::to_string(a.cols);
        if (a.l) gen += " --l " + std::to_string(a.l);
        if (!a.row_counts.empty()) gen += " --row-counts " + a.row_counts;
        else gen += " --row-mult " + std::to_string(a.row_mult);
        if (!a.col_counts.empty()) gen += " --col-counts " + a.col_counts;
        else gen += " --col-mult " + std::to_string(a.col_mult);
    }
    for (char& c : gen)
        if (c == '#') c = '_';
    emit(a.out, to_bdp(chain, gen));
    return 0;
}

// --- deflate ---
std::string rotations_json(const OrthogonalAccumulator& acc, const char* side) {
    nlohmann::json j;
    j["type"] = "accumulator";
    j["side"] = side;
    j["dimension"] = acc.dimension;
    auto& rots = j["rotations"] = nlohmann::json::array();
    for (const auto& r : acc.log) rots.push_back({r.p, r.q, hex(r.c), hex(r.s)});
    auto& mv = j["moves"] = nlohmann::json::array();
    for (const auto& m : acc.moves) mv.push_back({m.kind == PermutationMove::row ? "row" : "col", m.index});
    j["order"] = acc.order;
    return j.dump();
}

int run_deflate(const std::string& in, bool accumulate, bool strict, const std::string& out) {
    const auto cf = load_bdp(in);
    const auto split = split_at_min(cf.chain);
    DeflateOptions d;
    d.strict = strict;
    const auto r = periodic_deflate(split, d);
    std::ostringstream o;
    nlohmann::json s;
    s["type"] = "summary";
    s["rows"] = r.out_rows;
    s["cols"] = r.out_cols;
    s["rank"] = r.rank;
    s["zeros"] = std::min(r.out_rows, r.out_cols) - r.rank;
    s["split_index"] = split.split_index;
    s["min_dim"] = split.min_dim;
    s["zero_pivots"] = r.zero_pivots;
    s["chases"] = r.chases;
    o << s.dump() << "\n";
    nlohmann::json b;
    b["type"] = "bidiagonal";
    auto& dg = b["diag"] = nlohmann::json::array();
    for (const auto& x : r.bbar_diag) dg.push_back(format_hex(x));
    auto& sp = b["super"] = nlohmann::json::array();
    for (const auto& x : r.bbar_super) sp.push_back(format_hex(x));
    o << b.dump() << "\n";
    if (accumulate) {
        o << rotations_json(r.g_acc, "left") << "\n";
        o << rotations_json(r.v_acc, "right") << "\n";
    }
    emit(out, o.str());
    return 0;
}

// --- svd ---
std::string matrix_tsv(const Dense<double>& M) {
    std::ostringstream o;
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j) o << (j ? "\t" : "") << format_sci(M(i, j));
        o << "\n";
    }
    return o.str();
}

int run_svd(const std::string& in, bool vectors, bool oracle, int digits, bool strict, const std::string& out) {
    const auto cf = load_bdp(in);
    SVDOptions so;
    so.want_vectors = vectors;
    so.strict = strict;
    const auto r = svd_product(cf.chain, so);
    ReferenceSVD ref;
    if (oracle) {
        OracleOptions oo;
        oo.digits = digits;
        const auto Q = cf.chain.template cast<Rational>();
        ref = cached_oracle("chain-" + matrix_fingerprint(chain_dense(Q)), [&] { return chain_dense(Q); }, oo);
        if (ref.rank != r.rank)
            std::cerr << "warning: oracle rank " << ref.rank << " differs from deflation rank " << r.rank << "\n";
    }
    std::ostringstream o;
    o << "# " << r.rows << "x" << r.cols << "\n# zeros " << std::min(r.rows, r.cols) - r.rank << "\n# rank " << r.rank
      << "\n";
    o << "i\tsigma" << (oracle ? "\toracle\trel_error" : "") << "\n";
    for (int i = 0; i < int(r.sigma.size()); ++i) {
        o << i + 1 << '\t' << format_sci(r.sigma_full[i]);
        if (oracle) {
            if (i < ref.rank) {
                char e[32];
                std::snprintf(e, sizeof e, "%.4e", relative_error(r.sigma_full[i], ref.decimal[i]));
                o << '\t' << ref.decimal[i] << '\t' << e;
            } else {
                o << "\tnan\tnan";
            }
        }
        o << "\n";
    }
    emit(out, o.str());
    if (vectors) {
        if (out.empty() || out == "-") {
            std::cout << "# U\n" << matrix_tsv(*r.u) << "# V\n" << matrix_tsv(*r.v);
        } else {
            write_file_atomic(out + ".U.tsv", matrix_tsv(*r.u));
            write_file_atomic(out + ".V.tsv", matrix_tsv(*r.v));
        }
    }
    return 0;
}

int run_repro(const std::string& name, std::uint64_t seed, bool strict, bool naive, int digits, const std::string& out) {
    if (name != "example1" && name != "example2" && name != "example3" && name != "example4")
        throw parse_error("repro expects example1, example2, example3 or example4");
    const Example e = make_example(name, seed);
    ReproOptions ro;
    ro.strict = strict;
    ro.naive = naive;
    ro.oracle.digits = digits;
    if (name == "example4") ro.oracle.exact_rank = true;
    const auto r = reproduce(e, ro);
    emit(out, repro_tsv(r));
    double worst = 0;
    for (const auto& row : r.table)
        if (std::isfinite(row.rel_error_alg)) worst = std::max(worst, row.rel_error_alg);
    std::cerr << r.example << ": zeros " << r.zeros;
    if (r.expected_zeros >= 0) std::cerr << " (expected " << r.expected_zeros << ")";
    std::cerr << ", rank " << r.rank << " (oracle " << r.oracle_rank << "), max rel error " << worst << ", "
              << r.total_seconds << " s\n";
    return 0;
}

int run_verify(const std::string& in, bool oracle, long long limit, long long asm_limit, bool strict) {
    const auto cf = load_bdp(in);
    VerifyOptions vo;
    vo.oracle = oracle;
    vo.exact_limit = limit;
    vo.assembly_limit = asm_limit;
    vo.strict = strict;
    const auto checks = verify_chain(cf.chain, vo);
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << status_name(c.status) << "\t" << c.name << "\t" << c.detail << "\n";
        ok = ok && c.status != Check::fail;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accurate SVD of products of totally nonnegative matrices in bidiagonal product form"};
    app.require_subcommand(1);
    bool strict = false;

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate a factor chain (family with nodes, or example1..example4)");
    gen->add_option("what", ga.what, "cauchy|vandermonde|cauchy_vandermonde|bernstein_vandermonde|exampleN")->required();
    gen->add_option("--x", ga.x, "row nodes, comma separated rationals");
    gen->add_option("--y", ga.y, "column nodes (Cauchy, Cauchy-Vandermonde)");
    gen->add_option("--cols", ga.cols, "distinct columns (Vandermonde-type families)");
    gen->add_option("--l", ga.l, "Cauchy columns of a Cauchy-Vandermonde matrix");
    gen->add_option("--row-mult", ga.row_mult, "multiplicity of every row node");
    gen->add_option("--col-mult", ga.col_mult, "multiplicity of every column");
    gen->add_option("--row-counts", ga.row_counts, "per-node row multiplicities");
    gen->add_option("--col-counts", ga.col_counts, "per-column multiplicities");
    gen->add_option("--seed", ga.seed, "seed for example4");
    gen->add_option("-o,--output", ga.out, "output .bdp (default stdout)");

    std::string in, out, drop_rows, drop_cols;
    auto* assemble_cmd = app.add_subcommand("assemble", "assemble a chain into its bidiagonal decomposition");
    assemble_cmd->add_option("chain", in, "input .bdp")->required();
    assemble_cmd->add_option("-o,--output", out, "output .bdr");

    auto* extract = app.add_subcommand("extract", "strike rows and columns from a representation");
    extract->add_option("repr", in, "input .bdr")->required();
    extract->add_option("--drop-rows", drop_rows, "1-based rows to delete");
    extract->add_option("--drop-cols", drop_cols, "1-based columns to delete");
    extract->add_option("-o,--output", out, "output .bdr");

    bool accumulate = false;
    auto* deflate = app.add_subcommand("deflate", "periodic deflation to an upper bidiagonal matrix");
    deflate->add_option("chain", in, "input .bdp")->required();
    deflate->add_flag("--accumulate", accumulate, "also write the rotation logs");
    deflate->add_option("-o,--output", out, "output JSON lines");

    bool vectors = false, use_oracle = false;
    int digits = 30;
    auto* svd = app.add_subcommand("svd", "singular values (and vectors) of a chain");
    svd->add_option("chain", in, "input .bdp")->required();
    svd->add_flag("--vectors", vectors, "compute U and V (written to <output>.U.tsv / .V.tsv)");
    svd->add_flag("--oracle", use_oracle, "compare with the high-precision reference");
    svd->add_option("--digits", digits, "digits the reference must confirm")->check(CLI::Range(1, 40));
    svd->add_option("-o,--output", out, "output TSV");

    std::string example;
    std::uint64_t seed = 7;
    bool no_naive = false;
    auto* repro = app.add_subcommand("repro", "reproduce a numerical example as a relative-error table");
    repro->add_option("example", example, "example1|example2|example3|example4")->required();
    repro->add_option("--seed", seed, "seed for example4");
    repro->add_option("--digits", digits, "digits the reference must confirm")->check(CLI::Range(1, 40));
    repro->add_flag("--no-naive", no_naive, "skip the explicitly formed double-precision SVD");
    repro->add_option("-o,--output", out, "output TSV");

    long long limit = VerifyOptions{}.exact_limit, asm_limit = VerifyOptions{}.assembly_limit;
    auto* verify = app.add_subcommand("verify", "run the exact-arithmetic property suite on a chain");
    verify->add_option("chain", in, "input .bdp")->required();
    verify->add_flag("--oracle", use_oracle, "include the oracle comparison");
    verify->add_option("--exact-limit", limit, "size limit for the exact rank and oracle checks");
    verify->add_option("--assembly-limit", asm_limit, "size limit for the exact assembly check");

    for (auto* sc : {gen, assemble_cmd, extract, deflate, svd, repro, verify})
        sc->add_flag("--strict", strict, "fail instead of deflating zero pivots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) return run_gen(ga);
        if (*assemble_cmd) {
            emit(out, to_bdr(assemble(load_bdp(in).chain)));
            return 0;
        }
        if (*extract) {
            const auto R = load_bdr(in);
            emit(out, to_bdr(extract_submatrix(R, int_list(drop_rows), int_list(drop_cols))));
            return 0;
        }
        if (*deflate) return run_deflate(in, accumulate, strict, out);
        if (*svd) return run_svd(in, vectors, use_oracle, digits, strict, out);
        if (*repro) return run_repro(example, seed, strict, !no_naive, digits, out);
        if (*verify) return run_verify(in, use_oracle, limit, asm_limit, strict);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const oracle_error& e) {
        std::cerr << "oracle error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
