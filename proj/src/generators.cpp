#include "tnsvd/generators.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace tnsvd {

Family parse_family(const std::string& s) {
    if (s == "cauchy") return Family::cauchy;
    if (s == "vandermonde") return Family::vandermonde;
    if (s == "cauchy_vandermonde" || s == "cauchy-vandermonde") return Family::cauchy_vandermonde;
    if (s == "bernstein_vandermonde" || s == "bernstein-vandermonde") return Family::bernstein_vandermonde;
    throw generation_error("unknown family '" + s + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::cauchy: return "cauchy";
        case Family::vandermonde: return "vandermonde";
        case Family::cauchy_vandermonde: return "cauchy_vandermonde";
        case Family::bernstein_vandermonde: return "bernstein_vandermonde";
    }
    return "?";
}

int NodeSpec::distinct_cols() const { return family == Family::cauchy ? int(y_nodes.size()) : cols; }
int NodeSpec::rows() const { return std::accumulate(row_counts.begin(), row_counts.end(), 0); }
int NodeSpec::total_cols() const { return std::accumulate(col_counts.begin(), col_counts.end(), 0); }

void NodeSpec::validate() const {
    const int n = distinct_rows(), m = distinct_cols();
    if (n < 1 || m < 1) throw generation_error("node spec: empty matrix");
    if (int(row_counts.size()) != n || int(col_counts.size()) != m)
        throw generation_error("node spec: multiplicity lists do not match the node counts");
    for (int c : row_counts)
        if (c < 1) throw generation_error("node spec: multiplicities must be positive");
    for (int c : col_counts)
        if (c < 1) throw generation_error("node spec: multiplicities must be positive");
    auto increasing = [](const std::vector<Rational>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i - 1] < v[i])) return false;
        return true;
    };
    if (!increasing(x_nodes)) throw generation_error("node spec: x nodes must be distinct and ascending");
    if (!increasing(y_nodes)) throw generation_error("node spec: y nodes must be distinct and ascending");
    switch (family) {
        case Family::cauchy:
            for (const auto& x : x_nodes)
                for (const auto& y : y_nodes)
                    if (x + y <= 0) throw generation_error("node spec: Cauchy needs x_i + y_j > 0");
            break;
        case Family::cauchy_vandermonde:
            if (l < 0 || l > int(y_nodes.size()) || l > cols)
                throw generation_error("node spec: Cauchy-Vandermonde split l out of range");
            if (int(y_nodes.size()) != l) throw generation_error("node spec: Cauchy-Vandermonde needs exactly l y nodes");
            for (const auto& x : x_nodes)
                for (const auto& y : y_nodes)
                    if (x + y <= 0) throw generation_error("node spec: Cauchy needs x_i + y_j > 0");
            [[fallthrough]];
        case Family::vandermonde:
            for (const auto& x : x_nodes)
                if (x < 0) throw generation_error("node spec: Vandermonde nodes must be nonnegative");
            break;
        case Family::bernstein_vandermonde:
            for (const auto& x : x_nodes)
                if (x <= 0 || x >= 1) throw generation_error("node spec: Bernstein nodes must lie in (0,1)");
            break;
    }
}

NodeSpec NodeSpec::uniform(Family f, std::vector<Rational> x, std::vector<Rational> y, int cols, int l, int s1, int s2) {
    NodeSpec s;
    s.family = f;
    s.x_nodes = std::move(x);
    s.y_nodes = std::move(y);
    s.cols = f == Family::cauchy ? int(s.y_nodes.size()) : cols;
    s.l = l;
    s.row_counts.assign(s.x_nodes.size(), s1);
    s.col_counts.assign(s.distinct_cols(), s2);
    s.validate();
    return s;
}

namespace {

Rational power(const Rational& x, int k) {
    Rational r = 1;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), k);
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), k);
    return r;
}

Rational binomial(int n, int k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

}  // namespace

Rational core_entry(const NodeSpec& s, int i, int j) {
    const Rational& x = s.x_nodes[i];
    switch (s.family) {
        case Family::cauchy: return 1 / Rational(x + s.y_nodes[j]);
        case Family::vandermonde: return power(x, j);
        case Family::cauchy_vandermonde:
            if (j < s.l) return 1 / Rational(x + s.y_nodes[j]);
            return power(x, j - s.l);
        case Family::bernstein_vandermonde: {
            const int m = s.cols;
            return binomial(m - 1, j) * power(1 - x, m - 1 - j) * power(x, j);
        }
    }
    return 0;
}

RationalMatrix core_matrix(const NodeSpec& s) {
    s.validate();
    RationalMatrix A(s.distinct_rows(), s.distinct_cols());
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) A(i, j) = core_entry(s, i, j);
    return A;
}

namespace {

std::vector<int> group_of(const std::vector<int>& counts) {
    std::vector<int> g;
    for (int k = 0; k < int(counts.size()); ++k)
        for (int c = 0; c < counts[k]; ++c) g.push_back(k);
    return g;
}

}  // namespace

RationalMatrix expanded_matrix(const NodeSpec& s) {
    const auto C = core_matrix(s);
    const auto gr = group_of(s.row_counts), gc = group_of(s.col_counts);
    RationalMatrix A(int(gr.size()), int(gc.size()));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) A(i, j) = C(gr[i], gc[j]);
    return A;
}

namespace {

// eliminate below the diagonal by adjacent rows, bottom up; m[i][j] multipliers
void neville_lower(RationalMatrix& A, RationalMatrix& mult) {
    const int n = A.rows, m = A.cols;
    mult = RationalMatrix(n, m);
    Rational t;
    for (int j = 0; j < std::min(n - 1, m); ++j)
        for (int i = n - 1; i > j; --i) {
            if (A(i, j) == 0) continue;
            if (A(i - 1, j) == 0) throw generation_error("Neville elimination needs a row exchange");
            const Rational q = A(i, j) / A(i - 1, j);
            mult(i, j) = q;
            A(i, j) = 0;
            for (int k = j + 1; k < m; ++k)
                if (A(i - 1, k) != 0) {
                    t = q * A(i - 1, k);
                    A(i, k) -= t;
                }
        }
}

}  // namespace

Repr<Rational> neville_bd(const RationalMatrix& M) {
    const int n = M.rows, m = M.cols;
    RationalMatrix A = M, ml, mu;
    neville_lower(A, ml);
    RationalMatrix B = A.transposed();
    neville_lower(B, mu);
    Repr<Rational> R(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (i > j) R.off(i + 1, j + 1) = ml(i, j);
            else if (i < j) R.off(i + 1, j + 1) = mu(j, i);
            else R.off(i + 1, i + 1) = B(i, i);
        }
    for (int i = 1; i <= std::min(n, m); ++i)
        if (R.off(i, i) <= 0) throw generation_error("Neville elimination hit a non-positive pivot");
    for (const auto& v : R.offs)
        if (v < 0) throw generation_error("Neville elimination produced a negative multiplier (not TN)");
    return R;
}

Repr<Rational> bd_distinct(const NodeSpec& s) { return neville_bd(core_matrix(s)); }

BidiagonalProduct<Rational> duplication_chain(const std::vector<int>& counts) {
    const int n1 = int(counts.size());
    const int N = std::accumulate(counts.begin(), counts.end(), 0);
    BidiagonalProduct<Rational> P;
    if (N == n1) return P;
    std::vector<BidiagonalFactor<Rational>> timeline;
    std::vector<char> filled(N + 2, 0);
    for (int p = 1; p <= n1; ++p) filled[p] = 1;
    // one simultaneous step: row t+1 := row t for every t in `from`, with the
    // old content of row t+1 discarded (bar 0) unless it is still zero
    auto copy_step = [&](const std::vector<int>& from) {
        std::vector<Rational> bar(N + 1, Rational(1)), off(N + 1, Rational(0));
        for (int t : from) {
            off[t] = 1;
            if (filled[t + 1]) bar[t + 1] = 0;
        }
        BidiagonalFactor<Rational> f;
        f.orientation = Orientation::lower;
        f.rows = f.cols = N;
        for (int i = 1; i <= N; ++i)
            if (bar[i] != 1 || off[i] != 0) f.pairs.push_back({i, bar[i], off[i]});
        for (int t : from) filled[t + 1] = 1;
        timeline.push_back(std::move(f));
    };
    // first slot of node k and how far it has to travel
    std::vector<int> first(n1 + 1), delta(n1 + 1);
    for (int k = 1, f = 1; k <= n1; f += counts[k - 1], ++k) {
        first[k] = f;
        delta[k] = f - k;
    }
    // shift the suffix of nodes still short of their slot down by one row
    for (int tau = 1; tau <= delta[n1]; ++tau) {
        int k0 = 1;
        while (delta[k0] < tau) ++k0;
        std::vector<int> from;
        for (int t = k0 + tau - 1; t <= n1 + tau - 1; ++t) from.push_back(t);
        copy_step(from);
    }
    // copy each node into its remaining slots
    const int smax = *std::max_element(counts.begin(), counts.end());
    for (int w = 2; w <= smax; ++w) {
        std::vector<int> from;
        for (int k = 1; k <= n1; ++k)
            if (counts[k - 1] >= w) from.push_back(first[k] + w - 2);
        copy_step(from);
    }
    for (auto it = timeline.rbegin(); it != timeline.rend(); ++it) P.factors.push_back(*it);
    BidiagonalFactor<Rational> pad;
    pad.orientation = Orientation::lower;
    pad.rows = N;
    pad.cols = n1;
    P.factors.push_back(pad);
    return P;
}

BidiagonalProduct<Rational> expand_repeated(const NodeSpec& s) {
    s.validate();
    auto rows = duplication_chain(s.row_counts);
    auto core = repr_to_product(bd_distinct(s));
    auto cols = duplication_chain(s.col_counts);
    if (!cols.factors.empty()) cols = cols.transposed();
    return concat<Rational>({rows, core, cols});
}

RationalMatrix chain_dense(const BidiagonalProduct<Rational>& P) {
    P.validate();
    RationalMatrix X = P.factors.back().dense();
    Rational t;
    // each factor touches two rows of X per output row
    for (int k = int(P.factors.size()) - 2; k >= 0; --k) {
        const auto& F = P.factors[k];
        const int p = std::min(F.rows, F.cols);
        std::vector<Rational> bar(p, Rational(1)), off(p, Rational(0));
        for (const auto& q : F.pairs) {
            bar[q.i - 1] = q.bar;
            off[q.i - 1] = q.off;
        }
        RationalMatrix Y(F.rows, X.cols);
        for (int i = 0; i < p; ++i) {
            if (bar[i] != 0)
                for (int j = 0; j < X.cols; ++j) {
                    t = bar[i] * X(i, j);
                    Y(i, j) += t;
                }
            if (off[i] == 0) continue;
            if (F.orientation == Orientation::lower) {
                if (i + 1 < F.rows)
                    for (int j = 0; j < X.cols; ++j) {
                        t = off[i] * X(i, j);
                        Y(i + 1, j) += t;
                    }
            } else if (i + 1 < F.cols) {
                for (int j = 0; j < X.cols; ++j) {
                    t = off[i] * X(i + 1, j);
                    Y(i, j) += t;
                }
            }
        }
        X = std::move(Y);
    }
    return X;
}

Term Term::transposed() const { return {core.transposed(), col_counts, row_counts}; }

namespace {

// A B via integer matrices: rows of A and columns of B are scaled by the
// lcm of their denominators, so the inner loop never reduces a fraction.
RationalMatrix multiply(const RationalMatrix& A, const RationalMatrix& B) {
    const int n = A.rows, k = A.cols, m = B.cols;
    std::vector<mpz_class> ra(n, 1), cb(m, 1);
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < k; ++p) mpz_lcm(ra[i].get_mpz_t(), ra[i].get_mpz_t(), A(i, p).get_den_mpz_t());
    for (int j = 0; j < m; ++j)
        for (int p = 0; p < k; ++p) mpz_lcm(cb[j].get_mpz_t(), cb[j].get_mpz_t(), B(p, j).get_den_mpz_t());
    std::vector<mpz_class> ai(std::size_t(n) * k), bi(std::size_t(k) * m);
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < k; ++p) {
            mpz_class& z = ai[std::size_t(i) * k + p];
            mpz_divexact(z.get_mpz_t(), ra[i].get_mpz_t(), A(i, p).get_den_mpz_t());
            z *= A(i, p).get_num();
        }
    for (int p = 0; p < k; ++p)
        for (int j = 0; j < m; ++j) {
            mpz_class& z = bi[std::size_t(p) * m + j];
            mpz_divexact(z.get_mpz_t(), cb[j].get_mpz_t(), B(p, j).get_den_mpz_t());
            z *= B(p, j).get_num();
        }
    RationalMatrix C(n, m);
    mpz_class acc;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            acc = 0;
            for (int p = 0; p < k; ++p) {
                const mpz_class& x = ai[std::size_t(i) * k + p];
                if (sgn(x) == 0) continue;
                mpz_addmul(acc.get_mpz_t(), x.get_mpz_t(), bi[std::size_t(p) * m + j].get_mpz_t());
            }
            Rational& c = C(i, j);
            c.get_num() = acc;
            c.get_den() = ra[i] * cb[j];
            c.canonicalize();
        }
    return C;
}

// X * (C_a^T R_b): column groups of one term against row groups of the next
RationalMatrix overlap(const RationalMatrix& X, const std::vector<int>& cols_a, const std::vector<int>& rows_b) {
    const auto ga = group_of(cols_a), gb = group_of(rows_b);
    if (ga.size() != gb.size()) throw dimension_error("term product: inner dimensions differ");
    std::vector<std::vector<long>> W(cols_a.size(), std::vector<long>(rows_b.size(), 0));
    for (std::size_t p = 0; p < ga.size(); ++p) ++W[ga[p]][gb[p]];
    RationalMatrix Y(X.rows, int(rows_b.size()));
    for (std::size_t a = 0; a < W.size(); ++a)
        for (std::size_t b = 0; b < W[a].size(); ++b)
            if (W[a][b])
                for (int i = 0; i < X.rows; ++i) Y(i, int(b)) += W[a][b] * X(i, int(a));
    return Y;
}

}  // namespace

RationalMatrix Example::dense_exact() const {
    if (terms.empty()) return chain_dense(chain);
    const auto gr = group_of(terms.front().row_counts), gc = group_of(terms.back().col_counts);
    RationalMatrix X(rows(), terms.front().core.cols);
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < X.cols; ++j) X(i, j) = terms.front().core(gr[keep_rows[i] - 1], j);
    for (std::size_t k = 1; k < terms.size(); ++k) {
        X = overlap(X, terms[k - 1].col_counts, terms[k].row_counts);
        const auto& C = terms[k].core;
        if (k + 1 == terms.size()) {
            RationalMatrix Cs(C.rows, cols());
            for (int i = 0; i < C.rows; ++i)
                for (int j = 0; j < cols(); ++j) Cs(i, j) = C(i, gc[keep_cols[j] - 1]);
            X = multiply(X, Cs);
        } else {
            X = multiply(X, C);
        }
    }
    if (terms.size() == 1) {
        RationalMatrix Y(rows(), cols());
        for (int i = 0; i < rows(); ++i)
            for (int j = 0; j < cols(); ++j) Y(i, j) = X(i, gc[keep_cols[j] - 1]);
        return Y;
    }
    return X;
}

std::vector<int> complement(const std::vector<int>& keep, int n) {
    std::vector<char> k(n + 1, 0);
    for (int i : keep) k.at(i) = 1;
    std::vector<int> out;
    for (int i = 1; i <= n; ++i)
        if (!k[i]) out.push_back(i);
    return out;
}

namespace {

Term term_of(const NodeSpec& s) { return {core_matrix(s), s.row_counts, s.col_counts}; }

Example assemble_example(std::string name, const std::vector<NodeSpec>& specs, std::vector<int> keep_rows,
                         std::vector<int> keep_cols, int zeros) {
    Example e;
    e.name = std::move(name);
    e.id = e.name;
    std::vector<BidiagonalProduct<Rational>> chains;
    for (const auto& s : specs) {
        chains.push_back(expand_repeated(s));
        e.terms.push_back(term_of(s));
    }
    auto full = concat(chains);
    e.keep_rows = std::move(keep_rows);
    e.keep_cols = std::move(keep_cols);
    e.chain = submatrix_product_form(full, complement(e.keep_rows, full.rows()), complement(e.keep_cols, full.cols()));
    e.expected_zeros = zeros;
    return e;
}

// A_1 A_1^T A_1 with the chain of the transpose obtained by transposing factors
Example cube_example(std::string name, const NodeSpec& s, std::vector<int> keep_rows, std::vector<int> keep_cols,
                     int zeros) {
    Example e;
    e.name = std::move(name);
    e.id = e.name;
    auto c = expand_repeated(s);
    auto full = concat<Rational>({c, c.transposed(), c});
    const Term t = term_of(s);
    e.terms = {t, t.transposed(), t};
    e.keep_rows = std::move(keep_rows);
    e.keep_cols = std::move(keep_cols);
    e.chain = submatrix_product_form(full, complement(e.keep_rows, full.rows()), complement(e.keep_cols, full.cols()));
    e.expected_zeros = zeros;
    return e;
}

std::vector<int> stride(int count, int step, int offset) {
    std::vector<int> v;
    for (int i = 1; i <= count; ++i) v.push_back(step * (i - 1) + offset);
    return v;
}

std::vector<int> range(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
}

}  // namespace

Example make_example1() {
    const int n1 = 80, n2 = 70, n3 = 70, n4 = 50, n5 = 60, l = 10;
    const int s1 = 2, s2 = 3, s3 = 2, s4 = 4, s5 = 3;
    std::vector<Rational> xcv, ycv, xbv, xv, xc, yc;
    for (int i = 1; i <= n2; ++i) xcv.push_back(make_rational(i, n2));
    for (int j = 1; j <= l; ++j) ycv.push_back(make_rational(j, n1));
    for (int i = 1; i <= n3; ++i) xbv.push_back(make_rational(1, n3 - i + 2));
    for (int i = 1; i <= n4; ++i) xv.push_back(make_rational(1, n4 - i + 1));
    for (int i = 1; i <= n5; ++i) xc.push_back(make_rational(1, n5 - i + 1));
    for (int j = 1; j <= n4; ++j) yc.push_back(make_rational(j + 1, n4));
    const auto A1 = NodeSpec::uniform(Family::cauchy_vandermonde, xcv, ycv, n1, l, s2, s1);
    const auto A2 = NodeSpec::uniform(Family::bernstein_vandermonde, xbv, {}, n2, 0, s3, s2);
    const auto A3 = NodeSpec::uniform(Family::vandermonde, xv, {}, n3, 0, s4, s3);
    const auto A4 = NodeSpec::uniform(Family::cauchy, xc, yc, 0, 0, s5, s4);
    return assemble_example("example1", {A4, A3, A2, A1}, stride(60, 3, 1), stride(80, 2, 2), 10);
}

Example make_example2() {
    const int n = 50, m = 50, l = 15;
    std::vector<Rational> x, y;
    for (int i = 1; i <= n; ++i) {
        Rational q(i);
        mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), n - i + 1);
        q.canonicalize();
        x.push_back(q);
    }
    for (int j = 1; j <= l; ++j) {
        Rational q(j * j);
        mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), m - j + 1);
        q.canonicalize();
        y.push_back(q);
    }
    const auto A1 = NodeSpec::uniform(Family::cauchy_vandermonde, x, y, m, l, 3, 2);
    return cube_example("example2", A1, stride(50, 3, 2), range(21, 80), 20);
}

Example make_example3() {
    const int n = 50, m = 50;
    std::vector<Rational> x;
    for (int i = 1; i <= n; ++i) x.push_back(make_rational(i + 1, n * n - 2 * i + 1));
    const auto A1 = NodeSpec::uniform(Family::vandermonde, x, {}, m, 0, 2, 3);
    return cube_example("example3", A1, range(11, 80), stride(50, 3, 2), 15);
}

Example make_example4(std::uint64_t seed) {
    const int n = 90, m = 50;
    std::mt19937_64 rng(seed);
    std::vector<Rational> r(n + 1);
    for (int i = 1; i <= n; ++i) r[i] = make_rational(long(rng() % 1000) + 1, 1000);
    Repr<Rational> R(n, m);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j) {
            R.off(i, j) = r[i] / j;
            if (i != j) R.bar(i, j) = Rational(long(rng() & 1));
        }
    Example e;
    e.name = "example4";
    e.id = "example4-seed" + std::to_string(seed);
    auto c = repr_to_product(R);
    e.chain = concat<Rational>({c, c.transposed(), c});
    const Term t{expand_dense(R), std::vector<int>(n, 1), std::vector<int>(m, 1)};
    e.terms = {t, t.transposed(), t};
    e.keep_rows = range(1, n);
    e.keep_cols = range(1, m);
    e.naive_cube = true;
    return e;
}

Example make_example(const std::string& name, std::uint64_t seed) {
    if (name == "example1") return make_example1();
    if (name == "example2") return make_example2();
    if (name == "example3") return make_example3();
    if (name == "example4") return make_example4(seed);
    throw generation_error("unknown example '" + name + "'");
}

}  // namespace tnsvd
