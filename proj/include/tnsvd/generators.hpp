#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnsvd/rational.hpp"
#include "tnsvd/representation.hpp"

namespace tnsvd {

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Family { cauchy, vandermonde, cauchy_vandermonde, bernstein_vandermonde };

Family parse_family(const std::string& s);
std::string family_name(Family f);

// Distinct nodes plus multiplicities; node i of x fills row_counts[i]
// consecutive rows, column node j fills col_counts[j] columns.
struct NodeSpec {
    Family family = Family::cauchy;
    std::vector<Rational> x_nodes, y_nodes;
    int cols = 0;  // distinct columns (Vandermonde-type families); Cauchy uses |y|
    int l = 0;     // Cauchy columns of a Cauchy-Vandermonde matrix
    std::vector<int> row_counts, col_counts;

    int distinct_rows() const { return int(x_nodes.size()); }
    int distinct_cols() const;
    int rows() const;
    int total_cols() const;
    void validate() const;

    static NodeSpec uniform(Family f, std::vector<Rational> x, std::vector<Rational> y, int cols, int l, int s1, int s2);
};

using RationalMatrix = Dense<Rational>;

Rational core_entry(const NodeSpec& s, int i, int j);  // 0-based distinct indices
RationalMatrix core_matrix(const NodeSpec& s);
RationalMatrix expanded_matrix(const NodeSpec& s);    // with repeated rows/columns

// Exact Neville elimination: the BD of a matrix whose leading pivots are
// nonzero; throws generation_error when a row exchange would be needed.
Repr<Rational> neville_bd(const RationalMatrix& A);

Repr<Rational> bd_distinct(const NodeSpec& s);

// L_{n-1}...L_1 D U_1...U_{m-1} as an explicit factor chain
template <class T>
BidiagonalProduct<T> repr_to_product(const Repr<T>& R) {
    BidiagonalProduct<T> P;
    const int n = R.n, m = R.m;
    for (int k = n - 1; k >= 1; --k) {
        BidiagonalFactor<T> f;
        f.orientation = Orientation::lower;
        f.rows = f.cols = n;
        for (int i = lower_first(n, m, k); i <= lower_last(n, m, k); ++i) {
            const T b = R.bar(i + 1, i + 1 - k), o = R.off(i + 1, i + 1 - k);
            if (b != T(1) || o != T(0)) f.pairs.push_back({i, b, o});
        }
        if (!f.pairs.empty()) P.factors.push_back(std::move(f));
    }
    BidiagonalFactor<T> d;
    d.orientation = Orientation::lower;
    d.rows = n;
    d.cols = m;
    for (int i = 1; i <= std::min(n, m); ++i) d.pairs.push_back({i, R.off(i, i), T(0)});
    P.factors.push_back(std::move(d));
    for (int l = 1; l <= m - 1; ++l) {
        BidiagonalFactor<T> f;
        f.orientation = Orientation::upper;
        f.rows = f.cols = m;
        for (int i = upper_first(n, m, l); i <= upper_last(n, m, l); ++i) {
            const T b = R.bar(i + 1 - l, i + 1), o = R.off(i + 1 - l, i + 1);
            if (b != T(1) || o != T(0)) f.pairs.push_back({i, b, o});
        }
        if (!f.pairs.empty()) P.factors.push_back(std::move(f));
    }
    return P;
}

// Row duplication R (sum(counts) x counts.size()) as bidiagonal factors:
// padding identity, then simultaneous shifts, then copies.
BidiagonalProduct<Rational> duplication_chain(const std::vector<int>& counts);

// (bfs): R * BD(core) * C^T
BidiagonalProduct<Rational> expand_repeated(const NodeSpec& s);

template <class T>
BidiagonalProduct<T> concat(const std::vector<BidiagonalProduct<T>>& parts) {
    BidiagonalProduct<T> P;
    for (const auto& p : parts)
        for (const auto& f : p.factors) P.factors.push_back(f);
    P.validate();
    return P;
}

// Prepend row-deletion factors and append column-deletion factors so the
// chain expands to A(alpha|beta); indices 1-based, strictly increasing.
template <class T>
BidiagonalProduct<T> submatrix_product_form(const BidiagonalProduct<T>& P, const std::vector<int>& alpha,
                                            const std::vector<int>& beta) {
    auto deleter = [](int n, int r) {
        // I_{n-1,n} biupp({0,1}_{i=r}^{n})
        BidiagonalFactor<T> f;
        f.orientation = Orientation::upper;
        f.rows = n - 1;
        f.cols = n;
        for (int i = r; i <= n - 1; ++i) f.pairs.push_back({i, T(0), T(1)});
        return f;
    };
    auto check = [](const std::vector<int>& idx, int lim) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 1 || idx[k] > lim) throw dimension_error("submatrix_product_form: index out of range");
            if (k && idx[k] <= idx[k - 1]) throw dimension_error("submatrix_product_form: indices must increase");
        }
        if (int(idx.size()) >= lim) throw dimension_error("submatrix_product_form: would leave an empty matrix");
    };
    P.validate();
    check(alpha, P.rows());
    check(beta, P.cols());
    BidiagonalProduct<T> out;
    // A(alpha|:] = D_{alpha_1} ... D_{alpha_k} A, the largest index acting first
    int n = P.rows() - int(alpha.size()) + 1;
    for (std::size_t k = 0; k < alpha.size(); ++k, ++n) out.factors.push_back(deleter(n, alpha[k]));
    for (const auto& f : P.factors) out.factors.push_back(f);
    int m = P.cols();
    for (auto it = beta.rbegin(); it != beta.rend(); ++it, --m) out.factors.push_back(deleter(m, *it).transposed());
    out.validate();
    return out;
}

// Exact dense product of a chain (test-sized inputs).
RationalMatrix chain_dense(const BidiagonalProduct<Rational>& P);

// Factored description of a product of node-defined matrices, used to form
// exact dense products without expanding duplicated rows and columns.
struct Term {
    RationalMatrix core;
    std::vector<int> row_counts, col_counts;
    Term transposed() const;
};

struct Example {
    std::string name;
    std::string id;                        // stable key, e.g. "example4-seed7"
    BidiagonalProduct<Rational> chain;     // exact factor chain of the submatrix
    std::vector<Term> terms;               // the full product, left to right
    std::vector<int> keep_rows, keep_cols; // 1-based rows/columns of the full product
    int expected_zeros = -1;               // as stated with the example, -1 if unknown
    // naive comparison: the dense product is the cube of a single factor's SVD (example 4)
    bool naive_cube = false;

    int rows() const { return int(keep_rows.size()); }
    int cols() const { return int(keep_cols.size()); }
    RationalMatrix dense_exact() const;
};

Example make_example1();
Example make_example2();
Example make_example3();
Example make_example4(std::uint64_t seed);
Example make_example(const std::string& name, std::uint64_t seed = 7);

// complement of a kept-index list in 1..n
std::vector<int> complement(const std::vector<int>& keep, int n);

}  // namespace tnsvd
