#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "tnsvd/scalar.hpp"

namespace tnsvd {

// Row-major dense matrix, 0-based. Only used for tests, oracles and
// materialized accumulators; the accurate pipeline never forms one.
template <class T>
struct Dense {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, T(0)) {}

    static Dense identity(int n) {
        Dense d(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = T(1);
        return d;
    }
    T& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    Dense transposed() const {
        Dense t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    bool operator==(const Dense& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

template <class T>
Dense<T> operator*(const Dense<T>& x, const Dense<T>& y) {
    if (x.cols != y.rows) throw dimension_error("dense product: inner dimensions differ");
    Dense<T> z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x(i, k) == T(0)) continue;
            const T xik = x(i, k);
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

struct ElementPair {
    double bar = 1.0;
    double off = 0.0;
};

// BD(A): n x m grid of element pairs {bar, off}, accessed 1-based.
// A = L_{n-1} ... L_1 D U_1 ... U_{m-1} where
//   L_k has pair (i+1, i+1-k) at index i, k <= i <= min(n-1, m+k-1)
//   U_l has pair (i+1-l, i+1) at index i, l <= i <= min(m-1, n+l-1)
//   D = diag(off(i,i)).
template <class T>
struct Repr {
    int n = 0, m = 0;
    std::vector<T> bars, offs;

    Repr() = default;
    Repr(int rows, int cols)
        : n(rows), m(cols), bars(std::size_t(rows) * cols, T(1)), offs(std::size_t(rows) * cols, T(0)) {
        if (rows < 1 || cols < 1) throw dimension_error("representation needs positive dimensions");
    }

    static Repr identity(int rows, int cols) {
        Repr r(rows, cols);
        for (int i = 1; i <= std::min(rows, cols); ++i) r.off(i, i) = T(1);
        return r;
    }

    T& bar(int i, int j) { return bars[std::size_t(i - 1) * m + (j - 1)]; }
    const T& bar(int i, int j) const { return bars[std::size_t(i - 1) * m + (j - 1)]; }
    T& off(int i, int j) { return offs[std::size_t(i - 1) * m + (j - 1)]; }
    const T& off(int i, int j) const { return offs[std::size_t(i - 1) * m + (j - 1)]; }

    // every g_ii != 0 for i < min(n, m)
    bool canonical() const {
        const int p = std::min(n, m);
        for (int i = 1; i < p; ++i)
            if (off(i, i) == T(0)) return false;
        return true;
    }

    bool operator==(const Repr& o) const {
        return n == o.n && m == o.m && bars == o.bars && offs == o.offs;
    }

    // trailing block rows i0.., cols j0.. (1-based), used once the leading
    // row/column has been reduced to {1,0} pairs
    Repr trailing(int i0, int j0) const {
        Repr r(n - i0 + 1, m - j0 + 1);
        for (int i = i0; i <= n; ++i)
            for (int j = j0; j <= m; ++j) {
                r.bar(i - i0 + 1, j - j0 + 1) = bar(i, j);
                r.off(i - i0 + 1, j - j0 + 1) = off(i, j);
            }
        return r;
    }

    template <class U>
    Repr<U> cast() const {
        Repr<U> r(n, m);
        for (std::size_t k = 0; k < bars.size(); ++k) {
            r.bars[k] = scalar_cast<U>(bars[k]);
            r.offs[k] = scalar_cast<U>(offs[k]);
        }
        return r;
    }
};

template <class T>
void check_nonneg(const Repr<T>& r) {
    for (std::size_t k = 0; k < r.bars.size(); ++k)
        if (!finite_nonneg(r.bars[k]) || !finite_nonneg(r.offs[k]))
            throw domain_error("representation entries must be finite and nonnegative");
}

template <class T>
Repr<T> transpose(const Repr<T>& r) {
    Repr<T> t(r.m, r.n);
    for (int i = 1; i <= r.n; ++i)
        for (int j = 1; j <= r.m; ++j) {
            t.bar(j, i) = r.bar(i, j);
            t.off(j, i) = r.off(i, j);
        }
    return t;
}

inline int lower_first(int, int, int k) { return k; }
inline int lower_last(int n, int m, int k) { return std::min(n - 1, m + k - 1); }
inline int upper_first(int, int, int l) { return l; }
inline int upper_last(int n, int m, int l) { return std::min(m - 1, n + l - 1); }

template <class T>
Dense<T> expand_dense(const Repr<T>& r) {
    const int n = r.n, m = r.m;
    Dense<T> acc(n, m);
    Dense<T> u = Dense<T>::identity(m);
    for (int l = m - 1; l >= 1; --l) {
        // u := U_l * u; row i reads the old row i+1, so go upward in i
        for (int i = upper_first(n, m, l); i <= upper_last(n, m, l); ++i) {
            const T b = r.bar(i + 1 - l, i + 1), o = r.off(i + 1 - l, i + 1);
            for (int j = 0; j < m; ++j) u(i - 1, j) = b * u(i - 1, j) + o * u(i, j);
        }
    }
    for (int i = 1; i <= std::min(n, m); ++i)
        for (int j = 0; j < m; ++j) acc(i - 1, j) = r.off(i, i) * u(i - 1, j);
    for (int k = 1; k <= n - 1; ++k) {
        // acc := L_k * acc; row i+1 reads the old row i, so go downward
        for (int i = lower_last(n, m, k); i >= lower_first(n, m, k); --i) {
            const T b = r.bar(i + 1, i + 1 - k), o = r.off(i + 1, i + 1 - k);
            for (int j = 0; j < m; ++j) {
                acc(i, j) = acc(i, j) + o * acc(i - 1, j);
                acc(i - 1, j) = b * acc(i - 1, j);
            }
        }
    }
    return acc;
}

// (dr2): append zero rows up to t
template <class T>
Repr<T> append_trailing_rows(const Repr<T>& r, int t) {
    if (t <= r.n) throw dimension_error("append_trailing_rows: t must exceed nrows");
    Repr<T> o(t, r.m);
    std::copy(r.bars.begin(), r.bars.end(), o.bars.begin());
    std::copy(r.offs.begin(), r.offs.end(), o.offs.begin());
    return o;
}

// (dr): keep rows 1..t
template <class T>
Repr<T> drop_trailing_rows(const Repr<T>& r, int t) {
    if (t < 1 || t >= r.n) throw dimension_error("drop_trailing_rows: need 1 <= t < nrows");
    Repr<T> o(t, r.m);
    std::copy(r.bars.begin(), r.bars.begin() + std::ptrdiff_t(t) * r.m, o.bars.begin());
    std::copy(r.offs.begin(), r.offs.begin() + std::ptrdiff_t(t) * r.m, o.offs.begin());
    T prod(1);
    for (int j = 1; j <= std::min(t, r.m); ++j) {
        prod = prod * r.bar(t + 1, j);
        o.off(t, j) = o.off(t, j) * prod;
    }
    return o;
}

template <class T>
Repr<T> append_trailing_cols(const Repr<T>& r, int t) {
    return transpose(append_trailing_rows(transpose(r), t));
}
template <class T>
Repr<T> drop_trailing_cols(const Repr<T>& r, int t) {
    return transpose(drop_trailing_rows(transpose(r), t));
}

// I_{t x n} * A
template <class T>
Repr<T> resize_rows(const Repr<T>& r, int t) {
    if (t == r.n) return r;
    return t > r.n ? append_trailing_rows(r, t) : drop_trailing_rows(r, t);
}

enum class Orientation { lower, upper };

// One rectangular bidiagonal factor. Lower: pair i sits at (i,i),(i+1,i);
// upper: (i,i),(i,i+1). Unlisted positions are {1,0} (diagonal 1 only while
// inside both dimensions).
template <class T>
struct BidiagonalFactor {
    Orientation orientation = Orientation::lower;
    int rows = 0, cols = 0;
    struct Pair {
        int i;
        T bar, off;
    };
    std::vector<Pair> pairs;

    BidiagonalFactor transposed() const {
        BidiagonalFactor f;
        f.orientation = orientation == Orientation::lower ? Orientation::upper : Orientation::lower;
        f.rows = cols;
        f.cols = rows;
        f.pairs = pairs;
        return f;
    }

    // dimension of the square part of a rectangular factor
    int square_dim() const { return orientation == Orientation::lower ? rows : cols; }

    // bar/off vectors of the square factor, 1-based, length square_dim()+2
    void square_vectors(std::vector<T>& b, std::vector<T>& o) const {
        const int d = square_dim();
        b.assign(d + 2, T(1));
        o.assign(d + 2, T(0));
        for (const auto& p : pairs) {
            if (p.i < 1 || p.i > std::min(rows, cols))
                throw dimension_error("factor pair index outside the band");
            b[p.i] = p.bar;
            if (p.i < d) o[p.i] = p.off;
            else if (p.off != T(0))
                throw dimension_error("factor pair has an off-band entry");
        }
    }

    Dense<T> dense() const {
        Dense<T> d(rows, cols);
        const int p = std::min(rows, cols);
        for (int i = 0; i < p; ++i) d(i, i) = T(1);
        for (const auto& q : pairs) {
            const int i = q.i - 1;
            d(i, i) = q.bar;
            if (orientation == Orientation::lower) {
                if (i + 1 < rows) d(i + 1, i) = q.off;
            } else {
                if (i + 1 < cols) d(i, i + 1) = q.off;
            }
        }
        return d;
    }

    void validate() const {
        if (rows < 1 || cols < 1) throw dimension_error("factor needs positive dimensions");
        for (const auto& p : pairs) {
            if (p.i < 1 || p.i > std::min(rows, cols))
                throw dimension_error("factor pair index outside the band");
            if (!finite_nonneg(p.bar) || !finite_nonneg(p.off))
                throw domain_error("factor entries must be finite and nonnegative");
            const int lim = orientation == Orientation::lower ? rows : cols;
            if (p.i >= lim && p.off != T(0)) throw dimension_error("factor pair has an off-band entry");
        }
    }
};

template <class T>
struct BidiagonalProduct {
    std::vector<BidiagonalFactor<T>> factors;

    int rows() const { return factors.empty() ? 0 : factors.front().rows; }
    int cols() const { return factors.empty() ? 0 : factors.back().cols; }
    std::size_t nontrivial_pairs() const {
        std::size_t s = 0;
        for (const auto& f : factors) s += f.pairs.size();
        return s;
    }
    // n_0, n_1, ..., n_K
    std::vector<int> dims() const {
        std::vector<int> d;
        if (factors.empty()) return d;
        d.push_back(factors.front().rows);
        for (const auto& f : factors) d.push_back(f.cols);
        return d;
    }
    void validate() const {
        if (factors.empty()) throw dimension_error("empty factor chain");
        for (std::size_t k = 0; k < factors.size(); ++k) {
            factors[k].validate();
            if (k + 1 < factors.size() && factors[k].cols != factors[k + 1].rows)
                throw dimension_error("factor chain dimensions do not match at factor " + std::to_string(k + 1));
        }
    }
    BidiagonalProduct transposed() const {
        BidiagonalProduct p;
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) p.factors.push_back(it->transposed());
        return p;
    }
    template <class U>
    BidiagonalProduct<U> cast() const {
        BidiagonalProduct<U> p;
        for (const auto& f : factors) {
            BidiagonalFactor<U> g;
            g.orientation = f.orientation;
            g.rows = f.rows;
            g.cols = f.cols;
            for (const auto& q : f.pairs) g.pairs.push_back({q.i, scalar_cast<U>(q.bar), scalar_cast<U>(q.off)});
            p.factors.push_back(std::move(g));
        }
        return p;
    }
};

// explicit multiplication of the chain (tests and naive baseline only)
template <class T>
Dense<T> expand_product(const BidiagonalProduct<T>& p) {
    Dense<T> acc = p.factors.back().dense();
    for (int k = int(p.factors.size()) - 2; k >= 0; --k) acc = p.factors[k].dense() * acc;
    return acc;
}

}  // namespace tnsvd
