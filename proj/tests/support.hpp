#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tnsvd/generators.hpp"
#include "tnsvd/representation.hpp"

namespace tnsvd::test {

using Q = Rational;

// small positive rationals, zero with probability pz
struct RandQ {
    std::mt19937 rng;
    explicit RandQ(unsigned seed) : rng(seed) {}

    int below(int n) { return int(rng() % unsigned(n)); }
    bool chance(double p) { return std::uniform_real_distribution<>(0, 1)(rng) < p; }
    Q value(double pz = 0.0) {
        if (chance(pz)) return Q(0);
        Q q(below(5) + 1, below(3) + 1);
        q.canonicalize();
        return q;
    }
    Q bar(double pz = 0.2) { return chance(pz) ? Q(0) : Q(1); }

    // element pairs as produced by the pipeline: bars in {0,1}, offs small rationals
    Repr<Q> repr(int n, int m, double pz_off = 0.3, double pz_bar = 0.2) {
        Repr<Q> R(n, m);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= m; ++j) {
                R.off(i, j) = value(pz_off);
                if (i != j) R.bar(i, j) = bar(pz_bar);
            }
        return R;
    }
    // canonical: nonzero diagonal offs, arbitrary positive bars
    Repr<Q> canonical_repr(int n, int m) {
        Repr<Q> R(n, m);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= m; ++j) {
                R.off(i, j) = value(i == j ? 0.0 : 0.3);
                if (i != j) R.bar(i, j) = value(0.1);
            }
        return R;
    }

    BidiagonalFactor<Q> factor(int rows, int cols, double pz) {
        BidiagonalFactor<Q> F;
        F.rows = rows;
        F.cols = cols;
        F.orientation = below(2) ? Orientation::lower : Orientation::upper;
        const int lim = F.orientation == Orientation::lower ? rows : cols;
        for (int i = 1; i <= std::min(rows, cols); ++i)
            F.pairs.push_back({i, value(pz * 0.5), i < lim ? value(pz) : Q(0)});
        return F;
    }
    BidiagonalProduct<Q> chain(int maxdim, int maxfactors, double pz) {
        BidiagonalProduct<Q> P;
        const int K = below(maxfactors) + 1;
        int d = below(maxdim) + 1;
        for (int k = 0; k < K; ++k) {
            const int c = below(maxdim) + 1;
            P.factors.push_back(factor(d, c, pz));
            d = c;
        }
        return P;
    }
};

inline Dense<Q> upper_dense(const std::vector<Q>& b, const std::vector<Q>& o, int n) {
    Dense<Q> U(n, n);
    for (int i = 0; i < n; ++i) {
        U(i, i) = b[i + 1];
        if (i + 1 < n) U(i, i + 1) = o[i + 1];
    }
    return U;
}
inline Dense<Q> lower_dense(const std::vector<Q>& b, const std::vector<Q>& o, int n) {
    return upper_dense(b, o, n).transposed();
}

template <class T>
Dense<T> strike(const Dense<T>& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    auto keep = [](int n, const std::vector<int>& del) {
        std::vector<int> k;
        for (int i = 1; i <= n; ++i)
            if (!std::binary_search(del.begin(), del.end(), i)) k.push_back(i - 1);
        return k;
    };
    const auto kr = keep(A.rows, rows), kc = keep(A.cols, cols);
    Dense<T> B(int(kr.size()), int(kc.size()));
    for (std::size_t i = 0; i < kr.size(); ++i)
        for (std::size_t j = 0; j < kc.size(); ++j) B(int(i), int(j)) = A(kr[i], kc[j]);
    return B;
}

template <class T>
Dense<double> to_double_matrix(const Dense<T>& A) {
    Dense<double> D(A.rows, A.cols);
    for (std::size_t k = 0; k < A.a.size(); ++k) D.a[k] = to_double(A.a[k]);
    return D;
}

inline double max_abs(const Dense<double>& A) {
    double m = 0;
    for (double x : A.a) m = std::max(m, std::abs(x));
    return m;
}

inline double orthogonality_defect(const Dense<double>& Q) {
    const auto E = Q.transposed() * Q;
    double w = 0;
    for (int i = 0; i < E.rows; ++i)
        for (int j = 0; j < E.cols; ++j) w = std::max(w, std::abs(E(i, j) - (i == j ? 1.0 : 0.0)));
    return w;
}

// sorted random subset of 1..n with fewer than n elements
inline std::vector<int> random_subset(RandQ& r, int n, double p = 0.3) {
    std::vector<int> s;
    for (int i = 1; i <= n; ++i)
        if (r.chance(p) && int(s.size()) + 1 < n) s.push_back(i);
    return s;
}

}  // namespace tnsvd::test
