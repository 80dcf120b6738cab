#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tnsvd/deflation.hpp"

namespace tnsvd {

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal arithmetic runs in long double: squared entries of a bidiagonal
// whose values span 10^{+-260} do not fit a double's exponent range.
using wide = long double;

namespace detail {

constexpr wide qd_tol = 64 * LDBL_EPSILON;

// Eigenvalues of B^T B for B = bidiag(q^(1/2), e^(1/2)) on [lo, hi], appended to out.
inline void dqds_block(std::vector<wide>& q, std::vector<wide>& e, int lo, int hi, wide sigma, std::vector<wide>& out) {
    const wide tol2 = qd_tol * qd_tol;
    const int n = hi - lo + 1;
    long budget = 64L * n * n + 200;
    std::vector<wide> qn(q.size()), en(e.size());
    wide theta = 0.5L;
    while (hi >= lo) {
        if (hi == lo) {
            out.push_back(sigma + q[hi]);
            --hi;
            continue;
        }
        if (e[hi - 1] <= tol2 * (sigma + q[hi])) {
            out.push_back(sigma + q[hi]);
            --hi;
            continue;
        }
        // relative split test: mu_k is the zero-shift dqd pivot
        int split = -1;
        wide mu = q[lo];
        for (int k = lo; k < hi; ++k) {
            if (e[k] <= tol2 * mu) split = k;
            mu = q[k + 1] * (mu / (mu + e[k]));
        }
        if (split >= 0) {
            e[split] = 0;
            dqds_block(q, e, split + 1, hi, sigma, out);
            hi = split;
            continue;
        }
        if (--budget < 0) throw convergence_error("dqds: iteration cap reached");
        // shift from the last sweep's smallest pivot, backed off on failure
        wide dmin = q[lo];
        {
            wide d = q[lo];
            for (int k = lo; k < hi; ++k) {
                d = q[k + 1] * (d / (d + e[k]));
                dmin = std::min(dmin, d);
            }
        }
        wide tau = theta * dmin;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 4) tau = 0;
            wide d = q[lo] - tau;
            bool ok = d >= 0;
            for (int k = lo; ok && k < hi; ++k) {
                qn[k] = d + e[k];
                if (!(qn[k] > 0)) {
                    ok = false;
                    break;
                }
                const wide t = q[k + 1] / qn[k];
                en[k] = e[k] * t;
                d = d * t - tau;
                if (d < 0) ok = false;
            }
            if (ok) {
                qn[hi] = d;
                for (int k = lo; k < hi; ++k) {
                    q[k] = qn[k];
                    e[k] = en[k];
                }
                q[hi] = d;
                sigma += tau;
                theta = std::min<wide>(0.99L, theta * 2);
                break;
            }
            theta *= 0.25L;
            tau *= 0.25L;
        }
    }
}

// rotation with r = hypot(f, g), c f + s g = r
inline void rot(wide f, wide g, wide& c, wide& s, wide& r) {
    if (g == 0) {
        c = 1;
        s = 0;
        r = f;
    } else if (f == 0) {
        c = 0;
        s = 1;
        r = g;
    } else {
        r = std::hypot(f, g);
        c = f / r;
        s = g / r;
    }
}

inline void rotate_cols(std::vector<wide>& M, int dim, int i, int j, wide c, wide s) {
    for (int k = 0; k < dim; ++k) {
        wide& a = M[std::size_t(k) * dim + i];
        wide& b = M[std::size_t(k) * dim + j];
        const wide x = a, y = b;
        a = c * x + s * y;
        b = -s * x + c * y;
    }
}

// smaller singular value of [[f, g], [0, h]]
inline wide small_sv_2x2(wide f, wide g, wide h) {
    f = std::fabs(f);
    g = std::fabs(g);
    h = std::fabs(h);
    const wide big = std::hypot(std::hypot(f, g), h);
    if (big == 0) return 0;
    const wide a = f / big, b = g / big, c = h / big;
    const wide s = a * a + b * b + c * c;
    const wide disc = std::sqrt(std::max<wide>(0, s * s - 4 * a * a * c * c));
    const wide smax = std::sqrt((s + disc) / 2);
    return smax > 0 ? big * (a * c / smax) : 0;
}

// Bidiagonal SVD by implicit QR: zero shift (Demmel-Kahan) whenever a
// shift would cost relative accuracy, standard shift otherwise.
inline void qr_block_svd(std::vector<wide>& d, std::vector<wide>& e, std::vector<wide>& U, std::vector<wide>& V, int n) {
    const wide tol = qd_tol;
    long budget = 64L * n * n + 200;
    int hi = n - 1;
    while (hi > 0) {
        // relative convergence test on the whole active range
        {
            wide mu = std::fabs(d[0]);
            for (int j = 0; j < hi; ++j) {
                if (std::fabs(e[j]) <= tol * mu) e[j] = 0;
                const wide ad = std::fabs(d[j + 1]);
                mu = ad * (mu / (mu + std::fabs(e[j])));
            }
        }
        while (hi > 0 && e[hi - 1] == 0) --hi;
        if (hi == 0) break;
        int lo = hi - 1;
        while (lo > 0 && e[lo - 1] != 0) --lo;
        if (--budget < 0) throw convergence_error("bidiagonal QR: iteration cap reached");

        wide smax = 0;
        for (int k = lo; k <= hi; ++k) smax = std::max(smax, std::fabs(d[k]));
        for (int k = lo; k < hi; ++k) smax = std::max(smax, std::fabs(e[k]));
        // lower bound on the block's smallest singular value
        wide sminl = std::fabs(d[lo]);
        {
            wide mu = sminl;
            for (int j = lo; j < hi; ++j) {
                mu = std::fabs(d[j + 1]) * (mu / (mu + std::fabs(e[j])));
                sminl = std::min(sminl, mu);
            }
        }
        // shifting only keeps relative accuracy on well-conditioned blocks
        wide shift = 0;
        if (n * tol * (sminl / smax) > std::max<wide>(LDBL_EPSILON, tol / 100)) {
            shift = small_sv_2x2(d[hi - 1], e[hi - 1], d[hi]);
            const wide sll = std::fabs(d[lo]);
            if (sll > 0 && (shift / sll) * (shift / sll) < LDBL_EPSILON) shift = 0;
        }

        if (shift == 0) {
            wide cs = 1, sn = 0, oldcs = 1, oldsn = 0, r;
            for (int i = lo; i < hi; ++i) {
                rot(d[i] * cs, e[i], cs, sn, r);
                if (i > lo) e[i - 1] = oldsn * r;
                rotate_cols(V, n, i, i + 1, cs, sn);
                rot(oldcs * r, d[i + 1] * sn, oldcs, oldsn, d[i]);
                rotate_cols(U, n, i, i + 1, oldcs, oldsn);
            }
            const wide h = d[hi] * cs;
            e[hi - 1] = h * oldsn;
            d[hi] = h * oldcs;
        } else {
            wide f = (std::fabs(d[lo]) - shift) * ((d[lo] < 0 ? -1 : 1) + shift / d[lo]);
            wide g = e[lo];
            wide c, s, r;
            for (int i = lo; i < hi; ++i) {
                rot(f, g, c, s, r);
                if (i > lo) e[i - 1] = r;
                f = c * d[i] + s * e[i];
                e[i] = c * e[i] - s * d[i];
                g = s * d[i + 1];
                d[i + 1] = c * d[i + 1];
                rotate_cols(V, n, i, i + 1, c, s);
                rot(f, g, c, s, r);
                d[i] = r;
                f = c * e[i] + s * d[i + 1];
                d[i + 1] = c * d[i + 1] - s * e[i];
                if (i < hi - 1) {
                    g = s * e[i + 1];
                    e[i + 1] = c * e[i + 1];
                }
                rotate_cols(U, n, i, i + 1, c, s);
            }
            e[hi - 1] = f;
        }
    }
}

}  // namespace detail

// A bidiagonal held as long double values times 2^scale, with max(d, f) in
// [1/2, 1); built without passing through the double range.
struct ScaledBidiagonal {
    std::vector<wide> d, f;
    std::int64_t scale = 0;
};

template <class T>
ScaledBidiagonal prescale(const std::vector<T>& d, const std::vector<T>& f) {
    if (!d.empty() && f.size() + 1 != d.size()) throw dimension_error("bidiagonal: super must have length n-1");
    for (const auto& x : d)
        if (!(x > T(0)) || !finite_nonneg(x)) throw domain_error("bidiagonal: diagonal entries must be positive");
    for (const auto& x : f)
        if (!finite_nonneg(x)) throw domain_error("bidiagonal: superdiagonal entries must be nonnegative");
    ScaledBidiagonal b;
    T mx = T(0);
    for (const auto& x : d)
        if (x > mx) mx = x;
    for (const auto& x : f)
        if (x > mx) mx = x;
    b.scale = exponent_of(mx);
    for (const auto& x : d) b.d.push_back(scaled_wide(x, b.scale));
    for (const auto& x : f) b.f.push_back(scaled_wide(x, b.scale));
    return b;
}

// exact exponent, mantissa rounded once to 53 bits
inline XFloat unscale_full(wide x, std::int64_t s) {
    if (x == 0) return XFloat(0.0);
    int k;
    const wide m = std::frexp(x, &k);
    return XFloat::make(double(m), k + s);
}

// dqds on the squared entries; descending, without range limits.
inline std::vector<XFloat> bidiagonal_singular_values_full(const ScaledBidiagonal& b) {
    const int n = int(b.d.size());
    if (n == 0) return {};
    std::vector<wide> q(n), e(std::max(n - 1, 1), 0);
    for (int i = 0; i < n; ++i) q[i] = b.d[i] * b.d[i];
    for (int i = 0; i + 1 < n; ++i) e[i] = b.f[i] * b.f[i];
    std::vector<wide> lam;
    detail::dqds_block(q, e, 0, n - 1, 0, lam);
    std::stable_sort(lam.begin(), lam.end(), std::greater<wide>());
    std::vector<XFloat> s(n);
    for (int i = 0; i < n; ++i) s[i] = unscale_full(std::sqrt(lam[i]), b.scale);
    return s;
}

inline std::vector<double> bidiagonal_singular_values(const ScaledBidiagonal& b) {
    std::vector<double> s;
    for (const auto& x : bidiagonal_singular_values_full(b)) s.push_back(to_double(x));
    return s;
}

inline std::vector<double> bidiagonal_singular_values(const std::vector<double>& d, const std::vector<double>& f) {
    return bidiagonal_singular_values(prescale(d, f));
}

struct BidiagonalSVD {
    std::vector<double> sigma;          // rounded into the double range
    std::vector<XFloat> sigma_full;
    std::optional<Dense<double>> u, v;  // B = U diag(sigma) V^T
};

inline BidiagonalSVD bidiagonal_svd(const ScaledBidiagonal& b, bool want_vectors) {
    BidiagonalSVD out;
    if (!want_vectors) {
        out.sigma_full = bidiagonal_singular_values_full(b);
        for (const auto& x : out.sigma_full) out.sigma.push_back(to_double(x));
        return out;
    }
    const int n = int(b.d.size());
    std::vector<wide> dd = b.d, ee(std::max(n - 1, 1), 0), U(std::size_t(n) * n, 0), V(std::size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) U[std::size_t(i) * n + i] = V[std::size_t(i) * n + i] = 1;
    for (int i = 0; i + 1 < n; ++i) ee[i] = b.f[i];
    if (n > 1) detail::qr_block_svd(dd, ee, U, V, n);
    for (int i = 0; i < n; ++i)
        if (dd[i] < 0) {
            dd[i] = -dd[i];
            for (int k = 0; k < n; ++k) V[std::size_t(k) * n + i] = -V[std::size_t(k) * n + i];
        }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int c) { return dd[a] > dd[c]; });
    out.sigma.resize(n);
    out.sigma_full.resize(n);
    Dense<double> Uo(n, n), Vo(n, n);
    for (int j = 0; j < n; ++j) {
        out.sigma_full[j] = unscale_full(dd[perm[j]], b.scale);
        out.sigma[j] = to_double(out.sigma_full[j]);
        for (int k = 0; k < n; ++k) {
            Uo(k, j) = double(U[std::size_t(k) * n + perm[j]]);
            Vo(k, j) = double(V[std::size_t(k) * n + perm[j]]);
        }
    }
    out.u = std::move(Uo);
    out.v = std::move(Vo);
    return out;
}

inline BidiagonalSVD bidiagonal_svd(const std::vector<double>& d, const std::vector<double>& f, bool want_vectors) {
    return bidiagonal_svd(prescale(d, f), want_vectors);
}

struct SVDResult {
    std::vector<double> sigma;  // nonzero singular values, descending, in double range
    std::vector<XFloat> sigma_full;  // the same values where double would under- or overflow
    int rank = 0;
    int rows = 0, cols = 0;
    std::optional<Dense<double>> u, v;
    int zero_pivots = 0, chases = 0;
};

struct SVDOptions {
    bool want_vectors = false;
    bool strict = false;
};

// Split, deflate, bidiagonal SVD, compose.
template <class T>
SVDResult svd_from_deflation(const DeflationResult<T>& dr, bool want_vectors) {
    SVDResult r;
    r.rank = dr.rank;
    r.rows = dr.out_rows;
    r.cols = dr.out_cols;
    r.zero_pivots = dr.zero_pivots;
    r.chases = dr.chases;
    auto b = bidiagonal_svd(prescale(dr.bbar_diag, dr.bbar_super), want_vectors);
    r.sigma = std::move(b.sigma);
    r.sigma_full = std::move(b.sigma_full);
    if (want_vectors) {
        auto compose = [&](const OrthogonalAccumulator& acc, const Dense<double>& W) {
            Dense<double> Q = acc.materialize();
            const int N = Q.rows, k = W.rows;
            Dense<double> out = Q;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < k; ++j) {
                    double s = 0;
                    for (int l = 0; l < k; ++l) s += Q(i, l) * W(l, j);
                    out(i, j) = s;
                }
            return out;
        };
        r.u = compose(dr.g_acc, *b.u);
        r.v = compose(dr.v_acc, *b.v);
    }
    return r;
}

template <class T>
SVDResult svd_product(const BidiagonalProduct<T>& P, const SVDOptions& opt = {}) {
    auto s = split_at_min(P);
    DeflateOptions dopt;
    dopt.strict = opt.strict;
    return svd_from_deflation(periodic_deflate(s, dopt), opt.want_vectors);
}

}  // namespace tnsvd
