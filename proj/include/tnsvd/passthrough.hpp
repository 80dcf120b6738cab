#pragma once

#include <cstdint>
#include <vector>

#include "tnsvd/representation.hpp"

namespace tnsvd {

// Branch hit counters for the fuzz suites. Index 0 is the w != 0 branch.
struct BranchCounts {
    std::uint64_t pt1[3] = {0, 0, 0};
    std::uint64_t pt2[2] = {0, 0};
    std::uint64_t pt3[3] = {0, 0, 0};
};
inline BranchCounts& branch_counts() {
    static thread_local BranchCounts b;
    return b;
}

// All pair vectors below are 1-based: v[1..N], with room for v[N+1].

// pt1:  U(yb,y) L(xb,x) = L(xb',x') U(yb',y') on indices lo..N.
// Outputs overwrite the inputs: (xb,x) become the new lower factor,
// (yb,y) the new upper factor. When w_i = 0 and x_i = 0 both the second and
// third branches are valid; we take the third so a zero bar lands in U, which
// keeps lower chains inside their band when they are re-installed.
template <class T>
void pass_upper_through_lower(std::vector<T>& yb, std::vector<T>& y, std::vector<T>& xb, std::vector<T>& x,
                              int N, int lo = 1) {
    auto& bc = branch_counts();
    T z = yb[lo] * xb[lo];
    for (int i = lo; i <= N; ++i) {
        const T xi = i < N ? x[i] : T(0);
        const T yi = i < N ? y[i] : T(0);
        const T w = z + xi * yi;
        const T ybn = i < N ? yb[i + 1] : T(1);
        const T xbn = i < N ? xb[i + 1] : T(1);
        if (w != T(0)) {
            ++bc.pt1[0];
            xb[i] = T(1);
            yb[i] = w;
            if (i < N) {
                x[i] = ybn * xi / w;
                y[i] = yi * xbn;
            }
            z = ybn * xbn * z / w;
        } else if (yi == T(0) && xi != T(0)) {
            ++bc.pt1[1];
            xb[i] = T(0);
            yb[i] = T(1);
            if (i < N) {
                x[i] = ybn * xi;
                y[i] = T(0);
            }
            z = ybn * xbn;
        } else {
            ++bc.pt1[2];
            xb[i] = T(1);
            yb[i] = T(0);
            if (i < N) {
                x[i] = T(0);
                y[i] = yi * xbn;
            }
            z = ybn * xbn;
        }
    }
}

// pt2:  U(yb,y) D = D' U'(tb,t), D n x m diagonal held in d[1..p], p = min(n,m).
// Returns the new upper factor of order m in (tb,t). When d_p yb_p = 0 the zero
// stays in D (d'_p = 0) rather than producing a zero bar at index p, which
// would have nowhere to go when m = p.
template <class T>
void pass_upper_through_diag(const std::vector<T>& yb, const std::vector<T>& y, std::vector<T>& d, int n, int m,
                             std::vector<T>& tb, std::vector<T>& t) {
    auto& bc = branch_counts();
    const int p = std::min(n, m);
    tb.assign(m + 2, T(1));
    t.assign(m + 2, T(0));
    std::vector<T> dd(p + 2, T(0));
    for (int i = 1; i <= p; ++i) dd[i] = d[i];
    for (int i = 1; i <= p; ++i) {
        const T yi = i < n ? y[i] : T(0);
        const T dn = i < p ? dd[i + 1] : T(0);
        const T dy = dd[i] * yb[i];
        if (dy != T(0)) {
            ++bc.pt2[0];
            d[i] = dy;
            tb[i] = T(1);
            t[i] = dn * yi / dy;
        } else if (i == p) {
            ++bc.pt2[1];
            d[i] = T(0);
            tb[i] = T(1);
            t[i] = T(0);
        } else {
            ++bc.pt2[1];
            d[i] = T(1);
            tb[i] = T(0);
            t[i] = dn * yi;
        }
    }
}

// pt3:  U(yb,y) U'(xb,x) = U'(xb',x') U_{lo+1:N}(yb',y').
// Writes the results to separate outputs. keep_left_zero forbids the
// second branch at i+1 = N, where its zero bar would leave the band of the
// shifted factor; the third branch is valid there because x_N does not exist.
template <class T>
void pass_upper_through_upper(const std::vector<T>& yb, const std::vector<T>& y, const std::vector<T>& xb,
                              const std::vector<T>& x, int N, int lo, bool keep_left_zero, std::vector<T>& xb2,
                              std::vector<T>& x2, std::vector<T>& yb2, std::vector<T>& y2) {
    auto& bc = branch_counts();
    xb2 = xb;
    x2 = x;
    yb2 = yb;
    y2 = y;
    xb2[lo] = xb[lo] * yb[lo];
    yb2[lo] = T(1);
    y2[lo] = T(0);
    T z = yb[lo] * (lo < N ? x[lo] : T(0));
    for (int i = lo; i < N; ++i) {
        const T w = z + xb[i + 1] * y[i];
        const T xn = i + 1 < N ? x[i + 1] : T(0);
        T ypn;
        if (w != T(0)) {
            ++bc.pt3[0];
            yb2[i + 1] = T(1);
            x2[i] = w;
            xb2[i + 1] = xb[i + 1] * yb[i + 1];
            ypn = xn * y[i] / w;
            z = xn * yb[i + 1] * z / w;
        } else if (y[i] != T(0) && !(keep_left_zero && i + 1 == N)) {
            ++bc.pt3[1];
            yb2[i + 1] = T(0);
            x2[i] = T(1);
            xb2[i + 1] = T(0);
            ypn = xn * y[i];
            z = xn * yb[i + 1];
        } else {
            ++bc.pt3[2];
            yb2[i + 1] = T(1);
            x2[i] = T(0);
            xb2[i + 1] = xb[i + 1] * yb[i + 1];
            ypn = T(0);
            z = xn * yb[i + 1];
        }
        if (i + 1 < N) y2[i + 1] = ypn;
    }
}

struct Rotation {
    int p, q;  // acts on positions p < q
    double c, s;
};

// Givens factorization: L = bilow({xb_i, -x_i}_{i=k..n}); L G_n ... G_{k+1} = biupp({yb_i, -y_i}).
// Rotation i acts on (i-1, i) as [[c,-s],[s,c]]; rot[i] holds (c_i, s_i).
template <class T>
struct GivensFactorization {
    int n = 0, k = 1;
    std::vector<T> c, s;    // indices k+1..n
    std::vector<T> yb, y;   // yb: k..n, y: k..n-1
};

template <class T>
GivensFactorization<T> lower_inverse_to_orthogonal(const std::vector<T>& xb, const std::vector<T>& x, int n, int k) {
    GivensFactorization<T> g;
    g.n = n;
    g.k = k;
    g.c.assign(n + 2, T(1));
    g.s.assign(n + 2, T(0));
    g.yb.assign(n + 2, T(1));
    g.y.assign(n + 2, T(0));
    T z = xb[n];
    for (int i = n; i >= k + 1; --i) {
        const T h = hypot_sf(z, x[i - 1]);
        g.yb[i] = h;
        if (h != T(0)) {
            g.c[i] = z / h;
            g.s[i] = x[i - 1] / h;
        }
        g.y[i - 1] = g.s[i] * xb[i - 1];
        z = g.c[i] * xb[i - 1];
    }
    g.yb[k] = z;
    return g;
}

namespace detail {

template <class T>
void get_lower(const Repr<T>& R, int k, std::vector<T>& b, std::vector<T>& o) {
    const int n = R.n;
    b.assign(n + 2, T(1));
    o.assign(n + 2, T(0));
    for (int i = lower_first(R.n, R.m, k); i <= lower_last(R.n, R.m, k); ++i) {
        b[i] = R.bar(i + 1, i + 1 - k);
        o[i] = R.off(i + 1, i + 1 - k);
    }
}

template <class T>
void set_lower(Repr<T>& R, int k, const std::vector<T>& b, const std::vector<T>& o) {
    const int n = R.n, f = lower_first(R.n, R.m, k), l = lower_last(R.n, R.m, k);
    for (int i = 1; i <= n; ++i) {
        if (i >= f && i <= l) {
            R.bar(i + 1, i + 1 - k) = b[i];
            R.off(i + 1, i + 1 - k) = o[i];
        } else if (b[i] != T(1) || (i < n && o[i] != T(0))) {
            throw std::logic_error("lower factor left its band during a pass");
        }
    }
}

template <class T>
void get_upper(const Repr<T>& R, int l, std::vector<T>& b, std::vector<T>& o) {
    const int m = R.m;
    b.assign(m + 2, T(1));
    o.assign(m + 2, T(0));
    for (int i = upper_first(R.n, R.m, l); i <= upper_last(R.n, R.m, l); ++i) {
        b[i] = R.bar(i + 1 - l, i + 1);
        o[i] = R.off(i + 1 - l, i + 1);
    }
}

template <class T>
void set_upper(Repr<T>& R, int l, const std::vector<T>& b, const std::vector<T>& o) {
    const int m = R.m, f = upper_first(R.n, R.m, l), e = upper_last(R.n, R.m, l);
    for (int i = 1; i <= m; ++i) {
        if (i >= f && i <= e) {
            R.bar(i + 1 - l, i + 1) = b[i];
            R.off(i + 1 - l, i + 1) = o[i];
        } else if (b[i] != T(1) || (i < m && o[i] != T(0))) {
            throw std::logic_error("upper factor left its band during a pass");
        }
    }
}

template <class T>
bool is_identity(const std::vector<T>& b, const std::vector<T>& o, int N) {
    for (int i = 1; i <= N; ++i)
        if (b[i] != T(1) || (i < N && o[i] != T(0))) return false;
    return true;
}

}  // namespace detail

// BD(U A) for U = biupp(yb, y) of order n = R.n.
// Schedule: U travels right through L_{n-1}, ..., L_1 by pt1, through D by
// pt2 and then, as the left operand of pt3, through U_1, ..., U_{m-1};
// each pt3 leaves the new U_l behind and shifts the traveller by one index.
template <class T>
Repr<T> apply_left_upper(const Repr<T>& R0, std::vector<T> yb, std::vector<T> y) {
    if (detail::is_identity(yb, y, R0.n)) return R0;
    Repr<T> R = R0;
    const int n = R.n, m = R.m;
    yb.resize(std::max(n, m) + 2, T(1));
    y.resize(std::max(n, m) + 2, T(0));
    std::vector<T> xb, x;
    for (int k = n - 1; k >= 1; --k) {
        detail::get_lower(R, k, xb, x);
        pass_upper_through_lower(yb, y, xb, x, n);
        detail::set_lower(R, k, xb, x);
    }
    const int p = std::min(n, m);
    std::vector<T> d(p + 2, T(0)), tb, t;
    for (int i = 1; i <= p; ++i) d[i] = R.off(i, i);
    pass_upper_through_diag(yb, y, d, n, m, tb, t);
    for (int i = 1; i <= p; ++i) R.off(i, i) = d[i];
    std::vector<T> ub, u, ub2, u2, tb2, t2;
    for (int l = 1; l <= m - 1; ++l) {
        detail::get_upper(R, l, ub, u);
        pass_upper_through_upper(tb, t, ub, u, m, l, false, ub2, u2, tb2, t2);
        detail::set_upper(R, l, ub2, u2);
        tb.swap(tb2);
        t.swap(t2);
    }
    if (tb[m] != T(1)) throw std::logic_error("upper pass left a nontrivial trailing pair");
    return R;
}

// BD(L A) for L = bilow(xb, x) of order n = R.n.
// Schedule (transposed picture): L_k^T is the left operand and the travelling
// L^T the right operand of pt3, for k = n-1 down to 1. The traveller keeps
// the full output and picks up L_k's content; the shifted output becomes the
// new L_{k+1}. The traveller finally becomes L_1, with bars outside {0,1}
// folded into D.
template <class T>
Repr<T> apply_left_lower(const Repr<T>& R0, std::vector<T> xb, std::vector<T> x) {
    if (detail::is_identity(xb, x, R0.n)) return R0;
    Repr<T> R = R0;
    const int n = R.n, m = R.m;
    xb.resize(n + 2, T(1));
    x.resize(n + 2, T(0));
    std::vector<std::vector<T>> sb(n + 1), s(n + 1);
    std::vector<T> cb, c, tb2, t2;
    for (int k = n - 1; k >= 1; --k) {
        detail::get_lower(R, k, cb, c);
        pass_upper_through_upper(cb, c, xb, x, n, 1, true, tb2, t2, sb[k + 1], s[k + 1]);
        xb.swap(tb2);
        x.swap(t2);
    }
    for (int k = n; k >= 2; --k) {
        if (k == n) {
            if (!detail::is_identity(sb[k], s[k], n)) throw std::logic_error("lower pass left a nontrivial L_n");
            continue;
        }
        detail::set_lower(R, k, sb[k], s[k]);
    }
    const int p = std::min(n, m);
    for (int i = m + 1; i <= n; ++i) {
        xb[i] = T(1);
        if (i < n) x[i] = T(0);
    }
    if (n <= m && xb[n] != T(1)) {
        R.off(n, n) = R.off(n, n) * xb[n];
        xb[n] = T(1);
    }
    for (int i = 1; i <= std::min(p, n - 1); ++i) {
        if (xb[i] != T(0) && xb[i] != T(1)) {
            x[i] = x[i] / xb[i];
            R.off(i, i) = R.off(i, i) * xb[i];
            xb[i] = T(1);
        }
    }
    detail::set_lower(R, 1, xb, x);
    return R;
}

// A U for U = biupp(yb, y) of order m: (A U)^T = U^T A^T with U^T lower.
template <class T>
Repr<T> apply_right_upper(const Repr<T>& R, const std::vector<T>& yb, const std::vector<T>& y) {
    if (detail::is_identity(yb, y, R.m)) return R;
    return transpose(apply_left_lower(transpose(R), yb, y));
}
template <class T>
Repr<T> apply_right_lower(const Repr<T>& R, const std::vector<T>& xb, const std::vector<T>& x) {
    if (detail::is_identity(xb, x, R.m)) return R;
    return transpose(apply_left_upper(transpose(R), xb, x));
}

enum class Side { left, right };

// F must be square here; rectangular factors go through the square/rectangular split in assembly.
template <class T>
Repr<T> apply_factor(const Repr<T>& R, const BidiagonalFactor<T>& F, Side side) {
    F.validate();
    if (F.rows != F.cols) throw dimension_error("apply_factor: factor must be square");
    const int need = side == Side::left ? R.n : R.m;
    if (F.rows != need) throw dimension_error("apply_factor: dimension mismatch");
    std::vector<T> b, o;
    F.square_vectors(b, o);
    if (side == Side::left)
        return F.orientation == Orientation::upper ? apply_left_upper(R, b, o) : apply_left_lower(R, b, o);
    return F.orientation == Orientation::upper ? apply_right_upper(R, b, o) : apply_right_lower(R, b, o);
}

}  // namespace tnsvd
