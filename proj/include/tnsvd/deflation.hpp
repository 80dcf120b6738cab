#pragma once

#include <stdexcept>
#include <vector>

#include "tnsvd/assembly.hpp"
#include "tnsvd/extraction.hpp"

namespace tnsvd {

struct strict_mode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PermutationMove {
    enum Kind { row, col } kind;
    int index;  // 0-based global index moved behind the deflated block
};

// Q = (product of logged rotations, in order) with columns then reordered
// by `order`. A rotation (p,q,c,s) maps columns p,q to
// c*col_p + s*col_q and -s*col_p + c*col_q.
struct OrthogonalAccumulator {
    int dimension = 0;
    std::vector<Rotation> log;
    std::vector<PermutationMove> moves;
    std::vector<int> order;

    Dense<double> materialize() const {
        Dense<double> Q = Dense<double>::identity(dimension);
        for (const auto& r : log)
            for (int i = 0; i < dimension; ++i) {
                const double a = Q(i, r.p), b = Q(i, r.q);
                Q(i, r.p) = r.c * a + r.s * b;
                Q(i, r.q) = -r.s * a + r.c * b;
            }
        Dense<double> P(dimension, dimension);
        for (int k = 0; k < dimension; ++k)
            for (int i = 0; i < dimension; ++i) P(i, k) = Q(i, order[k]);
        return P;
    }
};

template <class T>
struct DeflationResult {
    std::vector<T> bbar_diag;
    std::vector<T> bbar_super;
    int rank = 0;
    int out_rows = 0, out_cols = 0;
    OrthogonalAccumulator g_acc, v_acc;
    int zero_pivots = 0;   // extension: zero pivots deflated as zero rows/cols
    int chases = 0;        // extension: superdiagonal couplings rotated out
};

struct DeflateOptions {
    bool strict = false;
};

// Indices k-1 for every k > t with bar(k,t) = 0: row k-1 of A is zero.
template <class T>
std::vector<int> reveal_zero_rows(const Repr<T>& R, int t) {
    std::vector<int> out;
    for (int k = t + 1; k <= R.n; ++k)
        if (t <= R.m && R.bar(k, t) == T(0)) out.push_back(k - 1);
    return out;
}
template <class T>
std::vector<int> reveal_zero_cols(const Repr<T>& R, int t) {
    return reveal_zero_rows(transpose(R), t);
}

// L A for L = bilow({1, -g_{i+1,t}}_{i=t}^{n-1}): set g_{it} = 0 below the
// pivot. Returns the magnitudes, m[i] = g_{i+1,t}. No arithmetic happens.
template <class T>
std::vector<T> eliminate_column(Repr<T>& R, int t) {
    std::vector<T> g(R.n + 2, T(0));
    for (int k = t + 1; k <= R.n; ++k) {
        if (R.bar(k, t) != T(1)) throw std::logic_error("eliminate_column: unrevealed zero below the pivot");
        g[k - 1] = R.off(k, t);
        R.off(k, t) = T(0);
    }
    return g;
}

// A U for U = biupp({1, -g_{t,j+1}}_{j=first-1}^{m-1}): set g_{tj} = 0 for j >= first.
template <class T>
std::vector<T> eliminate_row(Repr<T>& R, int t, int first) {
    std::vector<T> g(R.m + 2, T(0));
    for (int j = first; j <= R.m; ++j) {
        if (R.bar(t, j) != T(1)) throw std::logic_error("eliminate_row: unrevealed zero right of the pivot");
        g[j - 1] = R.off(t, j);
        R.off(t, j) = T(0);
    }
    return g;
}

namespace detail {

template <class T>
bool all_zero(const std::vector<T>& v) {
    for (const auto& x : v)
        if (x != T(0)) return false;
    return true;
}

template <class T>
Repr<T> left_elementary_upper(const Repr<T>& R, int i, const T& b, const T& o) {
    std::vector<T> yb(R.n + 2, T(1)), y(R.n + 2, T(0));
    yb[i] = b;
    if (i < R.n) y[i] = o;
    return apply_left_upper(R, yb, y);
}
template <class T>
Repr<T> right_elementary_lower(const Repr<T>& R, int i, const T& b, const T& o) {
    std::vector<T> xb(R.m + 2, T(1)), x(R.m + 2, T(0));
    xb[i] = b;
    if (i < R.m) x[i] = o;
    return apply_right_lower(R, xb, x);
}

}  // namespace detail

// G^T X^{-1} = Y for X = bilow({1,-x_i}_{i=k}^{n-1}) via the Givens factorization; returns Y A and
// the rotations (local indices, G_n first).
template <class T>
Repr<T> orthogonalize_left(const Repr<T>& A, const std::vector<T>& x, int k, std::vector<Rotation>& rots) {
    const int n = A.n;
    if (n <= k) return A;
    std::vector<T> xb(n + 2, T(1)), xv(n + 2, T(0));
    for (int i = k; i < n; ++i) xv[i] = x[i];
    if (detail::all_zero(xv)) return A;
    const auto g = lower_inverse_to_orthogonal(xb, xv, n, k);
    for (int i = n; i >= k + 1; --i) rots.push_back({i - 1, i, to_double(g.c[i]), to_double(g.s[i])});
    Repr<T> R = A;
    // Y = prod_{i=k}^{n} U_{i:i}(1/yb_i, y_i/yb_i); the rightmost acts first
    for (int i = n; i >= k; --i) {
        const T b = T(1) / g.yb[i];
        const T o = i < n ? g.y[i] / g.yb[i] : T(0);
        if (b == T(1) && o == T(0)) continue;
        R = detail::left_elementary_upper(R, i, b, o);
    }
    return R;
}

// Periodic deflation on the active trailing block. State: finalized bidiagonal
// entries, the active representations (A2 n x r, A1 r x m in the split case,
// a single A otherwise) and maps from active positions to global indices.
template <class T>
class PeriodicDeflation {
public:
    PeriodicDeflation(const SplitProduct<T>& s, DeflateOptions opt) : opt_(opt) {
        mid_ = s.split_index > 0 && s.split_index < s.factor_count;
        if (mid_) {
            A2_ = s.a2;
            A1_ = s.a1;
        } else {
            A1_ = s.split_index == 0 ? s.a1 : s.a2;
        }
        n0_ = mid_ ? A2_.n : A1_.n;
        nk_ = A1_.m;
        res_.out_rows = n0_;
        res_.out_cols = nk_;
        res_.g_acc.dimension = n0_;
        res_.v_acc.dimension = nk_;
        for (int i = 0; i < n0_; ++i) rowmap_.push_back(i);
        for (int j = 0; j < nk_; ++j) colmap_.push_back(j);
        n_ = n0_;
        m_ = nk_;
        r_ = mid_ ? A2_.m : 0;
    }

    DeflationResult<T> run() {
        int idle = 0;
        while (!empty()) {
            const int before = n_ + m_ + r_;
            if (stage()) {
                idle = 0;
                continue;
            }
            if (n_ + m_ + r_ == before && ++idle > 2) throw std::logic_error("deflation stage made no progress");
        }
        finish();
        return std::move(res_);
    }

private:
    DeflateOptions opt_;
    bool mid_ = false;
    Repr<T> A2_, A1_;
    int n0_ = 0, nk_ = 0;
    int n_ = 0, m_ = 0, r_ = 0;  // active sizes (r_ only in the split case)
    std::vector<int> rowmap_, colmap_, finrows_, fincols_;
    T coupling_ = T(0);          // superdiagonal entry from the last finalized row into active column 1
    DeflationResult<T> res_;

    bool empty() const { return n_ == 0 || m_ == 0 || (mid_ && r_ == 0); }
    Repr<T>& As() { return mid_ ? A2_ : A1_; }
    Repr<T>& Az() { return A1_; }

    void zero_pivot(const char* what) {
        if (opt_.strict) throw strict_mode_error(std::string("zero pivot with no revealed zero: ") + what);
        ++res_.zero_pivots;
    }

    // delete inner index k (column k of A2, row k of A1)
    void drop_inner(int k) {
        if (r_ == 1) {
            r_ = 0;
            return;
        }
        A2_ = delete_col(A2_, k);
        A1_ = delete_row(A1_, k);
        --r_;
    }
    void drop_row(int k) {
        res_.g_acc.moves.push_back({PermutationMove::row, rowmap_[k - 1]});
        rowmap_.erase(rowmap_.begin() + (k - 1));
        if (n_ == 1) {
            n_ = 0;
            return;
        }
        As() = delete_row(As(), k);
        --n_;
    }
    void drop_col(int k) {
        if (k == 1) chase_out(colmap_[0]);
        res_.v_acc.moves.push_back({PermutationMove::col, colmap_[k - 1]});
        colmap_.erase(colmap_.begin() + (k - 1));
        if (m_ == 1) {
            m_ = 0;
            return;
        }
        Az() = delete_col(Az(), k);
        --m_;
    }

    // The last finalized row couples into global column q, which is about to
    // become zero. Rotate columns (fin_i, q) from the bottom up; every step is
    // a hypot and products, so no cancellation.
    void chase_out(int q) {
        if (coupling_ == T(0)) return;
        ++res_.chases;
        const int k = int(res_.bbar_diag.size());
        T mag = coupling_;
        bool neg = false;
        for (int i = k - 1; i >= 0; --i) {
            T& d = res_.bbar_diag[i];
            const T h = hypot_sf(d, mag);
            const T c = d / h, s = mag / h;
            res_.v_acc.log.push_back({fincols_[i], q, to_double(c), neg ? -to_double(s) : to_double(s)});
            d = h;
            if (i == 0) break;
            T& e = res_.bbar_super[i - 1];
            mag = s * e;
            e = c * e;
            neg = !neg;
            if (mag == T(0)) break;
        }
        coupling_ = T(0);
    }


    // one pass of the deflation loop body at local pivot 1; returns true if
    // the stage was restarted because the pivot row/column changed
    bool stage() {
        if (mid_) {
            // zero rows of A1 revealed in column 1 go with columns of A2
            if (scan_rows(A1_, [&](int k) { drop_inner(k); })) return true;
            if (empty()) return true;
            auto g = eliminate_column(A1_, 1);
            // A2 := A2 L^{-1}, L^{-1} = L_{r-1:r-1}(1,g_r) ... L_{1:1}(1,g_2)
            for (int i = r_ - 1; i >= 1; --i)
                if (g[i] != T(0)) A2_ = detail::right_elementary_lower(A2_, i, T(1), g[i]);
            if (A1_.off(1, 1) == T(0)) {
                zero_pivot("A1 row");
                drop_inner(1);
                return true;
            }
        }
        // zero rows of A_s, then G^T X^{-1} = Y
        if (scan_rows(As(), [&](int k) { drop_row(k); })) return true;
        if (empty()) return true;
        {
            auto x = eliminate_column(As(), 1);
            std::vector<Rotation> rots;
            As() = orthogonalize_left(As(), x, 1, rots);
            for (const auto& q : rots) res_.g_acc.log.push_back({rowmap_[q.p - 1], rowmap_[q.q - 1], q.c, q.s});
        }
        if (As().off(1, 1) == T(0)) {
            zero_pivot("row");
            drop_row(1);
            return true;
        }
        if (mid_) {
            // zero columns of A2 go with rows of A1; A1 := U^{-1} A1
            if (scan_cols(A2_, [&](int k) { drop_inner(k); })) return true;
            if (empty()) return true;
            auto g = eliminate_row(A2_, 1, 2);
            // U^{-1} = E_1(1,g_2) ... E_{r-1}(1,g_r), the rightmost acts first
            for (int i = r_ - 1; i >= 1; --i)
                if (g[i] != T(0)) A1_ = detail::left_elementary_upper(A1_, i, T(1), g[i]);
        }
        // zero columns of A_z, then the transposed Givens factorization from index 2
        if (scan_cols(Az(), [&](int k) { drop_col(k); })) return true;
        if (empty()) return true;
        {
            auto x = eliminate_row(Az(), 1, 3);
            std::vector<Rotation> rots;
            Az() = transpose(orthogonalize_left(transpose(Az()), x, 2, rots));
            for (const auto& q : rots) res_.v_acc.log.push_back({colmap_[q.p - 1], colmap_[q.q - 1], q.c, q.s});
        }
        if (!reduced()) return true;
        finalize();
        return false;
    }

    // Delete every revealed zero (largest index first, rescanning since a
    // deletion can expose new zeros below it). True if index 1 was deleted.
    template <class Drop>
    bool scan_rows(Repr<T>& R, Drop drop) {
        bool first = false;
        for (;;) {
            if (empty()) return first;
            const Repr<T>& A = R;
            int hit = 0;
            for (int k = A.n; k >= 2; --k)
                if (A.bar(k, 1) == T(0)) {
                    hit = k;
                    break;
                }
            if (!hit) return first;
            if (hit == 2) first = true;
            drop(hit - 1);
        }
    }
    template <class Drop>
    bool scan_cols(Repr<T>& R, Drop drop) {
        bool first = false;
        for (;;) {
            if (empty()) return first;
            const Repr<T>& A = R;
            int hit = 0;
            for (int k = A.m; k >= 2; --k)
                if (A.bar(1, k) == T(0)) {
                    hit = k;
                    break;
                }
            if (!hit) return first;
            if (hit == 2) first = true;
            drop(hit - 1);
        }
    }

    static bool reduced_block(const Repr<T>& R, bool keep12) {
        for (int i = 2; i <= R.n; ++i)
            if (R.bar(i, 1) != T(1) || R.off(i, 1) != T(0)) return false;
        for (int j = 2; j <= R.m; ++j) {
            if (R.bar(1, j) != T(1)) return false;
            if ((j > 2 || !keep12) && R.off(1, j) != T(0)) return false;
        }
        return R.off(1, 1) != T(0);
    }
    bool reduced() const {
        if (mid_) return reduced_block(A2_, false) && reduced_block(A1_, true);
        return reduced_block(A1_, true);
    }

    void finalize() {
        T d = mid_ ? A2_.off(1, 1) * A1_.off(1, 1) : A1_.off(1, 1);
        T e = m_ >= 2 ? d * Az().off(1, 2) : T(0);
        if (!res_.bbar_diag.empty()) res_.bbar_super.push_back(coupling_);
        res_.bbar_diag.push_back(d);
        coupling_ = e;
        finrows_.push_back(rowmap_.front());
        fincols_.push_back(colmap_.front());
        rowmap_.erase(rowmap_.begin());
        colmap_.erase(colmap_.begin());
        const bool last = n_ == 1 || m_ == 1 || (mid_ && r_ == 1);
        --n_;
        --m_;
        if (mid_) --r_;
        if (last) return;
        if (mid_) {
            A2_ = A2_.trailing(2, 2);
            A1_ = A1_.trailing(2, 2);
        } else {
            A1_ = A1_.trailing(2, 2);
        }
    }

    void finish() {
        if (m_ > 0) chase_out(colmap_.front());
        for (int g : rowmap_) res_.g_acc.moves.push_back({PermutationMove::row, g});
        for (int g : colmap_) res_.v_acc.moves.push_back({PermutationMove::col, g});
        res_.rank = int(res_.bbar_diag.size());
        auto order = [](const std::vector<int>& fin, const std::vector<PermutationMove>& mv) {
            std::vector<int> o = fin;
            for (const auto& p : mv) o.push_back(p.index);
            return o;
        };
        res_.g_acc.order = order(finrows_, res_.g_acc.moves);
        res_.v_acc.order = order(fincols_, res_.v_acc.moves);
    }
};

template <class T>
DeflationResult<T> periodic_deflate(const SplitProduct<T>& s, DeflateOptions opt = {}) {
    check_nonneg(s.a1);
    check_nonneg(s.a2);
    return PeriodicDeflation<T>(s, opt).run();
}

// deflation of a single representation (T = 0 split)
template <class T>
DeflationResult<T> deflate_repr(const Repr<T>& R, DeflateOptions opt = {}) {
    SplitProduct<T> s;
    s.a1 = R;
    s.a2 = Repr<T>::identity(R.n, R.n);
    s.split_index = 0;
    s.factor_count = 1;
    s.min_dim = std::min(R.n, R.m);
    return periodic_deflate(s, opt);
}

}  // namespace tnsvd
