#pragma once

#include <algorithm>
#include <vector>

#include "tnsvd/passthrough.hpp"

namespace tnsvd {

namespace detail {

// right-to-left sweep A_{i-1} = B_i A_i, A_K = I; cost O(S n_K)
template <class T>
Repr<T> assemble_right_to_left(const BidiagonalProduct<T>& P) {
    const auto& fs = P.factors;
    Repr<T> A = Repr<T>::identity(fs.back().cols, fs.back().cols);
    std::vector<T> b, o;
    for (int k = int(fs.size()) - 1; k >= 0; --k) {
        const auto& B = fs[k];
        B.square_vectors(b, o);
        if (B.orientation == Orientation::lower) {
            // B = B' I_{rows x cols}
            A = resize_rows(A, B.rows);
            A = apply_left_lower(A, b, o);
        } else {
            // B = I_{rows x cols} B'
            A = apply_left_upper(A, b, o);
            A = resize_rows(A, B.rows);
        }
    }
    return A;
}

}  // namespace detail

template <class T>
Repr<T> assemble(const BidiagonalProduct<T>& P) {
    P.validate();
    if (P.rows() >= P.cols()) return detail::assemble_right_to_left(P);
    return transpose(detail::assemble_right_to_left(P.transposed()));
}

template <class T>
struct SplitProduct {
    Repr<T> a2;  // n_0 x r
    Repr<T> a1;  // r x n_K
    int split_index = 0;
    int min_dim = 0;
    int factor_count = 0;
};

template <class T>
SplitProduct<T> split_at_min(const BidiagonalProduct<T>& P) {
    P.validate();
    const auto d = P.dims();
    const int K = int(P.factors.size());
    int T_ = 0;
    for (int i = 1; i <= K; ++i)
        if (d[i] < d[T_]) T_ = i;
    SplitProduct<T> s;
    s.split_index = T_;
    s.min_dim = d[T_];
    s.factor_count = K;
    BidiagonalProduct<T> left, right;
    left.factors.assign(P.factors.begin(), P.factors.begin() + T_);
    right.factors.assign(P.factors.begin() + T_, P.factors.end());
    s.a2 = T_ == 0 ? Repr<T>::identity(s.min_dim, s.min_dim) : assemble(left);
    s.a1 = T_ == K ? Repr<T>::identity(s.min_dim, s.min_dim) : assemble(right);
    return s;
}

}  // namespace tnsvd
