#pragma once

#include <vector>

#include "tnsvd/passthrough.hpp"

namespace tnsvd {

// A(r|:] = I_{n-1,n} U_r A with U_r = biupp({0,1}_{i=r}^{n}).
template <class T>
Repr<T> delete_row(const Repr<T>& R, int r) {
    if (R.n < 2) throw dimension_error("delete_row: need at least two rows");
    if (r < 1 || r > R.n) throw dimension_error("delete_row: index out of range");
    const int n = R.n;
    if (r == n) return drop_trailing_rows(R, n - 1);
    std::vector<T> yb(n + 2, T(1)), y(n + 2, T(0));
    for (int i = r; i <= n; ++i) yb[i] = T(0);
    for (int i = r; i <= n - 1; ++i) y[i] = T(1);
    return drop_trailing_rows(apply_left_upper(R, yb, y), n - 1);
}

template <class T>
Repr<T> delete_col(const Repr<T>& R, int c) {
    if (c < 1 || c > R.m) throw dimension_error("delete_col: index out of range");
    return transpose(delete_row(transpose(R), c));
}

inline void check_index_set(const std::vector<int>& idx, int limit, const char* what) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 1 || idx[k] > limit) throw dimension_error(std::string(what) + ": index out of range");
        if (k > 0 && idx[k] <= idx[k - 1])
            throw dimension_error(std::string(what) + ": indices must be strictly increasing");
    }
    if (int(idx.size()) >= limit) throw dimension_error(std::string(what) + ": would leave an empty matrix");
}

// Rows of alpha deleted from the largest index down, then
// columns of beta likewise, so earlier indices stay valid.
template <class T>
Repr<T> extract_submatrix(const Repr<T>& R, const std::vector<int>& alpha, const std::vector<int>& beta) {
    check_index_set(alpha, R.n, "extract_submatrix rows");
    check_index_set(beta, R.m, "extract_submatrix cols");
    Repr<T> A = R;
    for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) A = delete_row(A, *it);
    if (!beta.empty()) {
        A = transpose(A);
        for (auto it = beta.rbegin(); it != beta.rend(); ++it) A = delete_row(A, *it);
        A = transpose(A);
    }
    return A;
}

}  // namespace tnsvd
