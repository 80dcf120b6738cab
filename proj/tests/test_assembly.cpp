#include "doctest.h"
#include "support.hpp"
#include "tnsvd/assembly.hpp"
#include "tnsvd/extraction.hpp"

using namespace tnsvd;
using namespace tnsvd::test;

TEST_CASE("assemble a single square factor") {
    RandQ r(31);
    for (int t = 0; t < 50; ++t) {
        const int n = r.below(5) + 1;
        BidiagonalProduct<Q> P;
        P.factors.push_back(r.factor(n, n, 0.2));
        CHECK(expand_dense(assemble(P)) == P.factors[0].dense());
    }
}

TEST_CASE("assemble random chains exactly") {
    RandQ r(32);
    for (int t = 0; t < 400; ++t) {
        const auto P = r.chain(5, 4, 0.3);
        CHECK(expand_dense(assemble(P)) == expand_product(P));
    }
    BidiagonalProduct<Q> P;
    P.factors.push_back(r.factor(4, 3, 0.0));
    P.factors.push_back(r.factor(3, 5, 0.0));
    CHECK(expand_dense(assemble(P)) == expand_product(P));
}

TEST_CASE("assemble the triple product A1 A1^T A1") {
    // small analogue of the seeded example: g_ij = r_i / j, bars random in {0, 1}
    RandQ r(33);
    const int n = 9, m = 5;
    Repr<Q> R(n, m);
    for (int i = 1; i <= n; ++i) {
        const Q ri = r.value();
        for (int j = 1; j <= m; ++j) {
            R.off(i, j) = ri / j;
            if (i != j) R.bar(i, j) = Q(r.below(2));
        }
    }
    const auto c = repr_to_product(R);
    const auto P = concat<Q>({c, c.transposed(), c});
    const auto A = expand_dense(R);
    CHECK(expand_dense(assemble(P)) == A * A.transposed() * A);
}

TEST_CASE("split_at_min") {
    RandQ r(34);
    SUBCASE("equal dimensions tie-break to T = 0") {
        BidiagonalProduct<Q> P;
        for (int k = 0; k < 3; ++k) P.factors.push_back(r.factor(4, 4, 0.1));
        const auto s = split_at_min(P);
        CHECK(s.split_index == 0);
        CHECK(s.a2 == Repr<Q>::identity(4, 4));
        CHECK(expand_dense(s.a1) == expand_product(P));
    }
    SUBCASE("dims 5, 3, 4") {
        BidiagonalProduct<Q> P;
        P.factors.push_back(r.factor(5, 3, 0.1));
        P.factors.push_back(r.factor(3, 4, 0.1));
        const auto s = split_at_min(P);
        CHECK(s.split_index == 1);
        CHECK(s.min_dim == 3);
        CHECK(s.a2.n == 5);
        CHECK(s.a2.m == 3);
        CHECK(s.a1.n == 3);
        CHECK(s.a1.m == 4);
    }
    SUBCASE("split halves multiply back") {
        for (int t = 0; t < 300; ++t) {
            const auto P = r.chain(5, 4, 0.3);
            const auto s = split_at_min(P);
            CHECK(expand_dense(s.a2) * expand_dense(s.a1) == expand_product(P));
        }
    }
    SUBCASE("errors") {
        BidiagonalProduct<Q> P;
        P.factors.push_back(r.factor(3, 4, 0.1));
        P.factors.push_back(r.factor(3, 3, 0.1));
        CHECK_THROWS_AS(assemble(P), dimension_error);
    }
}

TEST_CASE("delete_row and delete_col") {
    RandQ r(35);
    SUBCASE("last row is a plain drop") {
        const auto R = r.repr(4, 3);
        CHECK(delete_row(R, 4) == drop_trailing_rows(R, 3));
        CHECK(delete_col(R, 3) == drop_trailing_cols(R, 2));
    }
    SUBCASE("identity rows and columns") {
        const auto A = expand_dense(delete_row(Repr<Q>::identity(3, 3), 2));
        Dense<Q> want(2, 3);
        want(0, 0) = 1;
        want(1, 2) = 1;
        CHECK(A == want);
        const auto B = expand_dense(delete_col(Repr<Q>::identity(3, 3), 1));
        Dense<Q> wb(3, 2);
        wb(1, 0) = 1;
        wb(2, 1) = 1;
        CHECK(B == wb);
    }
    SUBCASE("random") {
        for (int t = 0; t < 300; ++t) {
            const int n = r.below(5) + 2, m = r.below(5) + 2;
            const auto R = r.repr(n, m);
            const int i = r.below(n) + 1, j = r.below(m) + 1;
            CHECK(expand_dense(delete_row(R, i)) == strike(expand_dense(R), {i}, {}));
            CHECK(expand_dense(delete_col(R, j)) == strike(expand_dense(R), {}, {j}));
        }
    }
    CHECK_THROWS_AS(delete_row(Repr<Q>::identity(1, 3), 1), dimension_error);
    CHECK_THROWS_AS(delete_row(Repr<Q>::identity(3, 3), 4), dimension_error);
}

TEST_CASE("extract_submatrix") {
    RandQ r(36);
    const auto R = r.repr(5, 5);
    CHECK(extract_submatrix(R, {}, {}) == R);
    CHECK(expand_dense(extract_submatrix(R, {2, 4}, {1, 5})) == strike(expand_dense(R), {2, 4}, {1, 5}));
    // any deletion order gives the same matrix
    const auto a = expand_dense(delete_row(delete_row(R, 2), 3));
    const auto b = expand_dense(delete_row(delete_row(R, 4), 2));
    CHECK(a == b);
    CHECK_THROWS_AS(extract_submatrix(R, {2, 2}, {}), dimension_error);
    CHECK_THROWS_AS(extract_submatrix(R, {1, 2, 3, 4, 5}, {}), dimension_error);
}
