#include "doctest.h"
#include "support.hpp"
#include "tnsvd/assembly.hpp"
#include "tnsvd/oracle.hpp"

using namespace tnsvd;
using namespace tnsvd::test;

TEST_CASE("bd_distinct of a 1x1 matrix") {
    RationalMatrix A(1, 1);
    A(0, 0) = Q(5, 3);
    const auto R = neville_bd(A);
    CHECK(R.off(1, 1) == Q(5, 3));
    CHECK(R.bar(1, 1) == 1);
}

TEST_CASE("bd_distinct of the 2x2 Cauchy matrix") {
    const auto s = NodeSpec::uniform(Family::cauchy, {Q(1), Q(2)}, {Q(1), Q(2)}, 0, 0, 1, 1);
    const auto R = bd_distinct(s);
    CHECK(R.off(1, 1) == Q(1, 2));
    CHECK(R.off(2, 1) == Q(2, 3));
    CHECK(R.off(1, 2) == Q(2, 3));
    CHECK(R.off(2, 2) == Q(1, 36));
    CHECK(expand_dense(R) == core_matrix(s));
}

TEST_CASE("bd_distinct of the 3x3 Vandermonde matrix") {
    const auto s = NodeSpec::uniform(Family::vandermonde, {Q(1), Q(2), Q(3)}, {}, 3, 0, 1, 1);
    const auto A = expand_dense(bd_distinct(s));
    for (int i = 0; i < 3; ++i) {
        Q p = 1;
        for (int j = 0; j < 3; ++j, p *= (i + 1)) CHECK(A(i, j) == p);
    }
}

TEST_CASE("Neville elimination reconstructs every family") {
    const std::vector<Q> x{Q(1, 7), Q(2, 7), Q(3, 7), Q(5, 7)}, y{Q(1, 3), Q(1, 2), Q(2)};
    for (auto f : {Family::cauchy, Family::vandermonde, Family::cauchy_vandermonde, Family::bernstein_vandermonde}) {
        std::vector<Q> ys;
        if (f == Family::cauchy) ys = y;
        if (f == Family::cauchy_vandermonde) ys = {y[0], y[1]};
        const auto s = NodeSpec::uniform(f, x, ys,
                                         f == Family::cauchy ? 0 : 4, f == Family::cauchy_vandermonde ? 2 : 0, 1, 1);
        const auto R = bd_distinct(s);
        CHECK(expand_dense(R) == core_matrix(s));
        for (const auto& v : R.offs) CHECK(v >= 0);
        for (const auto& v : R.bars) CHECK(v >= 0);
    }
}

TEST_CASE("Neville elimination needs nonzero leading pivots") {
    RationalMatrix A(2, 2);
    A(0, 1) = 1;
    A(1, 0) = 1;
    CHECK_THROWS_AS(neville_bd(A), generation_error);
}

TEST_CASE("expand_repeated") {
    SUBCASE("distinct nodes reduce to the core") {
        const auto s = NodeSpec::uniform(Family::vandermonde, {Q(1), Q(2), Q(3)}, {}, 3, 0, 1, 1);
        CHECK(expand_product(expand_repeated(s)) == core_matrix(s));
    }
    SUBCASE("a repeated Vandermonde node") {
        NodeSpec s = NodeSpec::uniform(Family::vandermonde, {Q(3, 2)}, {}, 2, 0, 2, 1);
        const auto A = expand_product(expand_repeated(s));
        REQUIRE(A.rows == 2);
        REQUIRE(A.cols == 2);
        CHECK(A(0, 0) == 1);
        CHECK(A(1, 0) == 1);
        CHECK(A(0, 1) == Q(3, 2));
        CHECK(A(1, 1) == Q(3, 2));
    }
    SUBCASE("reduced Cauchy-Vandermonde with row and column repeats") {
        const int n2 = 7, n1 = 8, l = 2;
        std::vector<Q> x, y;
        for (int i = 1; i <= n2; ++i) x.push_back(make_rational(i, n2));
        for (int j = 1; j <= l; ++j) y.push_back(make_rational(j, n1));
        const auto s = NodeSpec::uniform(Family::cauchy_vandermonde, x, y, n1, l, 3, 2);
        const auto P = expand_repeated(s);
        const auto A = expand_product(P);
        REQUIRE(A.rows == 3 * n2);
        REQUIRE(A.cols == 2 * n1);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < A.cols; ++j) {
                const Q& xi = x[i / 3];
                const int c = j / 2;
                Q want = 1;
                if (c < l) want = 1 / Q(xi + y[c]);
                else
                    for (int k = 0; k < c - l; ++k) want *= xi;
                CHECK(A(i, j) == want);
            }
        CHECK(A == expanded_matrix(s));
        CHECK(rank_exact(A) == rank_exact(core_matrix(s)));
        for (const auto& f : P.factors)
            for (const auto& p : f.pairs) CHECK((p.bar >= 0 && p.off >= 0));
    }
    SUBCASE("duplication chain") {
        const auto D = expand_product(duplication_chain({1, 3, 2}));
        REQUIRE(D.rows == 6);
        REQUIRE(D.cols == 3);
        const int grp[6] = {0, 1, 1, 1, 2, 2};
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 3; ++j) CHECK(D(i, j) == Q(grp[i] == j ? 1 : 0));
    }
}

TEST_CASE("submatrix_product_form") {
    RandQ r(71);
    const auto P = r.chain(5, 3, 0.2);
    CHECK(expand_product(submatrix_product_form(P, {}, {})) == expand_product(P));
    for (int t = 0; t < 200; ++t) {
        const auto C = r.chain(6, 3, 0.2);
        const auto a = random_subset(r, C.rows()), b = random_subset(r, C.cols());
        CHECK(expand_product(submatrix_product_form(C, a, b)) == strike(expand_product(C), a, b));
    }
    BidiagonalProduct<Q> T;
    T.factors.push_back(r.factor(3, 4, 0.0));
    const auto S = submatrix_product_form(T, {2}, {});
    REQUIRE(S.factors.front().orientation == Orientation::upper);
    CHECK(S.factors.front().pairs.front().i == 2);
    CHECK(S.factors.front().pairs.front().bar == 0);
    CHECK(S.factors.front().pairs.front().off == 1);
    CHECK(expand_product(S) == strike(expand_product(T), {2}, {}));
}

TEST_CASE("chain_dense agrees with explicit multiplication") {
    RandQ r(72);
    for (int t = 0; t < 100; ++t) {
        const auto P = r.chain(6, 4, 0.2);
        CHECK(chain_dense(P) == expand_product(P));
    }
}

TEST_CASE("seeded example chain is deterministic") {
    const auto a = make_example4(3), b = make_example4(3);
    REQUIRE(a.chain.factors.size() == b.chain.factors.size());
    bool same = true;
    for (std::size_t k = 0; k < a.chain.factors.size(); ++k)
        for (std::size_t p = 0; p < a.chain.factors[k].pairs.size(); ++p)
            same = same && a.chain.factors[k].pairs[p].off == b.chain.factors[k].pairs[p].off &&
                   a.chain.factors[k].pairs[p].bar == b.chain.factors[k].pairs[p].bar;
    CHECK(same);
    CHECK(a.rows() == 90);
    CHECK(a.cols() == 50);
    CHECK_THROWS_AS(make_example("example9"), generation_error);
}
