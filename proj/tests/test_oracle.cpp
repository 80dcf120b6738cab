#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "tnsvd/oracle.hpp"

using namespace tnsvd;
using namespace tnsvd::test;

TEST_CASE("dense_product_exact") {
    BidiagonalProduct<Q> P;
    BidiagonalFactor<Q> I;
    I.rows = I.cols = 3;
    P.factors.push_back(I);
    CHECK(dense_product_exact(P) == RationalMatrix::identity(3));

    BidiagonalFactor<Q> L, U;
    L.orientation = Orientation::lower;
    L.rows = L.cols = 2;
    L.pairs = {{1, Q(2), Q(3)}};
    U.orientation = Orientation::upper;
    U.rows = U.cols = 2;
    U.pairs = {{1, Q(1), Q(5)}, {2, Q(7), Q(0)}};
    BidiagonalProduct<Q> LU;
    LU.factors = {L, U};
    // [[2,0],[3,1]] [[1,5],[0,7]]
    const auto A = dense_product_exact(LU);
    CHECK(A(0, 0) == 2);
    CHECK(A(0, 1) == 10);
    CHECK(A(1, 0) == 3);
    CHECK(A(1, 1) == 22);
}

TEST_CASE("triple product in either association") {
    RandQ r(91);
    Repr<Q> R(9, 5);
    for (int i = 1; i <= 9; ++i)
        for (int j = 1; j <= 5; ++j) {
            R.off(i, j) = r.value(0.1);
            if (i != j) R.bar(i, j) = r.bar(0.3);
        }
    const auto c = repr_to_product(R);
    const auto A = expand_dense(R);
    CHECK(dense_product_exact(concat<Q>({c, c.transposed(), c})) == A * (A.transposed() * A));
}

TEST_CASE("ranks") {
    CHECK(rank_exact(RationalMatrix::identity(5)) == 5);
    RationalMatrix D(4, 3);
    for (int j = 0; j < 3; ++j) {
        D(0, j) = D(1, j) = Q(j + 1);
        D(2, j) = D(3, j) = Q(1, j + 2);
    }
    CHECK(rank_exact(D) == 2);
    CHECK(rank_modular(D) == 2);
    RandQ r(92);
    for (int t = 0; t < 200; ++t) {
        const auto P = r.chain(6, 4, 0.4);
        const auto A = expand_product(P);
        CHECK(rank_modular(A) == rank_exact(A));
    }
}

TEST_CASE("reference singular values") {
    SUBCASE("diagonal") {
        RationalMatrix A(3, 3);
        A(0, 0) = Q(1, 3);
        A(1, 1) = Q(7);
        A(2, 2) = Q(2, 5);
        const auto s = oracle_svd(A);
        REQUIRE(s.rank == 3);
        CHECK(relative_error(7.0, s.decimal[0]) == 0);
        CHECK(relative_error(0.4, s.decimal[1]) <= 1e-16);
        CHECK(relative_error(1.0 / 3, s.decimal[2]) <= 1e-16);
    }
    SUBCASE("2x2 all ones bidiagonal") {
        RationalMatrix A(2, 2);
        A(0, 0) = A(0, 1) = A(1, 1) = 1;
        const auto s = oracle_svd(A);
        // golden ratio and its inverse to 40 digits
        CHECK(s.decimal[0].rfind("1.618033988749894848204586834365638117720", 0) == 0);
        CHECK(s.decimal[1].rfind("6.180339887498948482045868343656381177203", 0) == 0);
        CHECK(s.confirm_bits == 2 * s.precision_bits);
    }
    SUBCASE("wide dynamic range") {
        RationalMatrix A(2, 2);
        mpz_class big;
        mpz_ui_pow_ui(big.get_mpz_t(), 10, 300);
        A(0, 0) = Q(big);
        A(1, 1) = Q(mpz_class(1), big);
        A(0, 1) = 1;
        const auto s = oracle_svd(A);
        REQUIRE(s.rank == 2);
        CHECK(relative_error(1e300, s.decimal[0]) <= 1e-15);
        CHECK(relative_error(1e-300, s.decimal[1]) <= 1e-15);
    }
}

TEST_CASE("oracle cache") {
    const auto dir = std::filesystem::temp_directory_path() / "tnsvd-oracle-cache-test";
    std::filesystem::remove_all(dir);
    setenv("TNSVD_ORACLE_CACHE", dir.c_str(), 1);
    int built = 0;
    RationalMatrix A(2, 2);
    A(0, 0) = 3;
    A(1, 1) = 4;
    A(0, 1) = 1;
    auto make = [&] {
        ++built;
        return A;
    };
    const auto a = cached_oracle("unit-test", make);
    const auto b = cached_oracle("unit-test", make);
    CHECK(built == 1);
    CHECK(a.decimal == b.decimal);
    unsetenv("TNSVD_ORACLE_CACHE");
    std::filesystem::remove_all(dir);
}
