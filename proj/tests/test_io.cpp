#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tnsvd/io.hpp"

using namespace tnsvd;
using namespace tnsvd::test;

TEST_CASE("hex numbers round-trip bit for bit") {
    std::mt19937_64 r(81);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 5000; ++t) {
        const XFloat x = XFloat::make(u(r), std::int64_t(r() % 20000) - 10000);
        const XFloat y = parse_number(format_hex(x));
        CHECK(y.m == x.m);
        CHECK(y.e == x.e);
    }
    CHECK(format_hex(XFloat(1.0)) == "0x1p+0");
    CHECK(format_hex(XFloat::make(0.75, -1200)) == "0x1.8p-1201");
    CHECK(to_double(parse_number("0.1")) == 0.1);
    CHECK(to_double(parse_number("0x1p-2")) == 0.25);
    CHECK_THROWS_AS(parse_number("abc"), parse_error);
    CHECK_THROWS_AS(parse_number("1.0x"), parse_error);
}

TEST_CASE("BDP round trip and determinism") {
    RandQ r(82);
    for (int t = 0; t < 50; ++t) {
        auto P = r.chain(6, 4, 0.2).cast<XFloat>();
        P.factors.front().pairs.front().bar = XFloat::make(0.6, -3000);
        const auto text = to_bdp(P, "test chain");
        const auto back = bdp_from_string(text);
        CHECK(back.gen == "test chain");
        CHECK(to_bdp(back.chain, back.gen) == text);
        REQUIRE(back.chain.factors.size() == P.factors.size());
        for (std::size_t k = 0; k < P.factors.size(); ++k) {
            const auto &a = P.factors[k], &b = back.chain.factors[k];
            CHECK(a.orientation == b.orientation);
            CHECK(a.rows == b.rows);
            CHECK(a.cols == b.cols);
        }
    }
}

TEST_CASE("BDR round trip and default cells") {
    RandQ r(83);
    for (int t = 0; t < 50; ++t) {
        const auto R = r.repr(r.below(6) + 1, r.below(6) + 1).cast<XFloat>();
        const auto text = to_bdr(R);
        CHECK(bdr_from_string(text) == R);
        CHECK(to_bdr(bdr_from_string(text)) == text);
    }
    const auto I = bdr_from_string("bdr 1 2 3\ncell 1 1 0x1p+0 0x1p+0\ncell 2 2 1 1\n");
    CHECK(I == Repr<XFloat>::identity(2, 3));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(bdp_from_string("bdp 2\n"), parse_error);
    CHECK_THROWS_AS(bdp_from_string("bdp 1\nfactor 1 sideways 2 2\n"), parse_error);
    CHECK_THROWS_AS(bdp_from_string("bdp 1\nfactor 1 lower 2 2\npair 1 -1 0\n"), std::exception);
    CHECK_THROWS_AS(bdp_from_string("bdp 1\nfactor 1 lower 2 2\nfactor 2 lower 3 3\n"), std::exception);
    CHECK_THROWS_AS(bdr_from_string("bdr 1 2 2\ncell 3 1 1 0\n"), parse_error);
    CHECK_THROWS_AS(bdr_from_string("bdr 1 2 2\ncell 1 2 1 nan\n"), std::exception);
    CHECK_THROWS_AS(bdp_from_string("bdp 1\nfactor 1 lower 2 2\npair 1 -1 0\n"), domain_error);
}
