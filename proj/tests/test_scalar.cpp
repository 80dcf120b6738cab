#include <cmath>
#include <random>

#include "doctest.h"
#include "tnsvd/rational.hpp"
#include "tnsvd/scalar.hpp"

using namespace tnsvd;

TEST_CASE("XFloat rounds like binary64 inside the double range") {
    std::mt19937_64 r(61);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> ex(-300, 300);
    long bad = 0;
    for (int t = 0; t < 200000; ++t) {
        const double a = std::ldexp(u(r), ex(r));
        double b = std::ldexp(u(r), ex(r));
        if (t % 7 == 0) b = -a * (1 + 1e-15 * u(r));
        if (t % 11 == 0) b = a;
        const XFloat A(a), B(b);
        const double want[5] = {a + b, a - b, a * b, a / b, std::sqrt(std::fabs(a))};
        const XFloat got[5] = {A + B, A - B, A * B, A / B, sqrt(abs(A))};
        for (int k = 0; k < 5; ++k)
            if (!(to_double(got[k]) == want[k])) ++bad;
        if ((A < B) != (a < b) || (A == B) != (a == b)) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("XFloat keeps values beyond the double exponent range") {
    XFloat x = XFloat(0.75);
    for (int k = 0; k < 40; ++k) x = x * XFloat(std::ldexp(1.0, -100));
    CHECK(x.m == 0.75);
    CHECK(x.e == -4000);
    CHECK(to_double(x) == 0.0);
    XFloat y = x / x;
    CHECK(to_double(y) == 1.0);
    CHECK(x > XFloat(0));
    CHECK(x + x == x * XFloat(2));
    // exact round trip through a rational
    const Rational q = scalar_cast<Rational>(x);
    CHECK(scalar_cast<XFloat>(q) == x);
}

TEST_CASE("Tracked counts genuine subtractions") {
    reset_op_counts();
    Tracked a(2.0), b(3.0);
    auto c = a + b;
    c = c * a / b;
    CHECK(op_counts().cancellations == 0);
    c = a - b;
    CHECK(op_counts().cancellations == 1);
    c = a + Tracked(-1.0);
    CHECK(op_counts().cancellations == 2);
    CHECK(op_counts().negatives == 1);
    TrackedX x(XFloat(2.0));
    x = x + x;
    CHECK(to_double(x) == 4.0);
}

TEST_CASE("parse_rational") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational("1.5e-3") == Rational(3, 2000));
    CHECK(parse_rational("2E2") == Rational(200));
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1e"), std::invalid_argument);
}
