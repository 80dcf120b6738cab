#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "tnsvd/passthrough.hpp"

using namespace tnsvd;
using namespace tnsvd::test;

namespace {

std::vector<Q> qv(std::initializer_list<int> xs) {
    std::vector<Q> v{Q(0)};
    for (int x : xs) v.push_back(Q(x));
    v.push_back(Q(0));
    return v;
}

}  // namespace

TEST_CASE("pt1 worked 2x2 case") {
    auto yb = qv({1, 1}), y = qv({1, 0}), xb = qv({1, 1}), x = qv({1, 0});
    pass_upper_through_lower(yb, y, xb, x, 2);
    CHECK(xb[1] == 1);
    CHECK(xb[2] == 1);
    CHECK(x[1] == Q(1, 2));
    CHECK(yb[1] == 2);
    CHECK(y[1] == 1);
    CHECK(yb[2] == Q(1, 2));
}

TEST_CASE("pt1 identity upper factor leaves the lower factor") {
    auto yb = qv({1, 1, 1}), y = qv({0, 0, 0}), xb = qv({2, 3, 5}), x = qv({7, 11, 0});
    const auto xb0 = xb, x0 = x;
    pass_upper_through_lower(yb, y, xb, x, 3);
    const auto L = lower_dense(xb, x, 3), U = upper_dense(yb, y, 3);
    CHECK(L * U == lower_dense(xb0, x0, 3));
}

TEST_CASE("pt1 all branches satisfy the product identity") {
    RandQ r(21);
    branch_counts() = {};
    for (int t = 0; t < 3000; ++t) {
        const int n = r.below(5) + 1;
        std::vector<Q> yb(n + 2, Q(1)), y(n + 2, Q(0)), xb(n + 2, Q(1)), x(n + 2, Q(0));
        for (int i = 1; i <= n; ++i) {
            yb[i] = r.value(0.35);
            xb[i] = r.value(0.35);
            if (i < n) {
                y[i] = r.value(0.35);
                x[i] = r.value(0.35);
            }
        }
        const auto before = upper_dense(yb, y, n) * lower_dense(xb, x, n);
        pass_upper_through_lower(yb, y, xb, x, n);
        CHECK(lower_dense(xb, x, n) * upper_dense(yb, y, n) == before);
        for (int i = 1; i <= n; ++i) CHECK((xb[i] >= 0 && yb[i] >= 0 && x[i] >= 0 && y[i] >= 0));
    }
    for (auto c : branch_counts().pt1) CHECK(c >= 100);
}

TEST_CASE("pt2 examples") {
    std::vector<Q> tb, t;
    SUBCASE("identity") {
        auto d = qv({3, 5});
        pass_upper_through_diag(qv({1, 1}), qv({0, 0}), d, 2, 2, tb, t);
        CHECK(d[1] == 3);
        CHECK(d[2] == 5);
        CHECK(t[1] == 0);
    }
    SUBCASE("generic") {
        auto d = qv({3, 5});
        pass_upper_through_diag(qv({1, 1}), qv({1, 0}), d, 2, 2, tb, t);
        CHECK(d[1] == 3);
        CHECK(d[2] == 5);
        CHECK(tb[1] == 1);
        CHECK(t[1] == Q(5, 3));
    }
    SUBCASE("zero diagonal") {
        auto d = qv({0, 5});
        pass_upper_through_diag(qv({1, 1}), qv({1, 0}), d, 2, 2, tb, t);
        CHECK(d[1] == 1);
        CHECK(tb[1] == 0);
        CHECK(t[1] == 5);
        Dense<Q> D(2, 2);
        D(0, 0) = d[1];
        D(1, 1) = d[2];
        Dense<Q> want(2, 2);
        want(0, 1) = 5;
        want(1, 1) = 5;
        CHECK(D * upper_dense(tb, t, 2) == want);
    }
}

TEST_CASE("pt2 rectangular fuzz") {
    RandQ r(22);
    branch_counts() = {};
    for (int k = 0; k < 2000; ++k) {
        const int n = r.below(5) + 1, m = r.below(5) + 1, p = std::min(n, m);
        std::vector<Q> yb(n + 2, Q(1)), y(n + 2, Q(0)), d(p + 2, Q(0)), tb, t;
        for (int i = 1; i <= n; ++i) {
            yb[i] = r.value(0.3);
            if (i < n) y[i] = r.value(0.3);
        }
        for (int i = 1; i <= p; ++i) d[i] = r.value(0.3);
        Dense<Q> D(n, m);
        for (int i = 0; i < p; ++i) D(i, i) = d[i + 1];
        const auto before = upper_dense(yb, y, n) * D;
        pass_upper_through_diag(yb, y, d, n, m, tb, t);
        Dense<Q> D2(n, m);
        for (int i = 0; i < p; ++i) D2(i, i) = d[i + 1];
        CHECK(D2 * upper_dense(tb, t, m) == before);
        for (int i = p + 1; i <= m; ++i) {
            CHECK(tb[i] == 1);
            CHECK(t[i] == 0);
        }
    }
    for (auto c : branch_counts().pt2) CHECK(c >= 100);
}

namespace {

// U(yb,y) U'(xb,x) against U'(xb2,x2) U(yb2,y2)
bool pt3_holds(const std::vector<Q>& yb, const std::vector<Q>& y, const std::vector<Q>& xb,
               const std::vector<Q>& x, int N, int lo) {
    std::vector<Q> xb2, x2, yb2, y2;
    pass_upper_through_upper(yb, y, xb, x, N, lo, false, xb2, x2, yb2, y2);
    if (yb2[lo] != 1 || y2[lo] != 0) return false;
    return upper_dense(xb2, x2, N) * upper_dense(yb2, y2, N) == upper_dense(yb, y, N) * upper_dense(xb, x, N);
}

}  // namespace

TEST_CASE("pt3 examples") {
    CHECK(pt3_holds(qv({1, 1}), qv({0, 0}), qv({2, 3}), qv({5, 0}), 2, 1));
    CHECK(pt3_holds(qv({1, 1}), qv({1, 0}), qv({1, 1}), qv({1, 0}), 2, 1));
    // w = 0 with y != 0: the next left bar is zero
    branch_counts() = {};
    CHECK(pt3_holds(qv({1, 1}), qv({1, 0}), qv({1, 0}), qv({0, 0}), 2, 1));
    CHECK(branch_counts().pt3[1] == 1);
}

TEST_CASE("pt3 all branches satisfy the product identity") {
    RandQ r(23);
    branch_counts() = {};
    for (int t = 0; t < 3000; ++t) {
        const int n = r.below(5) + 1, lo = r.below(n) + 1;
        std::vector<Q> yb(n + 2, Q(1)), y(n + 2, Q(0)), xb(n + 2, Q(1)), x(n + 2, Q(0));
        for (int i = 1; i <= n; ++i) {
            if (i >= lo) yb[i] = r.value(0.35);
            xb[i] = r.value(0.35);
            if (i < n) {
                if (i >= lo) y[i] = r.value(0.35);
                x[i] = r.value(0.35);
            }
        }
        CHECK(pt3_holds(yb, y, xb, x, n, lo));
    }
    for (auto c : branch_counts().pt3) CHECK(c >= 100);
}

TEST_CASE("Givens factorization of a lower bidiagonal") {
    SUBCASE("identity") {
        std::vector<double> xb(4, 1.0), x(4, 0.0);
        const auto g = lower_inverse_to_orthogonal(xb, x, 2, 1);
        CHECK(g.c[2] == 1.0);
        CHECK(g.s[2] == 0.0);
        CHECK(g.yb[1] == 1.0);
        CHECK(g.yb[2] == 1.0);
    }
    SUBCASE("2x2") {
        std::vector<double> xb{0, 1, 1, 1}, x{0, 1, 0, 0};
        const auto g = lower_inverse_to_orthogonal(xb, x, 2, 1);
        const double h = 1 / std::sqrt(2.0);
        CHECK(g.yb[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(g.c[2] == doctest::Approx(h).epsilon(1e-15));
        CHECK(g.s[2] == doctest::Approx(h).epsilon(1e-15));
        CHECK(g.y[1] == doctest::Approx(h).epsilon(1e-15));
        CHECK(g.yb[1] == doctest::Approx(h).epsilon(1e-15));
    }
    SUBCASE("random 5x5 residual") {
        std::mt19937 rng(24);
        std::uniform_real_distribution<> u(0, 2);
        const int n = 5;
        const double eps = std::ldexp(1.0, -52);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> xb(n + 2, 1.0), x(n + 2, 0.0);
            for (int i = 1; i <= n; ++i) {
                xb[i] = u(rng);
                if (i < n) x[i] = u(rng);
            }
            const auto g = lower_inverse_to_orthogonal(xb, x, n, 1);
            Dense<double> L(n, n), G = Dense<double>::identity(n), U(n, n);
            for (int i = 0; i < n; ++i) {
                L(i, i) = xb[i + 1];
                if (i + 1 < n) L(i + 1, i) = -x[i + 1];
                U(i, i) = g.yb[i + 1];
                if (i + 1 < n) U(i, i + 1) = -g.y[i + 1];
            }
            for (int i = n; i >= 2; --i) {
                Dense<double> Gi = Dense<double>::identity(n);
                Gi(i - 2, i - 2) = g.c[i];
                Gi(i - 2, i - 1) = -g.s[i];
                Gi(i - 1, i - 2) = g.s[i];
                Gi(i - 1, i - 1) = g.c[i];
                G = G * Gi;
            }
            const auto LG = L * G;
            double res = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) res = std::max(res, std::abs(LG(i, j) - U(i, j)));
            CHECK(res / max_abs(L) <= 10 * n * eps);
            CHECK(orthogonality_defect(G) <= 4 * n * eps);
        }
    }
}

TEST_CASE("apply_factor") {
    RandQ r(25);
    SUBCASE("identity factor") {
        const auto R = r.repr(3, 4);
        BidiagonalFactor<Q> F;
        F.rows = F.cols = 3;
        CHECK(apply_factor(R, F, Side::left) == R);
    }
    SUBCASE("duplication of a row") {
        Repr<Q> R(2, 2);
        R.off(1, 1) = 1;
        R.off(1, 2) = Q(3, 7);
        R.off(2, 2) = 0;
        BidiagonalFactor<Q> E;
        E.orientation = Orientation::lower;
        E.rows = E.cols = 2;
        E.pairs.push_back({1, Q(1), Q(1)});
        const auto A = expand_dense(apply_factor(R, E, Side::left));
        CHECK(A(0, 0) == 1);
        CHECK(A(1, 0) == 1);
        CHECK(A(0, 1) == Q(3, 7));
        CHECK(A(1, 1) == Q(3, 7));
    }
    SUBCASE("random factors on both sides") {
        for (int t = 0; t < 400; ++t) {
            const int n = r.below(5) + 1, m = r.below(5) + 1;
            const auto R = r.repr(n, m);
            const auto A = expand_dense(R);
            const bool left = r.below(2);
            auto F = r.factor(left ? n : m, left ? n : m, 0.3);
            const auto out = expand_dense(apply_factor(R, F, left ? Side::left : Side::right));
            CHECK(out == (left ? F.dense() * A : A * F.dense()));
        }
    }
    SUBCASE("errors") {
        const auto R = r.repr(3, 3);
        BidiagonalFactor<Q> F;
        F.rows = F.cols = 4;
        CHECK_THROWS_AS(apply_factor(R, F, Side::left), dimension_error);
        F.rows = F.cols = 3;
        F.pairs.push_back({1, Q(-1), Q(0)});
        CHECK_THROWS_AS(apply_factor(R, F, Side::left), domain_error);
    }
}
