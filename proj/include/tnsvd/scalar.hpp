#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace tnsvd {

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation counts gathered by Tracked. "cancellations" counts every add or
// subtract whose operands have opposite effective signs, i.e. a genuine
// subtraction of same-signed quantities.
struct OpCounts {
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    std::uint64_t divs = 0;
    std::uint64_t sqrts = 0;
    std::uint64_t cancellations = 0;
    std::uint64_t negatives = 0;  // results < 0
};

inline OpCounts& op_counts() {
    static thread_local OpCounts c;
    return c;
}
inline void reset_op_counts() { op_counts() = OpCounts{}; }

// Binary64 significand with a 64-bit exponent. Every operation rounds
// exactly as a double would, but intermediate parameters far outside
// [2^-1074, 2^1024) neither underflow nor overflow.
struct XFloat {
    double m = 0.0;      // 0 or |m| in [1/2, 1)
    std::int64_t e = 0;  // value = m * 2^e

    XFloat() = default;
    XFloat(double x) { *this = make(x, 0); }
    XFloat(int x) : XFloat(double(x)) {}

    static XFloat make(double mant, std::int64_t ex) {
        XFloat r;
        if (mant == 0 || !std::isfinite(mant)) {
            r.m = mant;
            return r;
        }
        int k;
        r.m = std::frexp(mant, &k);
        r.e = ex + k;
        return r;
    }

    friend XFloat operator*(XFloat a, XFloat b) { return make(a.m * b.m, a.e + b.e); }
    friend XFloat operator/(XFloat a, XFloat b) { return make(a.m / b.m, a.e - b.e); }
    friend XFloat operator+(XFloat a, XFloat b) {
        if (b.m == 0) return a;
        if (a.m == 0) return b;
        if (a.e < b.e) std::swap(a, b);
        // beyond 1100 bits the smaller operand cannot affect rounding
        const std::int64_t d = a.e - b.e;
        if (d > 1100) return a;
        return make(a.m + std::ldexp(b.m, -int(d)), a.e);
    }
    friend XFloat operator-(XFloat a, XFloat b) { return a + (-b); }
    XFloat operator-() const {
        XFloat r = *this;
        r.m = -r.m;
        return r;
    }
    XFloat& operator+=(XFloat b) { return *this = *this + b; }
    XFloat& operator-=(XFloat b) { return *this = *this - b; }
    XFloat& operator*=(XFloat b) { return *this = *this * b; }
    XFloat& operator/=(XFloat b) { return *this = *this / b; }

    friend int compare(const XFloat& a, const XFloat& b) {
        const int sa = (a.m > 0) - (a.m < 0), sb = (b.m > 0) - (b.m < 0);
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        if (a.e != b.e) return (a.e < b.e) == (sa > 0) ? -1 : 1;
        return (a.m > b.m) - (a.m < b.m);
    }
    friend bool operator==(const XFloat& a, const XFloat& b) { return a.m == b.m && (a.m == 0 || a.e == b.e); }
    friend bool operator!=(const XFloat& a, const XFloat& b) { return !(a == b); }
    friend bool operator<(const XFloat& a, const XFloat& b) { return compare(a, b) < 0; }
    friend bool operator>(const XFloat& a, const XFloat& b) { return compare(a, b) > 0; }
    friend bool operator<=(const XFloat& a, const XFloat& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const XFloat& a, const XFloat& b) { return compare(a, b) >= 0; }
};

inline XFloat sqrt(XFloat a) {
    if (a.m <= 0) return XFloat(std::sqrt(a.m));
    double m = a.m;
    std::int64_t e = a.e;
    if (e & 1) {
        m *= 2;
        --e;
    }
    return XFloat::make(std::sqrt(m), e / 2);
}
inline XFloat abs(XFloat a) {
    a.m = std::fabs(a.m);
    return a;
}

inline double to_double(double x) { return x; }
// rounds once; out-of-range values go to 0 or infinity
inline double to_double(const XFloat& x) {
    if (x.e > 1100) return x.m > 0 ? HUGE_VAL : -HUGE_VAL;
    if (x.e < -1100) return 0.0 * x.m;
    return std::ldexp(x.m, int(x.e));
}

// Base-type arithmetic with instrumentation, used to prove subtraction-freeness.
template <class B>
struct BasicTracked {
    B v = B(0);
    BasicTracked() = default;
    BasicTracked(B x) : v(x) {}
    BasicTracked(int x) : v(B(x)) {}

    friend BasicTracked operator+(BasicTracked a, BasicTracked b) {
        auto& c = op_counts();
        ++c.adds;
        if ((a.v > B(0) && b.v < B(0)) || (a.v < B(0) && b.v > B(0))) ++c.cancellations;
        return note(a.v + b.v);
    }
    friend BasicTracked operator-(BasicTracked a, BasicTracked b) {
        auto& c = op_counts();
        ++c.adds;
        if ((a.v > B(0) && b.v > B(0)) || (a.v < B(0) && b.v < B(0))) ++c.cancellations;
        return note(a.v - b.v);
    }
    friend BasicTracked operator*(BasicTracked a, BasicTracked b) {
        ++op_counts().muls;
        return note(a.v * b.v);
    }
    friend BasicTracked operator/(BasicTracked a, BasicTracked b) {
        ++op_counts().divs;
        return note(a.v / b.v);
    }
    BasicTracked operator-() const { return note(-v); }
    BasicTracked& operator+=(BasicTracked b) { return *this = *this + b; }
    BasicTracked& operator-=(BasicTracked b) { return *this = *this - b; }
    BasicTracked& operator*=(BasicTracked b) { return *this = *this * b; }
    BasicTracked& operator/=(BasicTracked b) { return *this = *this / b; }

    friend bool operator==(BasicTracked a, BasicTracked b) { return a.v == b.v; }
    friend bool operator!=(BasicTracked a, BasicTracked b) { return a.v != b.v; }
    friend bool operator<(BasicTracked a, BasicTracked b) { return a.v < b.v; }
    friend bool operator>(BasicTracked a, BasicTracked b) { return a.v > b.v; }
    friend bool operator<=(BasicTracked a, BasicTracked b) { return a.v <= b.v; }
    friend bool operator>=(BasicTracked a, BasicTracked b) { return a.v >= b.v; }

private:
    static BasicTracked note(B r) {
        if (r < B(0)) ++op_counts().negatives;
        return BasicTracked(r);
    }
};

template <class B>
BasicTracked<B> sqrt(BasicTracked<B> a) {
    using std::sqrt;
    ++op_counts().sqrts;
    return BasicTracked<B>(sqrt(a.v));
}
template <class B>
BasicTracked<B> abs(BasicTracked<B> a) {
    using std::abs;
    return BasicTracked<B>(abs(a.v));
}
template <class B>
double to_double(const BasicTracked<B>& x) {
    return to_double(x.v);
}

using Tracked = BasicTracked<double>;
using TrackedX = BasicTracked<XFloat>;

// hypot without the subtractions std::hypot may perform internally
template <class T>
T hypot_sf(const T& a, const T& b) {
    using std::sqrt;
    if (a == T(0)) return b;
    if (b == T(0)) return a;
    if (b < a) {
        T q = b / a;
        return a * sqrt(T(1) + q * q);
    }
    T q = a / b;
    return b * sqrt(T(1) + q * q);
}

// specialized for exact types (see rational.hpp)
template <class To, class From>
struct ScalarConvert {
    static To apply(const From& x) { return static_cast<To>(x); }
};
template <class From>
struct ScalarConvert<XFloat, From> {
    static XFloat apply(const From& x) { return XFloat(ScalarConvert<double, From>::apply(x)); }
};
template <>
struct ScalarConvert<XFloat, XFloat> {
    static XFloat apply(const XFloat& x) { return x; }
};
template <>
struct ScalarConvert<double, XFloat> {
    static double apply(const XFloat& x) { return to_double(x); }
};
template <class B, class From>
struct ScalarConvert<BasicTracked<B>, From> {
    static BasicTracked<B> apply(const From& x) { return BasicTracked<B>(ScalarConvert<B, From>::apply(x)); }
};
template <class B>
struct ScalarConvert<BasicTracked<B>, BasicTracked<B>> {
    static BasicTracked<B> apply(const BasicTracked<B>& x) { return x; }
};
template <class To, class From>
To scalar_cast(const From& x) {
    return ScalarConvert<To, From>::apply(x);
}

inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0; }
inline bool finite_nonneg(const XFloat& x) { return finite_nonneg(x.m); }
template <class B>
bool finite_nonneg(const BasicTracked<B>& x) {
    return finite_nonneg(x.v);
}
template <class T>
bool finite_nonneg(const T& x) {
    return x >= 0;
}

// x = scaled_wide(x, s) * 2^s, for moving values into long double without
// passing through the double range. exponent_of is frexp's exponent (0 for 0).
inline std::int64_t exponent_of(double x) {
    int k = 0;
    if (x != 0) std::frexp(x, &k);
    return k;
}
inline std::int64_t exponent_of(const XFloat& x) { return x.m == 0 ? 0 : x.e; }
template <class B>
std::int64_t exponent_of(const BasicTracked<B>& x) {
    return exponent_of(x.v);
}
inline long double scaled_wide(double x, std::int64_t s) { return std::ldexp((long double)x, int(-s)); }
inline long double scaled_wide(const XFloat& x, std::int64_t s) {
    const std::int64_t k = x.e - s;
    if (x.m == 0 || k < -20000) return 0.0L * x.m;
    if (k > 20000) return x.m > 0 ? HUGE_VALL : -HUGE_VALL;
    return std::ldexp((long double)x.m, int(k));
}
template <class B>
long double scaled_wide(const BasicTracked<B>& x, std::int64_t s) {
    return scaled_wide(x.v, s);
}

}  // namespace tnsvd
