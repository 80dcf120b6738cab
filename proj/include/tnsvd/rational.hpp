#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <stdexcept>
#include <string>

#include "tnsvd/scalar.hpp"

namespace tnsvd {

using Rational = mpq_class;

// mpq_get_d truncates; generated parameters must be rounded to nearest once
inline double round_to_double(const Rational& q) {
    mpfr_t x;
    mpfr_init2(x, 53);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return d;
}

template <>
struct ScalarConvert<double, Rational> {
    static double apply(const Rational& x) { return round_to_double(x); }
};

template <>
struct ScalarConvert<long double, Rational> {
    static long double apply(const Rational& x) {
        mpfr_t t;
        mpfr_init2(t, 64);
        mpfr_set_q(t, x.get_mpq_t(), MPFR_RNDN);
        const long double d = mpfr_get_ld(t, MPFR_RNDN);
        mpfr_clear(t);
        return d;
    }
};

// rounded once to 53 bits, exponent unrestricted
template <>
struct ScalarConvert<XFloat, Rational> {
    static XFloat apply(const Rational& x) {
        mpfr_t t;
        mpfr_init2(t, 53);
        mpfr_set_q(t, x.get_mpq_t(), MPFR_RNDN);
        long e = 0;
        const double m = mpfr_get_d_2exp(&e, t, MPFR_RNDN);
        mpfr_clear(t);
        return XFloat::make(m, e);
    }
};

template <>
struct ScalarConvert<Rational, XFloat> {
    static Rational apply(const XFloat& x) {
        Rational q(x.m);
        if (x.e > 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), mp_bitcnt_t(x.e));
        else if (x.e < 0) mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), mp_bitcnt_t(-x.e));
        return q;
    }
};

// mpq_class(num, den) does not reduce by itself
inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& x) { return round_to_double(x); }

// "p/q", integers, or decimals such as "1.25e-3", all read exactly
inline Rational parse_rational(const std::string& text) {
    auto bad = [&]() { return std::invalid_argument("not a rational number: '" + text + "'"); };
    if (text.empty()) throw bad();
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        mpz_class num, den;
        if (num.set_str(text.substr(0, slash), 10) != 0 || den.set_str(text.substr(slash + 1), 10) != 0) throw bad();
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    std::string mant = text;
    long exp10 = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
        mant = text.substr(0, e);
        try {
            std::size_t pos = 0;
            exp10 = std::stol(text.substr(e + 1), &pos);
            if (pos != text.size() - e - 1) throw bad();
        } catch (const std::logic_error&) {
            throw bad();
        }
    }
    std::string digits = mant;
    if (const auto dot = mant.find('.'); dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exp10 -= long(mant.size() - dot - 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    if (digits[0] == '+') digits.erase(0, 1);
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw bad();
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational q = exp10 < 0 ? Rational(num, p10) : Rational(num * p10);
    q.canonicalize();
    return q;
}

// exact value of a finite double
inline Rational exact_rational(double d) {
    Rational q(d);
    return q;
}

}  // namespace tnsvd
