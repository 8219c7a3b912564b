#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <polyhom/errors.hpp>

namespace polyhom {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parse "p" or "p/q" with optional leading sign. No whitespace.
inline Rational parse_rational(std::string_view s) {
    if (s.empty())
        throw ConfigError("empty rational literal");
    const auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos)
            return Rational(BigInt(std::string(s)));
        BigInt p{std::string(s.substr(0, slash))};
        BigInt q{std::string(s.substr(slash + 1))};
        if (q == 0)
            throw ConfigError("zero denominator in rational literal: " + std::string(s));
        return Rational(p, q);
    } catch (const std::runtime_error&) {
        throw ConfigError("bad rational literal: " + std::string(s));
    }
}

/// Canonical "p/q" form (denominator always present, always positive).
inline std::string rational_to_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) {
    return q.template convert_to<double>();
}

inline double log_abs(const BigInt& v) {
    using boost::multiprecision::msb;
    if (v == 0)
        return -std::numeric_limits<double>::infinity();
    const BigInt a = abs(v);
    const auto bits = msb(a); // index of the highest set bit
    if (bits <= 900)
        return std::log(a.template convert_to<double>());
    const BigInt top = a >> (bits - 64);
    return std::log(top.template convert_to<double>()) +
           static_cast<double>(bits - 64) * std::log(2.0);
}

/// log |q|, robust for numerators/denominators far beyond double range.
inline double log_abs(const Rational& q) {
    if (q == 0)
        return -std::numeric_limits<double>::infinity();
    return log_abs(numerator(q)) - log_abs(denominator(q));
}

/// Exact binary expansion of a finite double.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x))
        throw ConfigError("cannot convert non-finite double to rational");
    if (x == 0.0)
        return Rational(0);
    int exp = 0;
    const double m = std::frexp(x, &exp); // x = m * 2^exp, |m| in [0.5, 1)
    const auto mi = static_cast<std::int64_t>(std::ldexp(m, 53));
    Rational r(mi);
    const int shift = exp - 53;
    if (shift >= 0)
        r *= Rational(BigInt(1) << shift);
    else
        r /= Rational(BigInt(1) << (-shift));
    return r;
}

inline BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i)
        f *= i;
    return f;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n)
        return 0;
    BigInt b = 1;
    for (unsigned i = 0; i < k; ++i) {
        b *= n - i;
        b /= i + 1;
    }
    return b;
}

} // namespace polyhom
