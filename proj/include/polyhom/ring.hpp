#pragma once

#include <cmath>
#include <concepts>
#include <type_traits>

#include <polyhom/rational.hpp>

namespace polyhom {

// Coefficient rings are a compile-time choice: the expansion recursion runs
// over exact rationals, diagnostics over doubles, the counterexample over
// bivariate polynomials. Mixing rings is a type error rather than a runtime
// one.
template <typename R>
struct ring_traits;

template <>
struct ring_traits<Rational> {
    static constexpr bool exact             = true;
    static constexpr bool has_log_constants = false;

    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_long(long v) { return Rational(v); }
    static Rational from_rational(const Rational& q) { return q; }
    static bool is_zero(const Rational& v) { return v == 0; }
    static double to_double(const Rational& v) { return polyhom::to_double(v); }
    static double log_abs(const Rational& v) { return polyhom::log_abs(v); }
};

template <>
struct ring_traits<double> {
    static constexpr bool exact             = false;
    static constexpr bool has_log_constants = true;

    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_long(long v) { return static_cast<double>(v); }
    static double from_rational(const Rational& q) { return polyhom::to_double(q); }
    static bool is_zero(double v) { return v == 0.0; }
    static double to_double(double v) { return v; }
    static double log_abs(double v) { return std::log(std::abs(v)); }
    static double log_two() { return std::log(2.0); }
};

template <typename R>
concept CoefficientRing = requires(const R& a, const R& b) {
    { ring_traits<R>::zero() } -> std::convertible_to<R>;
    { ring_traits<R>::one() } -> std::convertible_to<R>;
    { ring_traits<R>::from_long(1L) } -> std::convertible_to<R>;
    { ring_traits<R>::from_rational(Rational(1)) } -> std::convertible_to<R>;
    { ring_traits<R>::is_zero(a) } -> std::convertible_to<bool>;
    { a + b } -> std::convertible_to<R>;
    { a - b } -> std::convertible_to<R>;
    { a * b } -> std::convertible_to<R>;
    { -a } -> std::convertible_to<R>;
};

/// Rings whose nonzero elements are invertible; required by the solvers.
template <typename R>
concept CoefficientField = CoefficientRing<R> && requires(const R& a, const R& b) {
    { a / b } -> std::convertible_to<R>;
};

} // namespace polyhom
