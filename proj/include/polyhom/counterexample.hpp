#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <polyhom/bivariate.hpp>

namespace polyhom {

/// The degenerate operator of the divergence example,
///     A = d^2 dd_dd + d^2 dd_tt - (n-1) d dd_d - (n+1),
/// applied exactly to a bivariate polynomial. This defining form is
/// authoritative; closed-form shortcuts are checked against it in tests.
/// Kernel fact: A(d^{n+1}) = 0.
template <CoefficientRing R>
BivariatePoly<R> apply_A(int n, const BivariatePoly<R>& h) {
    auto out = mul_pow_d(diff_d(diff_d(h)), 2);
    out      = add(out, mul_pow_d(diff_t(diff_t(h)), 2));
    out      = add(out, scale(mul_pow_d(diff_d(h), 1), ring_traits<R>::from_long(-(n - 1))));
    return add(out, scale(h, ring_traits<R>::from_long(-(n + 1))));
}

/// Coefficient ledger of the series  vbar = sum_k a_k s^{2k} / (2k)!
/// with a_k = (-A/d)^k (d^{n+1} w).
struct CexState {
    int n    = 2;
    int kmax = 0;
    BivariatePoly<Rational> seed_w;
    std::vector<BivariatePoly<Rational>> a; // a[k], k = 0..kmax
};

/// Builds a_0 = d^{n+1} w and a_{k+1} = -A(a_k)/d, verifying on the way
/// that A(a_k) is exactly divisible by d and each a_k by d^{n+1} (the
/// inductive divisibility that keeps the series boundary-flat). Failures
/// here indicate a bug and are surfaced as such.
inline CexState build_cex_series(int n, const BivariatePoly<Rational>& seed_w, int kmax) {
    if (n < 2)
        throw ConfigError("counterexample requires n >= 2");
    if (kmax < 0)
        throw ConfigError("kmax must be nonnegative");
    CexState st;
    st.n      = n;
    st.kmax   = kmax;
    st.seed_w = seed_w;
    st.a.push_back(mul_pow_d(seed_w, n + 1));
    for (int k = 0; k < kmax; ++k) {
        const auto image = negate(apply_A(n, st.a.back()));
        if (!divisible_by_d_pow(image, 1))
            throw InternalCheckError("A(a_k) is not divisible by d at k = " + std::to_string(k));
        st.a.push_back(divide_by_d(image));
    }
    for (int k = 0; k <= kmax; ++k)
        if (!divisible_by_d_pow(st.a[k], n + 1))
            throw InternalCheckError("a_k lost its d^{n+1} factor at k = " + std::to_string(k));
    return st;
}

/// Applies the full operator A + d dd_ss to the truncated series and
/// returns the s^{2k} coefficients, k = 0..kmax. Telescoping
/// (d a_{k+1} = -A a_k) forces every coefficient below the truncation
/// order to vanish identically; only k = kmax may carry the tail.
inline std::vector<BivariatePoly<Rational>> cex_residual(const CexState& st) {
    std::vector<BivariatePoly<Rational>> res;
    for (int k = 0; k <= st.kmax; ++k) {
        const Rational inv_fact(1, factorial(2 * k));
        auto coeff = scale(apply_A(st.n, st.a[k]), inv_fact);
        if (k + 1 <= st.kmax) {
            // d * dd_ss of a_{k+1} s^{2k+2}/(2k+2)! lands on s^{2k}
            const Rational w(BigInt((2 * k + 2)) * (2 * k + 1), factorial(2 * k + 2));
            coeff = add(coeff, mul_pow_d(scale(st.a[k + 1], w), 1));
        }
        res.push_back(std::move(coeff));
    }
    return res;
}

enum class LedgerMode { saturating_seed, symbolic_bound };

/// Per-k log-max-coefficient of an already built series; -inf where a_k
/// vanishes (polynomial seeds terminate, so the tail goes flat at -inf).
inline std::vector<double> growth_ledger(const CexState& st) {
    std::vector<double> ledger;
    for (const auto& ak : st.a)
        ledger.push_back(ak.max_log_abs_coeff());
    return ledger;
}

namespace detail {

    inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

    inline double log_add_exp(double a, double b) {
        if (std::isinf(a) && a < 0)
            return b;
        if (std::isinf(b) && b < 0)
            return a;
        const double m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m));
    }

} // namespace detail

/// Growth diagnostics for the counterexample recursion, one float per k
/// (natural logs; -inf marks exact zeros).
///
/// saturating_seed: builds a truncated seed whose Taylor coefficients
/// saturate the derivative-bound pattern C^{|alpha|+1} (2 alpha)!, i.e.
/// c_{ab} = C^{a+b+1} (2a)! (2b)! / (a! b!) up to total degree kmax, runs
/// the exact recursion, and reports log max |coefficient| of a_k.
///
/// symbolic_bound: propagates that same coefficient envelope through the
/// first-order formula (-A/d)(d^{n+1} h) = -d^{n+1}(d h_dd + d h_tt +
/// c_n h_d), with the constant c_n derived on the fly from apply_A itself
/// (it equals P(n+2) = n+3), and reports the certified majorant of the
/// leading coefficient per k. All weights are positive, so the recursion
/// is a true majorant; it runs in log space.
inline std::vector<double> growth_ledger(int n, double bound_C, int kmax, LedgerMode mode) {
    if (kmax > 12)
        throw ConfigError("growth ledger supports kmax <= 12");
    if (kmax < 0 || bound_C < 0)
        throw ConfigError("bad growth ledger arguments");
    const double ninf = -std::numeric_limits<double>::infinity();

    if (mode == LedgerMode::saturating_seed) {
        const Rational C = rational_from_double(bound_C);
        BivariatePoly<Rational> seed;
        if (C != 0) {
            for (int a = 0; a + 0 <= kmax; ++a)
                for (int b = 0; a + b <= kmax; ++b) {
                    Rational c(factorial(2 * a) * factorial(2 * b),
                               factorial(a) * factorial(b));
                    for (int p = 0; p <= a + b; ++p)
                        c *= C;
                    seed.set(a, b, c);
                }
        }
        const auto st = build_cex_series(n, seed, kmax);
        std::vector<double> ledger;
        for (const auto& ak : st.a)
            ledger.push_back(ak.is_zero() ? ninf : ak.max_log_abs_coeff());
        return ledger;
    }

    // first-order coefficient from the differentiation oracle:
    // (-A/d)(d^{n+1} * d) = -c_n d^{n+1}
    const auto probe = divide_by_d(negate(apply_A(n, BivariatePoly<Rational>::monomial(n + 2, 0, 1))));
    const double c_n = -to_double(probe.coeff(n + 1, 0));

    const int W = kmax; // seed degrees 0..W feed the origin after kmax steps
    std::vector<std::vector<double>> L(W + 1, std::vector<double>(W + 1, ninf));
    if (bound_C > 0) {
        const double logC = std::log(bound_C);
        for (int a = 0; a <= W; ++a)
            for (int b = 0; a + b <= W; ++b)
                L[a][b] = (a + b + 1) * logC + detail::log_factorial(2 * a) +
                          detail::log_factorial(2 * b) - detail::log_factorial(a) -
                          detail::log_factorial(b);
    }
    std::vector<double> ledger{L[0][0]};
    for (int k = 1; k <= kmax; ++k) {
        std::vector<std::vector<double>> next(W + 1, std::vector<double>(W + 1, ninf));
        for (int a = 0; a <= W; ++a)
            for (int b = 0; a + b <= W - k; ++b) {
                double v = ninf;
                if (a + 1 <= W && L[a + 1][b] > ninf)
                    v = detail::log_add_exp(v, std::log((a + 1) * (a + c_n)) + L[a + 1][b]);
                if (a >= 1 && b + 2 <= W && L[a - 1][b + 2] > ninf)
                    v = detail::log_add_exp(v, std::log(double(b + 2) * (b + 1)) + L[a - 1][b + 2]);
                next[a][b] = v;
            }
        L = std::move(next);
        ledger.push_back(L[0][0]);
    }
    return ledger;
}

} // namespace polyhom
