#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <polyhom/counterexample.hpp>
#include <polyhom/diagnostics.hpp>

#include "support/oracles.hpp"

using namespace polyhom;
using Poly = BivariatePoly<Rational>;

TEST_CASE("operator A on monomials", "[cex]") {
    REQUIRE(apply_A(2, Poly::monomial(3, 0, 1)).is_zero()); // d^3 in ker A
    REQUIRE(apply_A(2, Poly::monomial(4, 0, 1)) == Poly::monomial(4, 0, 5));
    // A(t^2) = 2 d^2 - 3 t^2 for n = 2
    auto at2 = apply_A(2, Poly::monomial(0, 2, 1));
    REQUIRE(at2.coeff(2, 0) == 2);
    REQUIRE(at2.coeff(0, 2) == -3);
    REQUIRE(at2.coeffs().size() == 2);
}

TEST_CASE("A matches the dense differentiation oracle", "[cex][prop]") {
    std::mt19937 rng(61);
    for (int it = 0; it < 60; ++it) {
        const int n = 2 + it % 3;
        auto h = oracles::random_bivariate(rng, 6);
        REQUIRE(apply_A(n, h) == oracles::dense_apply_A(n, h));
    }
}

TEST_CASE("kernel contains d^{n+1}", "[cex]") {
    for (int n : {2, 3, 4, 5})
        REQUIRE(apply_A(n, Poly::monomial(n + 1, 0, Rational(9, 4))).is_zero());
}

TEST_CASE("first-order push-through formula", "[cex][prop]") {
    // (-A/d)(d^{n+1} h) = -d^{n+1} (d h_dd + d h_tt + (n+3) h_d),
    // the constant coming out of the differentiation oracle as P(n+2).
    std::mt19937 rng(67);
    for (int n : {2, 3}) {
        const auto probe =
            divide_by_d(negate(apply_A(n, Poly::monomial(n + 2, 0, 1))));
        REQUIRE(probe.coeff(n + 1, 0) == -(n + 3));
        for (int it = 0; it < 25; ++it) {
            auto h   = oracles::random_bivariate(rng, 5);
            auto lhs = divide_by_d(negate(apply_A(n, mul_pow_d(h, n + 1))));
            auto rhs = negate(mul_pow_d(
                add(add(mul_pow_d(diff_d(diff_d(h)), 1), mul_pow_d(diff_t(diff_t(h)), 1)),
                    scale(diff_d(h), Rational(n + 3))),
                n + 1));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("worked seeds", "[cex]") {
    // w = 1: a_0 = d^3, a_1 = 0; vbar = d^3 solves the PDE outright
    auto st1 = build_cex_series(2, Poly::constant(1), 3);
    REQUIRE(st1.a[0] == Poly::monomial(3, 0, 1));
    REQUIRE(st1.a[1].is_zero());
    for (const auto& r : cex_residual(st1))
        REQUIRE(r.is_zero());

    // w = d: a_0 = d^4, a_1 = -5 d^3, a_2 = 0;
    // vbar = d^4 - (5/2) d^3 s^2 terminates
    auto st2 = build_cex_series(2, Poly::monomial(1, 0, 1), 2);
    REQUIRE(st2.a[0] == Poly::monomial(4, 0, 1));
    REQUIRE(st2.a[1] == Poly::monomial(3, 0, -5));
    REQUIRE(st2.a[2].is_zero());
    // s^2 coefficient of vbar is a_1/2! = -5/2 d^3
    REQUIRE(scale(st2.a[1], Rational(1, 2)) == Poly::monomial(3, 0, Rational(-5, 2)));
    for (const auto& r : cex_residual(st2))
        REQUIRE(r.is_zero());

    // w = t^2: a_1 = -A(d^3 t^2)/d via the oracle, still divisible by d^3
    auto st3 = build_cex_series(2, Poly::monomial(0, 2, 1), 3);
    auto expect = divide_by_d(negate(oracles::dense_apply_A(2, Poly::monomial(3, 2, 1))));
    REQUIRE(st3.a[1] == expect);
    REQUIRE(divisible_by_d_pow(st3.a[1], 3));
}

TEST_CASE("divisibility, telescoping, degree accounting", "[cex][prop]") {
    std::mt19937 rng(71);
    for (int it = 0; it < 24; ++it) {
        const int n = 2 + it % 2;
        auto seed   = oracles::random_bivariate(rng, 6);
        auto st     = build_cex_series(n, seed, 8);
        for (const auto& ak : st.a)
            REQUIRE(divisible_by_d_pow(ak, n + 1));
        for (int k = 0; k + 1 <= st.kmax; ++k)
            if (!st.a[k].is_zero() && !st.a[k + 1].is_zero())
                REQUIRE(st.a[k + 1].total_degree() <= st.a[k].total_degree());
        auto res = cex_residual(st);
        for (int k = 0; k < st.kmax; ++k)
            REQUIRE(res[k].is_zero());
        // polynomial seeds terminate: degree drops each step
        REQUIRE(st.a[std::min(st.kmax, seed.total_degree() + 1)].is_zero());
    }
}

TEST_CASE("residual detects tampering", "[cex]") {
    auto st = build_cex_series(2, Poly::monomial(2, 0, 1), 4);
    st.a[1] = add(st.a[1], Poly::monomial(5, 0, 1));
    auto res = cex_residual(st);
    REQUIRE_FALSE(res[0].is_zero()); // s^0 coefficient picks up d a_1
}

TEST_CASE("growth ledger modes", "[cex]") {
    REQUIRE_THROWS_AS(growth_ledger(2, 1.0, 13, LedgerMode::saturating_seed), ConfigError);

    for (auto mode : {LedgerMode::saturating_seed, LedgerMode::symbolic_bound}) {
        auto zero = growth_ledger(2, 0.0, 6, mode);
        REQUIRE(zero.size() == 7);
        for (double v : zero)
            REQUIRE((std::isinf(v) && v < 0));
    }

    // polynomial seed of degree 2: terminates, flat at -inf beyond it
    auto st  = build_cex_series(2, Poly::monomial(2, 0, 1), 6);
    auto led = growth_ledger(st);
    REQUIRE(led.size() == 7);
    for (int k = 0; k <= 2; ++k)
        REQUIRE(std::isfinite(led[k]));
    for (int k = 3; k <= 6; ++k)
        REQUIRE((std::isinf(led[k]) && led[k] < 0));

    // both modes grow at factorial scale across the window
    for (auto mode : {LedgerMode::saturating_seed, LedgerMode::symbolic_bound}) {
        auto ledger = growth_ledger(2, 1.0, 12, mode);
        REQUIRE(ledger.size() == 13);
        for (std::size_t k = 1; k < ledger.size(); ++k)
            REQUIRE(ledger[k] > ledger[k - 1]);
        REQUIRE(ledger.back() - ledger.front() >= 0.5 * std::lgamma(25.0)); // ~ (2k)! scale
    }

    // the certified majorant grows at least as fast as the (2k)! signature
    auto sym = growth_ledger(2, 1.0, 12, LedgerMode::symbolic_bound);
    std::vector<double> vals;
    for (double v : sym)
        vals.push_back(std::exp(v));
    auto fit = gevrey_fit(vals);
    REQUIRE(fit.gevrey_order >= 1.9);
}

TEST_CASE("synthetic (2k)! sequence fits the Gevrey-2 slope", "[cex]") {
    std::vector<double> seq;
    for (int k = 1; k <= 16; ++k)
        seq.push_back(std::exp(std::lgamma(2.0 * k + 1.0)));
    auto fit = gevrey_fit(seq);
    REQUIRE(fit.gevrey_order == Catch::Approx(2.0).margin(0.15));
}
