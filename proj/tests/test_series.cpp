#include <catch2/catch_amalgamated.hpp>

#include <polyhom/series.hpp>

#include "support/oracles.hpp"

using namespace polyhom;
using oracles::random_series;

namespace {
PolyhomSeries<Rational> mono(int i, int j, Rational c, int K = 8, Var v = Var::d) {
    return PolyhomSeries<Rational>::monomial(v, K, i, j, std::move(c));
}
} // namespace

TEST_CASE("term-by-term arithmetic", "[series]") {
    auto x2     = mono(2, 0, 1);
    auto x2logx = mono(2, 1, 1);
    auto sum    = add(x2, x2logx);
    REQUIRE(sum.coeff(2, 0) == 1);
    REQUIRE(sum.coeff(2, 1) == 1);
    REQUIRE(sum.terms().size() == 2);

    auto xlogx = mono(1, 1, 1);
    auto sq    = mul(xlogx, xlogx);
    REQUIRE(sq == mono(2, 2, 1));

    // (1 + x/2)^2 truncated at K = 2
    PolyhomSeries<Rational> a(Var::d, 2);
    a.set(0, 0, 1);
    a.set(1, 0, Rational(1, 2));
    auto p = mul(a, a);
    REQUIRE(p.coeff(0, 0) == 1);
    REQUIRE(p.coeff(1, 0) == 1);
    REQUIRE(p.coeff(2, 0) == Rational(1, 4));
}

TEST_CASE("canonical form has no zero coefficients", "[series]") {
    auto a = mono(3, 0, 2);
    auto b = mono(3, 0, -2);
    auto s = add(a, b);
    REQUIRE(s.is_zero());
    REQUIRE(s.terms().empty());

    std::mt19937 rng(7);
    for (int it = 0; it < 50; ++it) {
        auto u = random_series(rng, Var::d, 6);
        auto w = sub(add(u, u), scale(u, Rational(2)));
        REQUIRE(w.terms().empty());
    }
}

TEST_CASE("banned boundary-singular terms", "[series]") {
    PolyhomSeries<Rational> s(Var::d, 4);
    REQUIRE_THROWS_AS(s.set(0, 1, Rational(1)), SeriesDomainError);
    REQUIRE_THROWS_AS(s.set(-1, 0, Rational(1)), SeriesDomainError);
    REQUIRE_THROWS_AS(s.set(5, 0, Rational(1)), SeriesDomainError);
}

TEST_CASE("variable and truncation discipline", "[series]") {
    auto d = mono(1, 0, 1, 4, Var::d);
    auto t = mono(1, 0, 1, 4, Var::t);
    REQUIRE_THROWS_AS(add(d, t), VariableMismatchError);
    REQUIRE_THROWS_AS(mul(d, t), VariableMismatchError);

    auto a = mono(1, 0, 1, 3);
    auto b = mono(1, 0, 1, 9);
    REQUIRE(mul(a, b).trunc_order() == 3);
    REQUIRE(add(a, b).trunc_order() == 3);
}

TEST_CASE("ddx on log-power terms", "[series]") {
    auto da = ddx(mono(2, 1, 1)); // x^2 log x -> 2x log x + x
    REQUIRE(da.coeff(1, 1) == 2);
    REQUIRE(da.coeff(1, 0) == 1);

    REQUIRE(ddx(mono(3, 0, 1)) == mono(2, 0, 3, 7));

    auto db = ddx(mono(3, 2, 1)); // -> 3x^2 log^2 x + 2x^2 log x
    REQUIRE(db.coeff(2, 2) == 3);
    REQUIRE(db.coeff(2, 1) == 2);

    REQUIRE_THROWS_AS(ddx(mono(1, 1, 1)), SeriesDomainError);
    REQUIRE(ddx(mono(0, 0, 5)).is_zero());
}

TEST_CASE("Leibniz rule", "[series]") {
    std::mt19937 rng(11);
    for (int it = 0; it < 60; ++it) {
        auto a = random_series(rng, Var::d, 6);
        auto b = random_series(rng, Var::d, 6);
        auto lhs = ddx(mul(a, b));
        auto rhs = add(mul(ddx(a), b.truncated_to(5)), mul(a.truncated_to(5), ddx(b)));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("ring axioms up to truncation", "[series]") {
    std::mt19937 rng(13);
    for (int it = 0; it < 40; ++it) {
        auto a = random_series(rng, Var::d, 5);
        auto b = random_series(rng, Var::d, 5);
        auto c = random_series(rng, Var::d, 5);
        REQUIRE(add(a, b) == add(b, a));
        REQUIRE(mul(a, b) == mul(b, a));
        REQUIRE(mul(mul(a, b), c) == mul(a, mul(b, c)));
        REQUIRE(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)));
    }
}

TEST_CASE("substitution d = t^2/2", "[series]") {
    REQUIRE(substitute_d_to_t(mono(3, 0, 1, 5)) ==
            PolyhomSeries<Rational>::monomial(Var::t, 10, 6, 0, Rational(1, 8)));

    // float ring: d log d -> (t^2/2)(2 log t - log 2)
    auto dl = PolyhomSeries<double>::monomial(Var::d, 4, 1, 1, 1.0);
    auto st = substitute_d_to_t(dl);
    REQUIRE(st.coeff(2, 1) == Catch::Approx(1.0));
    REQUIRE(st.coeff(2, 0) == Catch::Approx(-0.5 * std::log(2.0)));
    REQUIRE(st.trunc_order() == 8);

    // the exact ring cannot hold log 2
    REQUIRE_THROWS_AS(substitute_d_to_t(mono(2, 1, 1)), RingCapabilityError);
}

TEST_CASE("substitution chain rule (log-free)", "[series]") {
    // d/dt substitute(a) = t * substitute(da/dd), since dd/dt = t
    std::mt19937 rng(17);
    for (int it = 0; it < 40; ++it) {
        auto a = random_series(rng, Var::d, 6, /*max_logdeg=*/0);
        const int Kt = 2 * (a.trunc_order() - 1);
        auto lhs = ddx(substitute_d_to_t(a)).truncated_to(Kt);
        auto t   = PolyhomSeries<Rational>::monomial(Var::t, Kt, 1, 0, 1);
        auto rhs = mul(t, substitute_d_to_t(ddx(a)).truncated_to(Kt));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("analytic composition", "[series]") {
    // exp coefficients against x itself
    std::vector<Rational> expc;
    Rational f = 1;
    for (int m = 0; m <= 8; ++m) {
        expc.push_back(Rational(1) / f);
        f *= m + 1;
    }
    auto ex = compose_analytic(expc, mono(1, 0, 1));
    for (int m = 0; m <= 8; ++m)
        REQUIRE(ex.coeff(m, 0) == expc[m]);

    // log(1+u) with u = x + x^2: x + x^2/2 - (2/3)x^3 + ...
    std::vector<Rational> logc{0};
    for (int m = 1; m <= 8; ++m)
        logc.push_back(Rational(m % 2 == 1 ? 1 : -1, m));
    PolyhomSeries<Rational> u(Var::d, 8);
    u.set(1, 0, 1);
    u.set(2, 0, 1);
    auto lg = compose_analytic(logc, u);
    REQUIRE(lg.coeff(1, 0) == 1);
    REQUIRE(lg.coeff(2, 0) == Rational(1, 2));
    REQUIRE(lg.coeff(3, 0) == Rational(-2, 3));
    REQUIRE(lg == oracles::brute_force_compose(logc, u));

    // identity case: a = 0 gives the constant f_0
    auto c = compose_analytic(logc, PolyhomSeries<Rational>::zero(Var::d, 8));
    REQUIRE(c.is_zero()); // f_0 = 0 here
    std::vector<Rational> g{Rational(7), Rational(1)};
    REQUIRE(compose_analytic(g, PolyhomSeries<Rational>::zero(Var::d, 8)) ==
            PolyhomSeries<Rational>::constant(Var::d, 8, 7));

    REQUIRE_THROWS_AS(compose_analytic(logc, PolyhomSeries<Rational>::constant(Var::d, 8, 1)),
                      SeriesDomainError);

    // randomized cross-check against the direct power sum
    std::mt19937 rng(23);
    for (int it = 0; it < 25; ++it) {
        std::vector<Rational> fc;
        for (int m = 0; m <= 6; ++m)
            fc.push_back(oracles::random_rational(rng));
        auto a = random_series(rng, Var::d, 6);
        if (a.has_term(0, 0))
            continue;
        REQUIRE(compose_analytic(fc, a) == oracles::brute_force_compose(fc, a));
    }
}

TEST_CASE("residual order", "[series]") {
    REQUIRE(PolyhomSeries<Rational>::zero(Var::d, 10).residual_order() == 11);
    auto s = add(mono(3, 1, 1), mono(5, 0, 1));
    REQUIRE(residual_order(s) == 3);
}

TEST_CASE("euler operator is total and truncation-preserving", "[series]") {
    auto v = add(mono(1, 0, 2), mono(3, 2, 1));
    auto e = euler(v);
    REQUIRE(e.trunc_order() == 8);
    REQUIRE(e.coeff(1, 0) == 2);
    REQUIRE(e.coeff(3, 2) == 3);
    REQUIRE(e.coeff(3, 1) == 2);
    REQUIRE(euler(mono(0, 0, 5)).is_zero());
}

TEST_CASE("series over a polynomial coefficient ring", "[series]") {
    using Poly = BivariatePoly<Rational>;
    PolyhomSeries<Poly> s(Var::d, 3);
    s.set(1, 0, Poly::monomial(0, 2, Rational(1))); // t^2 * x
    auto sq = mul(s, s);
    REQUIRE(sq.coeff(2, 0) == Poly::monomial(0, 4, Rational(1)));
}
