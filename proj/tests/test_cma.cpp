#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <polyhom/cma.hpp>

#include "support/oracles.hpp"

using namespace polyhom;

namespace {

PolyhomSeries<Rational> mono(int i, int j, Rational c, int K, Var v = Var::d) {
    return PolyhomSeries<Rational>::monomial(v, K, i, j, std::move(c));
}

DenseMatrix random_matrix(std::mt19937& rng, std::size_t n, double entry_bound) {
    std::uniform_real_distribution<double> dist(-entry_bound, entry_bound);
    DenseMatrix x(n, std::vector<double>(n));
    for (auto& row : x)
        for (auto& v : row)
            v = dist(rng);
    return x;
}

} // namespace

TEST_CASE("logdet of a 1x1 series is log(1+x)", "[cma]") {
    const int K = 9;
    auto x  = mono(1, 0, 1, K);
    auto ld = logdet_series(SeriesMatrix<Rational>{{x}}, K);
    for (int k = 1; k <= K; ++k)
        REQUIRE(ld.coeff(k, 0) == Rational(k % 2 == 1 ? 1 : -1, k));
}

TEST_CASE("logdet of diag(ax, bx) splits into scalar logs", "[cma]") {
    const int K = 8;
    const Rational a(2), b(-1, 3);
    auto zero = PolyhomSeries<Rational>::zero(Var::d, K);
    SeriesMatrix<Rational> m{{mono(1, 0, a, K), zero}, {zero, mono(1, 0, b, K)}};
    auto ld = logdet_series(m, K);
    for (int k = 1; k <= K; ++k) {
        const Rational sign(k % 2 == 1 ? 1 : -1, k);
        Rational ak = 1, bk = 1;
        for (int i = 0; i < k; ++i) {
            ak *= a;
            bk *= b;
        }
        REQUIRE(ld.coeff(k, 0) == sign * (ak + bk));
    }
}

TEST_CASE("matrix mode agrees with precomputed trace powers", "[cma]") {
    const int K = 7;
    std::mt19937 rng(47);
    SeriesMatrix<Rational> m(2);
    for (auto& row : m)
        for (int c = 0; c < 2; ++c) {
            PolyhomSeries<Rational> s(Var::d, K);
            s.set(1, 0, oracles::random_rational(rng));
            s.set(2, 0, oracles::random_rational(rng));
            row.push_back(s);
        }
    std::vector<PolyhomSeries<Rational>> taus;
    auto power = m;
    for (int k = 1; k <= K; ++k) {
        if (k > 1)
            power = detail::mat_mul(power, m);
        taus.push_back(detail::mat_trace(power));
    }
    REQUIRE(logdet_series(m, K) == logdet_series(taus, K));
}

TEST_CASE("logdet is additive on block-diagonal input", "[cma]") {
    const int K = 7;
    std::mt19937 rng(53);
    auto zero = PolyhomSeries<Rational>::zero(Var::d, K);
    auto entry = [&] {
        PolyhomSeries<Rational> s(Var::d, K);
        s.set(1, 0, oracles::random_rational(rng));
        s.set(3, 0, oracles::random_rational(rng));
        return s;
    };
    SeriesMatrix<Rational> a{{entry(), entry()}, {entry(), entry()}};
    auto b = entry();
    SeriesMatrix<Rational> blocks{{a[0][0], a[0][1], zero},
                                  {a[1][0], a[1][1], zero},
                                  {zero, zero, b}};
    auto sum = add(logdet_series(a, K), logdet_series(SeriesMatrix<Rational>{{b}}, K));
    REQUIRE(logdet_series(blocks, K) == sum);
}

TEST_CASE("logdet survives vanishing low trace powers", "[cma]") {
    // antidiagonal [[0, x], [x, 0]]: Tr X = 0 but
    // log det(I + X) = log(1 - x^2) = -sum x^{2m}/m
    const int K = 8;
    auto zero = PolyhomSeries<Rational>::zero(Var::d, K);
    auto x    = mono(1, 0, 1, K);
    auto ld   = logdet_series(SeriesMatrix<Rational>{{zero, x}, {x, zero}}, K);
    for (int m = 1; 2 * m <= K; ++m)
        REQUIRE(ld.coeff(2 * m, 0) == Rational(-1, m));
    REQUIRE(ld.coeff(1, 0) == 0);
}

TEST_CASE("logdet needs positive leading order in series mode", "[cma]") {
    auto bad = mono(0, 0, Rational(1, 2), 5);
    REQUIRE_THROWS_AS(logdet_series(SeriesMatrix<Rational>{{bad}}, 5), SeriesDomainError);
}

TEST_CASE("numeric trace sum matches the dense determinant", "[cma]") {
    std::mt19937 rng(59);
    double worst = 0.0;
    for (int it = 0; it < 30; ++it) {
        auto x = random_matrix(rng, 3, 0.1); // Frobenius norm <= 0.3
        DenseMatrix ipx = x;
        for (int i = 0; i < 3; ++i)
            ipx[i][i] += 1.0;
        const double ref = std::log(det_dense(ipx));
        worst = std::max(worst, std::abs(logdet_trace_numeric(x, 12) - ref));
    }
    REQUIRE(worst < 1e-10);

    DenseMatrix big(3, std::vector<double>(3, 0.4));
    REQUIRE_THROWS_AS(logdet_trace_numeric(big, 12), NumericError);
}

TEST_CASE("model presets expose the expected exponents", "[cma]") {
    REQUIRE(*assemble_model<Rational>(2, ModelForm::d_form).ind.root1 == 3);
    REQUIRE(*assemble_model<Rational>(2, ModelForm::d_form).ind.root2 == -1);
    REQUIRE(*assemble_model<Rational>(2, ModelForm::t_form).ind.root1 == 6);
    REQUIRE(*assemble_model<Rational>(2, ModelForm::t_form).ind.root2 == -2);
    REQUIRE(*assemble_model<Rational>(3, ModelForm::d_form).ind.root1 == 4);
    REQUIRE(*assemble_model<Rational>(3, ModelForm::d_form).ind.root2 == -1);
    REQUIRE_THROWS_AS(assemble_model<Rational>(1, ModelForm::d_form), ConfigError);

    // substitution sends the d-form resonant power onto the t-form one
    for (int n : {2, 3}) {
        auto img = substitute_d_to_t(mono(n + 1, 0, 1, n + 2));
        REQUIRE(img.residual_order() == 2 * n + 2);
        REQUIRE(assemble_model<Rational>(n, ModelForm::t_form).ind.P(2 * n + 2) == 0);
    }
}

TEST_CASE("model nonlinearity is quadratic in the unknown", "[cma]") {
    // a candidate of leading order p feeds the residual only at >= 2p
    auto p = assemble_model<Rational>(2, ModelForm::d_form);
    for (int lead : {2, 3, 4}) {
        auto v = mono(lead, 0, Rational(5, 7), 12);
        REQUIRE(p.nonlinearity(v).residual_order() >= 2 * lead);
    }
    // and vanishes on the zero series
    REQUIRE(p.nonlinearity(PolyhomSeries<Rational>::zero(Var::d, 10)).is_zero());
}

TEST_CASE("ball benchmark vanishes identically", "[cma]") {
    REQUIRE(ball_benchmark(2, 8, std::vector<double>{0.5}).max_pointwise_residual <= 1e-12);
    for (int n : {2, 3, 4}) {
        auto rep = ball_benchmark(n, 8, default_ball_grid());
        REQUIRE(rep.max_pointwise_residual <= 1e-12);
        REQUIRE(rep.expansion_zero);
        REQUIRE(rep.expansion_coeff_max == 0.0);
        REQUIRE(rep.c_n1_log == 0);
    }
    REQUIRE_THROWS_AS(ball_benchmark(2, 8, std::vector<double>{1.5}), ConfigError);
}

TEST_CASE("first log coefficient", "[cma]") {
    auto ball = assemble_model<Rational>(2, ModelForm::d_form);
    REQUIRE(first_log_coefficient(ball, 8) == 0);

    auto p    = assemble_model<Rational>(2, ModelForm::d_form, PolyhomSeries<Rational>::zero(Var::d, 0),
                                         PolyhomSeries<Rational>::zero(Var::d, 0), false);
    p.forcing = mono(3, 0, 1, 8);
    REQUIRE(first_log_coefficient(p, 8) == Rational(1, 4));

    // zero resonant slot in a linear problem: no log
    p.forcing = mono(2, 0, 1, 8);
    REQUIRE(first_log_coefficient(p, 8) == 0);

    REQUIRE_THROWS_AS(first_log_coefficient(p, 2), ConfigError); // K below n+1
}
