#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <polyhom/fuchsian.hpp>
#include <polyhom/series.hpp>

namespace polyhom {

template <CoefficientRing R>
using SeriesMatrix = std::vector<std::vector<PolyhomSeries<R>>>;

namespace detail {

    template <CoefficientRing R>
    void require_square(const SeriesMatrix<R>& m) {
        for (const auto& row : m)
            if (row.size() != m.size())
                throw SeriesDomainError("matrix of series is not square");
    }

    template <CoefficientRing R>
    SeriesMatrix<R> mat_mul(const SeriesMatrix<R>& a, const SeriesMatrix<R>& b) {
        const std::size_t n = a.size();
        SeriesMatrix<R> out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                auto acc = mul(a[i][0], b[0][j]);
                for (std::size_t k = 1; k < n; ++k)
                    acc = add(acc, mul(a[i][k], b[k][j]));
                out[i].push_back(std::move(acc));
            }
        return out;
    }

    template <CoefficientRing R>
    PolyhomSeries<R> mat_trace(const SeriesMatrix<R>& a) {
        auto tr = a[0][0];
        for (std::size_t i = 1; i < a.size(); ++i)
            tr = add(tr, a[i][i]);
        return tr;
    }

} // namespace detail

/// log det(I + X) = sum_{k>=1} (-1)^{k-1} Tr(X^k)/k for a matrix of
/// series. Entries must have strictly positive leading order so that the
/// sum truncates finitely (Tr(X^k) has order >= k).
template <CoefficientField R>
PolyhomSeries<R> logdet_series(const SeriesMatrix<R>& x, int K) {
    detail::require_square(x);
    if (x.empty())
        throw SeriesDomainError("empty matrix");
    for (const auto& row : x)
        for (const auto& entry : row)
            if (!entry.is_zero() && entry.residual_order() < 1)
                throw SeriesDomainError("logdet_series needs entries of positive leading order");

    SeriesMatrix<R> trimmed(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (const auto& entry : x[i])
            trimmed[i].push_back(entry.truncated_to(K));

    auto out   = PolyhomSeries<R>::zero(trimmed[0][0].var(), K);
    auto power = trimmed;
    for (int k = 1; k <= K; ++k) {
        if (k > 1)
            power = detail::mat_mul(power, trimmed);
        // once every entry vanishes through K, all later traces do too
        int min_order = K + 1;
        for (const auto& row : power)
            for (const auto& entry : row)
                min_order = std::min(min_order, entry.residual_order());
        if (min_order > K)
            break;
        const auto tk    = detail::mat_trace(power);
        const Rational w = (k % 2 == 1) ? Rational(1, k) : Rational(-1, k);
        out = add(out, scale(tk, ring_traits<R>::from_rational(w)));
    }
    return out;
}

/// Same sum from precomputed trace powers tau_k = Tr(X^k), k = 1, 2, ...
template <CoefficientField R>
PolyhomSeries<R> logdet_series(const std::vector<PolyhomSeries<R>>& trace_powers, int K) {
    if (trace_powers.empty())
        throw SeriesDomainError("no trace powers given");
    auto out = PolyhomSeries<R>::zero(trace_powers[0].var(), K);
    for (std::size_t idx = 0; idx < trace_powers.size(); ++idx) {
        const int k      = static_cast<int>(idx) + 1;
        const Rational w = (k % 2 == 1) ? Rational(1, k) : Rational(-1, k);
        out = add(out, scale(trace_powers[idx].truncated_to(K), ring_traits<R>::from_rational(w)));
    }
    return out;
}

using DenseMatrix = std::vector<std::vector<double>>;

inline double frobenius_norm(const DenseMatrix& x) {
    double s = 0.0;
    for (const auto& row : x)
        for (double v : row)
            s += v * v;
    return std::sqrt(s);
}

/// Determinant by partial-pivot LU; intended for the small dense matrices
/// of the ball benchmark and the log-det spot check.
inline double det_dense(DenseMatrix a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (a[piv][col] == 0.0)
            return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

/// Truncated numeric evaluation of the trace-power sum for a constant
/// matrix. The Frobenius norm bounds the spectral radius; values at or
/// beyond the 0.5 threshold are rejected.
inline double logdet_trace_numeric(const DenseMatrix& x, int K) {
    const std::size_t n = x.size();
    for (const auto& row : x)
        if (row.size() != n)
            throw SeriesDomainError("matrix is not square");
    if (frobenius_norm(x) >= 0.5)
        throw NumericError("spectral-radius proxy (Frobenius norm) >= 0.5; the trace-power "
                           "series is not certified to converge");
    DenseMatrix power = x;
    double out = 0.0;
    for (int k = 1; k <= K; ++k) {
        if (k > 1) {
            DenseMatrix next(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t j = 0; j < n; ++j)
                        next[i][j] += power[i][l] * x[l][j];
            power = std::move(next);
        }
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            tr += power[i][i];
        out += (k % 2 == 1 ? 1.0 : -1.0) * tr / k;
    }
    return out;
}

/// Nonlinearity program of the scalar model: with
///     mu(v) = x^2 (1 + C1 x) v'' + (-(n-1) x + Cd x^2) v',
/// the trace-power tail is F2(v) = mu - log(1 + mu), i.e. logdet_series on
/// the 1x1 matrix [mu] minus its linear term. Every monomial of F2 is at
/// least quadratic in mu, so an order-m increment of v moves the residual
/// only beyond order m.
template <CoefficientField R>
std::function<PolyhomSeries<R>(const PolyhomSeries<R>&)>
model_nonlinearity(int n, PolyhomSeries<R> c1, PolyhomSeries<R> cd) {
    return [n, c1 = std::move(c1), cd = std::move(cd)](const PolyhomSeries<R>& v) {
        const int K    = v.trunc_order();
        const auto Ev  = euler(v);
        const auto EEv = euler(Ev);
        const auto x   = PolyhomSeries<R>::monomial(v.var(), K, 1, 0, ring_traits<R>::one());
        auto mu = sub(EEv, Ev); // x^2 v''
        if (!c1.is_zero())
            mu = add(mu, mul(mul(x, c1.truncated_to(K)), sub(EEv, Ev)));
        mu = add(mu, scale(Ev, ring_traits<R>::from_long(-(n - 1))));
        if (!cd.is_zero())
            mu = add(mu, mul(mul(x, cd.truncated_to(K)), Ev));
        return sub(mu, logdet_series(SeriesMatrix<R>{{mu}}, K));
    };
}

enum class ModelForm { d_form, t_form };

/// Model problem presets.
///   d-form: d^2 v'' - (n-1) d v' - (n+1) v  (roots n+1, -1), with
///           optional analytic C1/Cd slots and the model nonlinearity;
///   t-form: t^2 v'' - (2n-1) t v' - 4(n+1) v (roots 2n+2, -2), the radial
///           reduction after d = t^2/2 with tangential terms frozen into
///           the forcing.
template <CoefficientField R = Rational>
FuchsianProblem<R> assemble_model(int n, ModelForm form,
                                  PolyhomSeries<R> c1 = PolyhomSeries<R>::zero(Var::d, 0),
                                  PolyhomSeries<R> cd = PolyhomSeries<R>::zero(Var::d, 0),
                                  bool with_nonlinearity = true) {
    if (n < 2)
        throw ConfigError("model requires complex dimension n >= 2");
    FuchsianProblem<R> p;
    p.n = n;
    if (form == ModelForm::d_form) {
        p.var = Var::d;
        p.ind = indicial(Rational(-(n - 1)), Rational(-(n + 1)));
        p.perturb_c1 = std::move(c1);
        p.perturb_cd = std::move(cd);
        if (with_nonlinearity)
            p.nonlinearity = model_nonlinearity<R>(n, p.perturb_c1, p.perturb_cd);
    } else {
        if (!c1.is_zero() || !cd.is_zero())
            throw ConfigError("the C1/Cd slots belong to the d-form operator");
        p.var = Var::t;
        p.ind = indicial(Rational(-(2 * n - 1)), Rational(-4 * (n + 1)));
        p.perturb_c1 = PolyhomSeries<R>::zero(Var::t, 0);
        p.perturb_cd = PolyhomSeries<R>::zero(Var::t, 0);
    }
    p.forcing = PolyhomSeries<R>::zero(p.var, 0);
    return p;
}

/// Reduced first-derivative form of the t-model: with v1 = v' - 2v/t the
/// operator becomes t^2 v1'' - (2n-3) t v1' - (6n+3) v1, whose exponents
/// {2n+1, -3} are the primal t-form exponents {2n+2, -2} shifted down by
/// one, as v ~ t^m maps to v1 ~ t^{m-1}.
template <CoefficientField R = Rational>
FuchsianProblem<R> assemble_reduced_t_model(int n) {
    if (n < 2)
        throw ConfigError("model requires complex dimension n >= 2");
    FuchsianProblem<R> p;
    p.n   = n;
    p.var = Var::t;
    p.ind = indicial(Rational(-(2 * n - 3)), Rational(-(6 * n + 3)));
    p.perturb_c1 = PolyhomSeries<R>::zero(Var::t, 0);
    p.perturb_cd = PolyhomSeries<R>::zero(Var::t, 0);
    p.forcing    = PolyhomSeries<R>::zero(Var::t, 0);
    return p;
}

struct BallBenchmarkReport {
    int n = 0;
    int K = 0;
    std::vector<double> grid;
    std::vector<double> residuals;        // |det(w_ij) - e^{(n+1)w}| per grid point
    double max_pointwise_residual = 0.0;
    bool expansion_zero           = false;
    double expansion_coeff_max    = 0.0;
    Rational c_n1_log             = 0;
};

/// Exact unit-ball benchmark: w = -log(1 - r^2) solves
/// det(w_ij) = e^{(n+1)w} with rho = |z|^2 - 1. The complex Hessian at
/// z = (r, 0, ..., 0) is a I + b zz* with a = 1/(1-r^2), b = a^2, whose
/// determinant a^{n-1}(a + b r^2) collapses to (1-r^2)^{-(n+1)}; here the
/// determinant is recomputed by dense LU and compared pointwise. The
/// induced model forcing is zero, so the expansion engine must return the
/// all-zero series and a vanishing first log coefficient.
inline BallBenchmarkReport ball_benchmark(int n, int K, const std::vector<double>& grid) {
    if (n < 2)
        throw ConfigError("ball benchmark requires n >= 2");
    for (double r : grid)
        if (!(r > 0.0 && r < 1.0))
            throw ConfigError("radius grid must lie strictly inside (0, 1)");

    BallBenchmarkReport rep;
    rep.n    = n;
    rep.K    = K;
    rep.grid = grid;
    for (double r : grid) {
        const double s = 1.0 - r * r;
        const double a = 1.0 / s;
        const double b = a * a;
        DenseMatrix hess(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            hess[i][i] = a;
        hess[0][0] = a + b * r * r;
        const double det = det_dense(hess);
        const double w   = -std::log(s);
        const double res = std::abs(det - std::exp((n + 1) * w));
        rep.residuals.push_back(res);
        rep.max_pointwise_residual = std::max(rep.max_pointwise_residual, res);
    }

    auto problem = assemble_model<Rational>(n, ModelForm::d_form);
    const auto sol = solve_polyhom(problem, K);
    rep.expansion_zero      = sol.expansion.is_zero();
    rep.expansion_coeff_max = sol.expansion.max_abs_coeff();
    rep.c_n1_log            = sol.expansion.coeff(n + 1, 1);
    return rep;
}

inline std::vector<double> default_ball_grid(std::size_t points = 20, double lo = 0.05,
                                             double hi = 0.85) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < points; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(points - 1));
    return grid;
}

/// c_{n+1,1}: the coefficient of the first logarithmic term. Zero exactly
/// when the order-(n+1) residual vanishes.
template <CoefficientField R>
R first_log_coefficient(const FuchsianProblem<R>& p, int K) {
    if (K < p.n + 1)
        throw ConfigError("K must reach the resonant order n+1");
    return solve_polyhom(p, K).expansion.coeff(p.n + 1, 1);
}

} // namespace polyhom
