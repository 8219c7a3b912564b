#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <polyhom/errors.hpp>

namespace polyhom {

/// Finite-difference solution of the linear t-form model ODE on a uniform
/// grid away from the singular endpoint t = 0. Keeps the forcing
/// evaluator so residuals can be recomputed later.
struct GridSolution {
    int n = 2;
    std::vector<double> t;
    std::vector<double> v;
    double h = 0.0;
    std::function<double(double)> f;
};

/// Second-order centered differences for
///     t^2 v'' - (2n-1) t v' - 4(n+1) v = t^2 f(t)
/// on [t0, T] with Dirichlet data, solved by the Thomas algorithm. The
/// expansion engine owns the boundary layer at t = 0; this oracle stays on
/// t0 > 0 and is independent of the series machinery by construction.
inline GridSolution solve_bvp(int n, const std::function<double(double)>& f, double t0, double T,
                              int m, std::pair<double, double> bc) {
    if (m < 16)
        throw ConfigError("grid size m must be at least 16");
    if (!(t0 >= 1e-3 && T > t0))
        throw ConfigError("need 1e-3 <= t0 < T");

    GridSolution sol;
    sol.n = n;
    sol.f = f;
    sol.h = (T - t0) / m;
    for (int i = 0; i <= m; ++i)
        sol.t.push_back(t0 + sol.h * i);

    const int inner = m - 1;
    std::vector<double> lower(inner), diag(inner), upper(inner), rhs(inner);
    const double h2 = sol.h * sol.h;
    for (int i = 1; i <= inner; ++i) {
        const double t = sol.t[i];
        const double a = t * t / h2;            // v'' weight
        const double b = (2 * n - 1) * t / (2 * sol.h); // v' weight
        lower[i - 1] = a + b;
        diag[i - 1]  = -2 * a - 4 * (n + 1);
        upper[i - 1] = a - b;
        rhs[i - 1]   = t * t * f(t);
    }
    rhs[0] -= lower[0] * bc.first;
    rhs[inner - 1] -= upper[inner - 1] * bc.second;

    // Thomas sweep
    std::vector<double> cp(inner), dp(inner);
    if (diag[0] == 0.0)
        throw NumericError("singular tridiagonal system");
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < inner; ++i) {
        const double denom = diag[i] - lower[i] * cp[i - 1];
        if (denom == 0.0)
            throw NumericError("singular tridiagonal system");
        cp[i] = upper[i] / denom;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / denom;
    }
    std::vector<double> x(inner);
    x[inner - 1] = dp[inner - 1];
    for (int i = inner - 2; i >= 0; --i)
        x[i] = dp[i] - cp[i] * x[i + 1];

    sol.v.push_back(bc.first);
    sol.v.insert(sol.v.end(), x.begin(), x.end());
    sol.v.push_back(bc.second);
    return sol;
}

struct CoefficientFit {
    std::vector<double> coeffs;
    double condition_number = 0.0;
};

namespace detail {

    /// Householder QR least squares for a short, thin system; the R
    /// diagonal comes back for conditioning diagnostics.
    inline std::vector<double> qr_solve(std::vector<std::vector<double>> A, std::vector<double> b,
                                        std::vector<double>& r_diag) {
        const std::size_t rows = A.size(), cols = A[0].size();
        for (std::size_t k = 0; k < cols; ++k) {
            double norm = 0.0;
            for (std::size_t i = k; i < rows; ++i)
                norm += A[i][k] * A[i][k];
            norm = std::sqrt(norm);
            if (norm == 0.0)
                throw NumericError("rank-deficient basis");
            const double alpha = A[k][k] > 0 ? -norm : norm;
            std::vector<double> u(rows, 0.0);
            u[k] = A[k][k] - alpha;
            for (std::size_t i = k + 1; i < rows; ++i)
                u[i] = A[i][k];
            double unorm2 = 0.0;
            for (std::size_t i = k; i < rows; ++i)
                unorm2 += u[i] * u[i];
            if (unorm2 == 0.0)
                continue;
            for (std::size_t j = k; j < cols; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < rows; ++i)
                    dot += u[i] * A[i][j];
                const double f = 2.0 * dot / unorm2;
                for (std::size_t i = k; i < rows; ++i)
                    A[i][j] -= f * u[i];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < rows; ++i)
                dot += u[i] * b[i];
            const double f = 2.0 * dot / unorm2;
            for (std::size_t i = k; i < rows; ++i)
                b[i] -= f * u[i];
        }
        r_diag.clear();
        for (std::size_t i = 0; i < cols; ++i)
            r_diag.push_back(A[i][i]);
        std::vector<double> x(cols, 0.0);
        for (int i = static_cast<int>(cols) - 1; i >= 0; --i) {
            double s = b[i];
            for (std::size_t j = i + 1; j < cols; ++j)
                s -= A[i][j] * x[j];
            if (A[i][i] == 0.0)
                throw NumericError("rank-deficient basis");
            x[i] = s / A[i][i];
        }
        return x;
    }

} // namespace detail

/// Weighted least-squares fit of a grid solution against the basis
/// {t^i (log t)^j}; unit weights by default. Refuses ill-conditioned
/// bases: the condition number is estimated from the R-factor diagonal
/// (ratio of extreme magnitudes), which stays resolvable in double
/// precision where a Gram-based estimate saturates.
inline CoefficientFit fit_coefficients(const GridSolution& sol,
                                       const std::vector<std::pair<int, int>>& basis,
                                       const std::vector<double>& weights = {},
                                       double max_condition = 1e8) {
    if (basis.empty() || basis.size() > 6)
        throw ConfigError("basis size must be between 1 and 6");
    if (sol.t.size() < basis.size())
        throw ConfigError("fewer samples than basis functions");
    if (!weights.empty() && weights.size() != sol.t.size())
        throw ConfigError("one weight per sample required");

    std::vector<std::vector<double>> A(sol.t.size(), std::vector<double>(basis.size()));
    std::vector<double> b = sol.v;
    for (std::size_t r = 0; r < sol.t.size(); ++r) {
        const double sw = weights.empty() ? 1.0 : std::sqrt(weights[r]);
        for (std::size_t c = 0; c < basis.size(); ++c)
            A[r][c] = sw * std::pow(sol.t[r], basis[c].first) *
                      std::pow(std::log(sol.t[r]), basis[c].second);
        b[r] *= sw;
    }

    CoefficientFit fit;
    std::vector<double> r_diag;
    fit.coeffs = detail::qr_solve(std::move(A), std::move(b), r_diag);
    double lo = std::abs(r_diag[0]), hi = lo;
    for (double r : r_diag) {
        lo = std::min(lo, std::abs(r));
        hi = std::max(hi, std::abs(r));
    }
    fit.condition_number = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (fit.condition_number > max_condition)
        throw NumericError("basis is ill-conditioned (condition number estimate " +
                           std::to_string(fit.condition_number) + ")");
    return fit;
}

} // namespace polyhom
