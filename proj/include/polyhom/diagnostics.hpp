#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <polyhom/errors.hpp>

namespace polyhom {

/// Classification thresholds, calibrated on the synthetic families
/// (geometric, k!, (k!)^2) and overridable.
struct GrowthFitConfig {
    double convergent_sigma_max = 0.15;
    double residual_max         = 0.5; // RMS in log units
    double divergence_ratio_gain = 2.0;
};

enum class GrowthClass { convergent, gevrey, unknown };

inline const char* growth_class_name(GrowthClass c) {
    switch (c) {
    case GrowthClass::convergent: return "CONVERGENT";
    case GrowthClass::gevrey: return "GEVREY";
    default: return "UNKNOWN";
    }
}

struct GrowthFit {
    std::optional<double> radius_estimate;
    double gevrey_order = 0.0;
    double log_scale    = 0.0; // fitted k log B term
    double fit_residual = 0.0;
    GrowthClass classification = GrowthClass::unknown;
};

namespace detail {

    /// Leading run of positive entries; terminating series classify on
    /// the nonzero prefix.
    inline std::vector<std::pair<int, double>>
    positive_prefix(const std::vector<std::pair<int, double>>& norms) {
        std::vector<std::pair<int, double>> out;
        for (const auto& [k, v] : norms) {
            if (!(v > 0.0))
                break;
            out.emplace_back(k, v);
        }
        return out;
    }

    inline std::vector<std::pair<int, double>> enumerate(const std::vector<double>& norms) {
        std::vector<std::pair<int, double>> out;
        for (std::size_t i = 0; i < norms.size(); ++i)
            out.emplace_back(static_cast<int>(i) + 1, norms[i]);
        return out;
    }

    /// Least squares for a tiny column system via normal equations.
    template <std::size_t P>
    std::array<double, P> solve_ls(const std::vector<std::array<double, P>>& rows,
                                   const std::vector<double>& rhs, double* rms) {
        std::array<std::array<double, P + 1>, P> m{};
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t i = 0; i < P; ++i) {
                for (std::size_t j = 0; j < P; ++j)
                    m[i][j] += rows[r][i] * rows[r][j];
                m[i][P] += rows[r][i] * rhs[r];
            }
        for (std::size_t col = 0; col < P; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < P; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col]))
                    piv = r;
            if (m[piv][col] == 0.0)
                throw NumericError("degenerate regression system");
            std::swap(m[piv], m[col]);
            for (std::size_t r = 0; r < P; ++r) {
                if (r == col)
                    continue;
                const double f = m[r][col] / m[col][col];
                for (std::size_t c = col; c <= P; ++c)
                    m[r][c] -= f * m[col][c];
            }
        }
        std::array<double, P> x{};
        for (std::size_t i = 0; i < P; ++i)
            x[i] = m[i][P] / m[i][i];
        if (rms) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                double pred = 0.0;
                for (std::size_t i = 0; i < P; ++i)
                    pred += rows[r][i] * x[i];
                s += (pred - rhs[r]) * (pred - rhs[r]);
            }
            *rms = std::sqrt(s / static_cast<double>(rows.size()));
        }
        return x;
    }

} // namespace detail

/// Domb-Sykes estimate of the convergence radius: successive ratios
/// |a_{k+1}/a_k| extrapolated linearly against 1/k. Returns nullopt when
/// the ratios grow superlinearly (factorial-type divergence) or the
/// extrapolated limit is nonpositive.
inline std::optional<double> radius_estimate(const std::vector<std::pair<int, double>>& norms,
                                             const GrowthFitConfig& cfg = {}) {
    const auto pref = detail::positive_prefix(norms);
    if (pref.size() < 6)
        throw NumericError("radius estimate needs at least 6 nonzero leading entries");
    std::vector<std::pair<int, double>> ratio; // (k, a_{k+1}/a_k), k >= 1
    for (std::size_t i = 0; i + 1 < pref.size(); ++i)
        if (pref[i].first >= 1)
            ratio.emplace_back(pref[i].first, pref[i + 1].second / pref[i].second);
    if (ratio.size() < 4)
        throw NumericError("radius estimate needs at least 6 nonzero leading entries");

    const double head = ratio[ratio.size() / 2].second, tail = ratio.back().second;
    if (tail > cfg.divergence_ratio_gain * head && tail > ratio.front().second)
        return std::nullopt; // ratios still climbing at the end: divergent

    std::vector<std::array<double, 2>> rows;
    std::vector<double> rhs;
    for (const auto& [k, r] : ratio) {
        rows.push_back({1.0, 1.0 / static_cast<double>(k)});
        rhs.push_back(r);
    }
    const auto fit = detail::solve_ls<2>(rows, rhs, nullptr);
    if (!(fit[0] > 0.0))
        return std::nullopt;
    return 1.0 / fit[0];
}

inline std::optional<double> radius_estimate(const std::vector<double>& norms,
                                             const GrowthFitConfig& cfg = {}) {
    return radius_estimate(detail::enumerate(norms), cfg);
}

/// Stirling-form fit  log a_k ~ sigma (k log k - k) + k log B + c.
/// The sigma regressor is evaluated as log k! (the same form with the
/// known 0.5 log(2 pi k) correction kept, which removes the small-k bias
/// of the raw k log k - k column). sigma is the estimated Gevrey order of
/// the coefficient sequence (0: geometric, 1: k!-type, 2: (k!)^2-type).
inline GrowthFit gevrey_fit(const std::vector<std::pair<int, double>>& norms,
                            const GrowthFitConfig& cfg = {}) {
    GrowthFit out;
    const auto pref = detail::positive_prefix(norms);
    if (pref.empty()) {
        out.classification = GrowthClass::unknown;
        return out;
    }
    if (pref.size() < 8)
        throw NumericError("gevrey fit needs at least 8 nonzero leading entries");

    std::vector<std::array<double, 3>> rows;
    std::vector<double> rhs;
    for (const auto& [k, a] : pref) {
        const double kk = static_cast<double>(k);
        rows.push_back({std::lgamma(kk + 1.0), kk, 1.0});
        rhs.push_back(std::log(a));
    }
    const auto fit  = detail::solve_ls<3>(rows, rhs, &out.fit_residual);
    out.gevrey_order = fit[0];
    out.log_scale    = fit[1];

    if (out.gevrey_order < cfg.convergent_sigma_max) {
        const auto radius = radius_estimate(norms, cfg);
        if (radius && *radius > 0.0) {
            out.radius_estimate = radius;
            out.classification  = GrowthClass::convergent;
            return out;
        }
    }
    out.classification =
        out.fit_residual < cfg.residual_max ? GrowthClass::gevrey : GrowthClass::unknown;
    return out;
}

inline GrowthFit gevrey_fit(const std::vector<double>& norms, const GrowthFitConfig& cfg = {}) {
    return gevrey_fit(detail::enumerate(norms), cfg);
}

} // namespace polyhom
