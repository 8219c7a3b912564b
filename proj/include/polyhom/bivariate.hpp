#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include <polyhom/errors.hpp>
#include <polyhom/ring.hpp>

namespace polyhom {

/// Truncation-free polynomial in (d, t) with exact differentiation.
/// Canonical form: no zero coefficient is stored.
template <CoefficientRing R>
class BivariatePoly {
public:
    using Key    = std::pair<int, int>; // (deg_d, deg_t)
    using Coeffs = std::map<Key, R>;

    BivariatePoly() = default;

    static BivariatePoly monomial(int deg_d, int deg_t, R c) {
        BivariatePoly p;
        p.set(deg_d, deg_t, std::move(c));
        return p;
    }

    static BivariatePoly constant(R c) { return monomial(0, 0, std::move(c)); }

    const Coeffs& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void set(int deg_d, int deg_t, R c) {
        if (deg_d < 0 || deg_t < 0)
            throw SeriesDomainError("negative degree in bivariate term");
        if (ring_traits<R>::is_zero(c))
            coeffs_.erase(Key{deg_d, deg_t});
        else
            coeffs_[Key{deg_d, deg_t}] = std::move(c);
    }

    void accumulate(int deg_d, int deg_t, const R& c) {
        if (deg_d < 0 || deg_t < 0)
            throw SeriesDomainError("negative degree in bivariate term");
        auto it = coeffs_.find(Key{deg_d, deg_t});
        if (it == coeffs_.end()) {
            if (!ring_traits<R>::is_zero(c))
                coeffs_.emplace(Key{deg_d, deg_t}, c);
            return;
        }
        it->second = it->second + c;
        if (ring_traits<R>::is_zero(it->second))
            coeffs_.erase(it);
    }

    R coeff(int deg_d, int deg_t) const {
        auto it = coeffs_.find(Key{deg_d, deg_t});
        return it == coeffs_.end() ? ring_traits<R>::zero() : it->second;
    }

    /// -1 for the zero polynomial.
    int total_degree() const {
        int deg = -1;
        for (const auto& [key, c] : coeffs_)
            deg = std::max(deg, key.first + key.second);
        return deg;
    }

    int min_d_degree() const {
        int m = -1;
        for (const auto& [key, c] : coeffs_)
            m = m < 0 ? key.first : std::min(m, key.first);
        return m;
    }

    double max_log_abs_coeff() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& [key, c] : coeffs_)
            m = std::max(m, ring_traits<R>::log_abs(c));
        return m;
    }

    friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) {
        return a.coeffs_ == b.coeffs_;
    }

private:
    Coeffs coeffs_;
};

template <CoefficientRing R>
BivariatePoly<R> add(const BivariatePoly<R>& a, const BivariatePoly<R>& b) {
    BivariatePoly<R> out = a;
    for (const auto& [key, c] : b.coeffs())
        out.accumulate(key.first, key.second, c);
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> negate(const BivariatePoly<R>& a) {
    BivariatePoly<R> out;
    for (const auto& [key, c] : a.coeffs())
        out.set(key.first, key.second, -c);
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> sub(const BivariatePoly<R>& a, const BivariatePoly<R>& b) {
    return add(a, negate(b));
}

template <CoefficientRing R>
BivariatePoly<R> mul(const BivariatePoly<R>& a, const BivariatePoly<R>& b) {
    BivariatePoly<R> out;
    for (const auto& [ka, ca] : a.coeffs())
        for (const auto& [kb, cb] : b.coeffs())
            out.accumulate(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> scale(const BivariatePoly<R>& a, const R& c) {
    BivariatePoly<R> out;
    if (ring_traits<R>::is_zero(c))
        return out;
    for (const auto& [key, v] : a.coeffs())
        out.set(key.first, key.second, v * c);
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> operator+(const BivariatePoly<R>& a, const BivariatePoly<R>& b) { return add(a, b); }
template <CoefficientRing R>
BivariatePoly<R> operator-(const BivariatePoly<R>& a, const BivariatePoly<R>& b) { return sub(a, b); }
template <CoefficientRing R>
BivariatePoly<R> operator*(const BivariatePoly<R>& a, const BivariatePoly<R>& b) { return mul(a, b); }
template <CoefficientRing R>
BivariatePoly<R> operator-(const BivariatePoly<R>& a) { return negate(a); }

template <CoefficientRing R>
BivariatePoly<R> diff_d(const BivariatePoly<R>& a) {
    BivariatePoly<R> out;
    for (const auto& [key, c] : a.coeffs())
        if (key.first >= 1)
            out.accumulate(key.first - 1, key.second, c * ring_traits<R>::from_long(key.first));
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> diff_t(const BivariatePoly<R>& a) {
    BivariatePoly<R> out;
    for (const auto& [key, c] : a.coeffs())
        if (key.second >= 1)
            out.accumulate(key.first, key.second - 1, c * ring_traits<R>::from_long(key.second));
    return out;
}

template <CoefficientRing R>
BivariatePoly<R> mul_pow_d(const BivariatePoly<R>& a, int p) {
    BivariatePoly<R> out;
    for (const auto& [key, c] : a.coeffs())
        out.set(key.first + p, key.second, c);
    return out;
}

template <CoefficientRing R>
bool divisible_by_d_pow(const BivariatePoly<R>& a, int p) {
    return a.is_zero() || a.min_d_degree() >= p;
}

/// Exact division by d; throws if a d-free term is present.
template <CoefficientRing R>
BivariatePoly<R> divide_by_d(const BivariatePoly<R>& a) {
    BivariatePoly<R> out;
    for (const auto& [key, c] : a.coeffs()) {
        if (key.first == 0)
            throw SeriesDomainError("polynomial not divisible by d (term d^0 t^" +
                                    std::to_string(key.second) + ")");
        out.set(key.first - 1, key.second, c);
    }
    return out;
}

// BivariatePoly over a ring is itself a coefficient ring (used for
// polynomial-valued series, e.g. the counterexample's s-series).
template <CoefficientRing R>
struct ring_traits<BivariatePoly<R>> {
    static constexpr bool exact             = ring_traits<R>::exact;
    static constexpr bool has_log_constants = false;

    static BivariatePoly<R> zero() { return BivariatePoly<R>(); }
    static BivariatePoly<R> one() { return BivariatePoly<R>::constant(ring_traits<R>::one()); }
    static BivariatePoly<R> from_long(long v) {
        return v == 0 ? BivariatePoly<R>() : BivariatePoly<R>::constant(ring_traits<R>::from_long(v));
    }
    static BivariatePoly<R> from_rational(const Rational& q) {
        auto c = ring_traits<R>::from_rational(q);
        return ring_traits<R>::is_zero(c) ? BivariatePoly<R>() : BivariatePoly<R>::constant(c);
    }
    static bool is_zero(const BivariatePoly<R>& v) { return v.is_zero(); }
    static double to_double(const BivariatePoly<R>& v) {
        // magnitude proxy: the largest coefficient
        double m = 0.0;
        for (const auto& [key, c] : v.coeffs())
            m = std::max(m, std::abs(ring_traits<R>::to_double(c)));
        return m;
    }
    static double log_abs(const BivariatePoly<R>& v) { return v.max_log_abs_coeff(); }
};

} // namespace polyhom
