#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <polyhom/errors.hpp>
#include <polyhom/ring.hpp>

namespace polyhom {

/// Boundary variable of a series: the distance d, or t with d = t^2/2.
enum class Var : unsigned char { d, t };

inline const char* var_name(Var v) { return v == Var::d ? "d" : "t"; }

/// One-variable log-power series truncated at a fixed order:
///     sum over stored (i, j) of  c_{i,j} * x^i * (log x)^j,
/// where terms with power i > trunc_order() are unrepresented. Canonical
/// form: no zero coefficient is stored. Terms with i = 0 and j >= 1 are
/// singular at the boundary and banned at construction.
///
/// Values are immutable in spirit: every operation returns a new series.
template <CoefficientRing R>
class PolyhomSeries {
public:
    using Key   = std::pair<int, int>; // (power i, log-degree j)
    using Terms = std::map<Key, R>;

    PolyhomSeries(Var var, int trunc) : var_(var), trunc_(trunc) {
        if (trunc < 0)
            throw SeriesDomainError("negative truncation order");
    }

    static PolyhomSeries zero(Var var, int trunc) { return PolyhomSeries(var, trunc); }

    static PolyhomSeries monomial(Var var, int trunc, int i, int j, R c) {
        PolyhomSeries s(var, trunc);
        s.set(i, j, std::move(c));
        return s;
    }

    static PolyhomSeries constant(Var var, int trunc, R c) {
        return monomial(var, trunc, 0, 0, std::move(c));
    }

    Var var() const { return var_; }
    int trunc_order() const { return trunc_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Replaces the coefficient at (i, j); zero erases.
    void set(int i, int j, R c) {
        validate_key(i, j);
        if (i > trunc_)
            throw SeriesDomainError("power " + std::to_string(i) + " exceeds truncation order " +
                                    std::to_string(trunc_));
        if (ring_traits<R>::is_zero(c))
            terms_.erase(Key{i, j});
        else
            terms_[Key{i, j}] = std::move(c);
    }

    /// Accumulates into (i, j), silently dropping powers beyond the
    /// truncation order. Used by the arithmetic kernels.
    void accumulate(int i, int j, const R& c) {
        if (i > trunc_)
            return;
        validate_key(i, j);
        auto it = terms_.find(Key{i, j});
        if (it == terms_.end()) {
            if (!ring_traits<R>::is_zero(c))
                terms_.emplace(Key{i, j}, c);
            return;
        }
        it->second = it->second + c;
        if (ring_traits<R>::is_zero(it->second))
            terms_.erase(it);
    }

    R coeff(int i, int j) const {
        auto it = terms_.find(Key{i, j});
        return it == terms_.end() ? ring_traits<R>::zero() : it->second;
    }

    bool has_term(int i, int j) const { return terms_.contains(Key{i, j}); }

    /// Same terms re-homed at truncation order K. Terms above K are
    /// dropped. Extending K > trunc_order() asserts the series is exactly
    /// known beyond its old truncation (true for polynomial data).
    PolyhomSeries truncated_to(int K) const {
        PolyhomSeries out(var_, K);
        for (const auto& [key, c] : terms_)
            if (key.first <= K)
                out.terms_.emplace(key, c);
        return out;
    }

    /// Smallest stored power, or trunc_order()+1 for the zero series
    /// ("vanishes through truncation").
    int residual_order() const {
        if (terms_.empty())
            return trunc_ + 1;
        return terms_.begin()->first.first;
    }

    /// N_i bookkeeping: for each power i present, the largest log-degree.
    std::map<int, int> log_profile() const {
        std::map<int, int> prof;
        for (const auto& [key, c] : terms_) {
            auto [it, inserted] = prof.emplace(key.first, key.second);
            if (!inserted)
                it->second = std::max(it->second, key.second);
        }
        return prof;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [key, c] : terms_)
            m = std::max(m, std::abs(ring_traits<R>::to_double(c)));
        return m;
    }

    friend bool operator==(const PolyhomSeries& a, const PolyhomSeries& b) {
        return a.var_ == b.var_ && a.terms_ == b.terms_;
    }

private:
    static void validate_key(int i, int j) {
        if (i < 0 || j < 0)
            throw SeriesDomainError("negative exponent in series term");
        if (i == 0 && j > 0)
            throw SeriesDomainError("term x^0 (log x)^" + std::to_string(j) +
                                    " is singular at the boundary");
    }

    Terms terms_;
    Var var_;
    int trunc_;
};

namespace detail {
    template <CoefficientRing R>
    void require_same_var(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) {
        if (a.var() != b.var())
            throw VariableMismatchError(std::string("variable tags differ: ") + var_name(a.var()) +
                                        " vs " + var_name(b.var()));
    }
} // namespace detail

template <CoefficientRing R>
PolyhomSeries<R> add(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) {
    detail::require_same_var(a, b);
    const int K = std::min(a.trunc_order(), b.trunc_order());
    PolyhomSeries<R> out(a.var(), K);
    for (const auto& [key, c] : a.terms())
        out.accumulate(key.first, key.second, c);
    for (const auto& [key, c] : b.terms())
        out.accumulate(key.first, key.second, c);
    return out;
}

template <CoefficientRing R>
PolyhomSeries<R> negate(const PolyhomSeries<R>& a) {
    PolyhomSeries<R> out(a.var(), a.trunc_order());
    for (const auto& [key, c] : a.terms())
        out.set(key.first, key.second, -c);
    return out;
}

template <CoefficientRing R>
PolyhomSeries<R> sub(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) {
    return add(a, negate(b));
}

/// Truncated product: powers add, log-degrees add, result truncated at
/// min(trunc_a, trunc_b).
template <CoefficientRing R>
PolyhomSeries<R> mul(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) {
    detail::require_same_var(a, b);
    const int K = std::min(a.trunc_order(), b.trunc_order());
    PolyhomSeries<R> out(a.var(), K);
    for (const auto& [ka, ca] : a.terms()) {
        if (ka.first > K)
            continue;
        for (const auto& [kb, cb] : b.terms()) {
            const int i = ka.first + kb.first;
            if (i > K)
                continue;
            out.accumulate(i, ka.second + kb.second, ca * cb);
        }
    }
    return out;
}

template <CoefficientRing R>
PolyhomSeries<R> scale(const PolyhomSeries<R>& a, const R& c) {
    PolyhomSeries<R> out(a.var(), a.trunc_order());
    if (ring_traits<R>::is_zero(c))
        return out;
    for (const auto& [key, v] : a.terms())
        out.set(key.first, key.second, v * c);
    return out;
}

template <CoefficientRing R>
PolyhomSeries<R> operator+(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) { return add(a, b); }
template <CoefficientRing R>
PolyhomSeries<R> operator-(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) { return sub(a, b); }
template <CoefficientRing R>
PolyhomSeries<R> operator*(const PolyhomSeries<R>& a, const PolyhomSeries<R>& b) { return mul(a, b); }
template <CoefficientRing R>
PolyhomSeries<R> operator-(const PolyhomSeries<R>& a) { return negate(a); }

/// d/dx. The term c x^i (log x)^j maps to
///     c i x^{i-1} (log x)^j + c j x^{i-1} (log x)^{j-1}.
/// Terms with i = 1 and j >= 1 would land on the banned x^0 log powers and
/// are rejected. The truncation order drops by one.
template <CoefficientRing R>
PolyhomSeries<R> ddx(const PolyhomSeries<R>& a) {
    PolyhomSeries<R> out(a.var(), std::max(a.trunc_order() - 1, 0));
    for (const auto& [key, c] : a.terms()) {
        const auto [i, j] = key;
        if (i == 0)
            continue; // constants; (0, j>0) cannot be stored
        if (i == 1 && j >= 1)
            throw SeriesDomainError("derivative of x (log x)^" + std::to_string(j) +
                                    " leaves the representable class");
        out.accumulate(i - 1, j, c * ring_traits<R>::from_long(i));
        if (j >= 1)
            out.accumulate(i - 1, j - 1, c * ring_traits<R>::from_long(j));
    }
    return out;
}

/// Euler operator x d/dx; total on the representable class and
/// truncation-preserving. This is the derivative the Fuchsian operators
/// are built from.
template <CoefficientRing R>
PolyhomSeries<R> euler(const PolyhomSeries<R>& a) {
    PolyhomSeries<R> out(a.var(), a.trunc_order());
    for (const auto& [key, c] : a.terms()) {
        const auto [i, j] = key;
        if (i > 0)
            out.accumulate(i, j, c * ring_traits<R>::from_long(i));
        if (j >= 1)
            out.accumulate(i, j - 1, c * ring_traits<R>::from_long(j));
    }
    return out;
}

/// Change of variable d = t^2/2, log d = 2 log t - log 2:
///     c d^i (log d)^j  ->  sum_{l<=j} c 2^{-i} C(j,l) 2^l (-log 2)^{j-l}
///                                     t^{2i} (log t)^l.
/// The truncation order doubles. Log terms need the log 2 constant, which
/// the exact rational ring cannot represent; those inputs are rejected
/// there (keep j = 0 before substituting).
template <CoefficientRing R>
PolyhomSeries<R> substitute_d_to_t(const PolyhomSeries<R>& a) {
    if (a.var() != Var::d)
        throw VariableMismatchError("substitute_d_to_t expects a series in d");
    PolyhomSeries<R> out(Var::t, 2 * a.trunc_order());
    for (const auto& [key, c] : a.terms()) {
        const auto [i, j] = key;
        const R half_pow = ring_traits<R>::from_rational(Rational(1, BigInt(1) << i));
        if (j == 0) {
            out.accumulate(2 * i, 0, c * half_pow);
            continue;
        }
        if constexpr (!ring_traits<R>::has_log_constants) {
            throw RingCapabilityError("log 2 constants from the d -> t substitution are not "
                                      "representable in the exact rational ring");
        } else {
            const R mlog2 = -ring_traits<R>::log_two();
            for (int l = 0; l <= j; ++l) {
                R w = c * half_pow * ring_traits<R>::from_rational(Rational(binomial(j, l) << l));
                for (int p = 0; p < j - l; ++p)
                    w = w * mlog2;
                out.accumulate(2 * i, l, w);
            }
        }
    }
    return out;
}

/// Formal composition sum_m f_m a^m of an analytic f (Taylor coefficients
/// about 0) with a series of strictly positive leading power; truncates
/// finitely because a^m has order >= m. Evaluated by Horner's scheme.
template <CoefficientRing R>
PolyhomSeries<R> compose_analytic(std::span<const R> f, const PolyhomSeries<R>& a) {
    if (a.has_term(0, 0))
        throw SeriesDomainError("compose_analytic needs a series with zero constant term");
    const int K = a.trunc_order();
    const int M = std::min<int>(static_cast<int>(f.size()) - 1, K);
    PolyhomSeries<R> out(a.var(), K);
    if (M < 0)
        return out;
    out.set(0, 0, f[M]);
    for (int m = M - 1; m >= 0; --m) {
        out = mul(out, a);
        out.accumulate(0, 0, f[m]);
    }
    return out;
}

template <CoefficientRing R>
PolyhomSeries<R> compose_analytic(const std::vector<R>& f, const PolyhomSeries<R>& a) {
    return compose_analytic(std::span<const R>(f), a);
}

template <CoefficientRing R>
int residual_order(const PolyhomSeries<R>& a) {
    return a.residual_order();
}

/// Numeric evaluation of the truncated series at x > 0.
template <CoefficientRing R>
double evaluate(const PolyhomSeries<R>& a, double x) {
    double out      = 0.0;
    const double lx = std::log(x);
    for (const auto& [key, c] : a.terms())
        out += ring_traits<R>::to_double(c) * std::pow(x, key.first) * std::pow(lx, key.second);
    return out;
}

} // namespace polyhom
