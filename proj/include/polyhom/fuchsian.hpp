#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <polyhom/series.hpp>

namespace polyhom {

/// Indicial data of the Euler-type leading operator
///     L[v] = x^2 v'' + a1 x v' + a0 v :
/// substituting x^s gives the quadratic P(s) = s(s-1) + a1 s + a0 whose
/// roots are the characteristic exponents.
struct IndicialData {
    enum class RootKind { rational_pair, rational_double, real_pair, complex_pair };

    Rational a1;
    Rational a0;
    RootKind kind = RootKind::complex_pair;
    std::optional<Rational> root1, root2; // exact, when rational (root1 >= root2)
    double froot1 = 0.0, froot2 = 0.0;    // float values for real roots

    Rational P(const Rational& s) const { return s * (s - 1) + a1 * s + a0; }
    Rational Pprime(const Rational& s) const { return 2 * s + a1 - 1; }

    /// Nonnegative integer roots up to K: the resonant expansion orders.
    std::vector<int> resonant_orders(int K) const {
        std::vector<int> out;
        for (const auto& r : {root1, root2}) {
            if (!r || denominator(*r) != 1 || *r < 0 || *r > K)
                continue;
            const int m = static_cast<int>(numerator(*r).template convert_to<long>());
            if (out.empty() || out.back() != m)
                out.push_back(m);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Exact root classification of s(s-1) + a1 s + a0.
inline IndicialData indicial(const Rational& a1, const Rational& a0) {
    IndicialData ind;
    ind.a1 = a1;
    ind.a0 = a0;
    const Rational b    = a1 - 1; // P(s) = s^2 + b s + a0
    const Rational disc = b * b - 4 * a0;
    if (disc < 0) {
        ind.kind = IndicialData::RootKind::complex_pair;
        return ind;
    }
    if (disc == 0) {
        ind.kind  = IndicialData::RootKind::rational_double;
        ind.root1 = ind.root2 = -b / 2;
        ind.froot1 = ind.froot2 = to_double(*ind.root1);
        return ind;
    }
    // disc = p/q > 0 is a rational square iff p and q are integer squares
    const BigInt p = numerator(disc), q = denominator(disc);
    const BigInt sp = sqrt(p), sq = sqrt(q);
    if (sp * sp == p && sq * sq == q) {
        const Rational sroot(sp, sq);
        ind.kind  = IndicialData::RootKind::rational_pair;
        ind.root1 = (-b + sroot) / 2;
        ind.root2 = (-b - sroot) / 2;
        ind.froot1 = to_double(*ind.root1);
        ind.froot2 = to_double(*ind.root2);
    } else {
        ind.kind   = IndicialData::RootKind::real_pair;
        const double fb = to_double(b), fd = std::sqrt(to_double(disc));
        ind.froot1 = (-fb + fd) / 2;
        ind.froot2 = (-fb - fd) / 2;
    }
    return ind;
}

/// Scalar Fuchsian model problem
///     x^2 (1 + C1 x) v'' + (a1 x + Cd x^2) v' + a0 v - F2(v) = forcing,
/// with analytic perturbation coefficients C1, Cd (log-free), a
/// polyhomogeneous forcing, and an optional nonlinearity program F2 built
/// from series primitives. F2 must vanish to second order in v: its
/// contribution from an order-m increment lands strictly beyond order m,
/// which is what makes the order-by-order solve well founded.
///
/// The coefficient series are exact polynomial data; solvers re-pin their
/// truncation order as needed. Resonant plain-power coefficients are
/// nonlocal data and enter through free_params (default 0).
template <CoefficientField R>
struct FuchsianProblem {
    int n = 2;
    Var var = Var::d;
    IndicialData ind;
    PolyhomSeries<R> perturb_c1{Var::d, 0};
    PolyhomSeries<R> perturb_cd{Var::d, 0};
    PolyhomSeries<R> forcing{Var::d, 0};
    std::function<PolyhomSeries<R>(const PolyhomSeries<R>&)> nonlinearity; // empty = none
    std::map<int, Rational> free_params;

    void validate() const {
        for (const auto* s : {&perturb_c1, &perturb_cd})
            for (const auto& [key, c] : s->terms())
                if (key.second != 0)
                    throw SeriesDomainError("perturbation coefficients must be log-free");
    }
};

template <CoefficientField R>
FuchsianProblem<R> linear_problem(int n, Var var, const IndicialData& ind,
                                  PolyhomSeries<R> forcing) {
    FuchsianProblem<R> p;
    p.n       = n;
    p.var     = var;
    p.ind     = ind;
    p.forcing = std::move(forcing);
    p.perturb_c1 = PolyhomSeries<R>::zero(var, 0);
    p.perturb_cd = PolyhomSeries<R>::zero(var, 0);
    return p;
}

/// The linear part including perturbations, via Euler operators
/// (x^2 v'' = E^2 v - E v with E = x d/dx), so it is total on the
/// log-power class:
///     x^2(1 + C1 x) v'' + (a1 x + Cd x^2) v' + a0 v.
template <CoefficientField R>
PolyhomSeries<R> apply_linear_part(const FuchsianProblem<R>& p, const PolyhomSeries<R>& v) {
    const int K  = v.trunc_order();
    const auto Ev  = euler(v);
    const auto EEv = euler(Ev);
    // E^2 + (a1 - 1) E + a0
    auto out = add(EEv, scale(Ev, ring_traits<R>::from_rational(p.ind.a1 - 1)));
    out      = add(out, scale(v, ring_traits<R>::from_rational(p.ind.a0)));
    if (!p.perturb_c1.is_zero() || !p.perturb_cd.is_zero()) {
        const auto x = PolyhomSeries<R>::monomial(v.var(), K, 1, 0, ring_traits<R>::one());
        if (!p.perturb_c1.is_zero())
            out = add(out, mul(mul(x, p.perturb_c1.truncated_to(K)), sub(EEv, Ev)));
        if (!p.perturb_cd.is_zero())
            out = add(out, mul(mul(x, p.perturb_cd.truncated_to(K)), Ev));
    }
    return out;
}

/// Full residual operator: linear part minus nonlinearity minus forcing.
/// A solved expansion E has apply_operator(p, E) vanishing through its
/// truncation order.
template <CoefficientField R>
PolyhomSeries<R> apply_operator(const FuchsianProblem<R>& p, const PolyhomSeries<R>& v) {
    auto out = apply_linear_part(p, v);
    if (p.nonlinearity)
        out = sub(out, p.nonlinearity(v));
    return sub(out, p.forcing.truncated_to(v.trunc_order()));
}

template <CoefficientField R>
struct ExpansionResult {
    PolyhomSeries<R> expansion;
    std::optional<int> log_birth_order; // first power carrying a log
    std::map<int, int> N;               // emergent log-degree profile
    int residual_ord = 0;
};

namespace detail {

    // Order-m slice of the residual as a ladder in the log-degree.
    template <CoefficientField R>
    std::map<int, R> order_slice(const PolyhomSeries<R>& s, int m) {
        std::map<int, R> slice;
        for (const auto& [key, c] : s.terms())
            if (key.first == m)
                slice[key.second] = c;
        return slice;
    }

} // namespace detail

/// Order-by-order polyhomogeneous solve: at each order m the residual of
/// the current partial expansion is cancelled by new d^m (log d)^j terms.
/// The single-term identities
///     L[x^m log^j x] = P(m) x^m log^j x + j P'(m) x^m log^{j-1} x
///                      + j(j-1) x^m log^{j-2} x
/// make the order-m correction lower-triangular in j with diagonal P(m);
/// the ladder is solved from the highest log-degree downward. At a
/// resonant order (P(m) = 0, simple root) the residual is absorbed one
/// log-degree up through P'(m), and the plain x^m coefficient is the free
/// nonlocal parameter.
template <CoefficientField R>
ExpansionResult<R> solve_polyhom(const FuchsianProblem<R>& p, int K,
                                 const std::map<int, Rational>& free = {}) {
    p.validate();
    const auto resonances = p.ind.resonant_orders(K);
    if (p.ind.kind == IndicialData::RootKind::rational_double && !resonances.empty())
        throw ResonanceError("double indicial root at order " + std::to_string(resonances.front()) +
                             ": the simple-resonance ladder does not apply");

    auto free_value = [&](int m) -> Rational {
        if (auto it = free.find(m); it != free.end())
            return it->second;
        if (auto it = p.free_params.find(m); it != p.free_params.end())
            return it->second;
        return Rational(0);
    };

    auto E = PolyhomSeries<R>::zero(p.var, K);
    for (int m = 0; m <= K; ++m) {
        const auto residual = apply_operator(p, E);
        auto slice          = detail::order_slice(residual, m);
        const bool resonant = std::find(resonances.begin(), resonances.end(), m) != resonances.end();
        const R Pm  = ring_traits<R>::from_rational(p.ind.P(m));
        const R Ppm = ring_traits<R>::from_rational(p.ind.Pprime(m));

        std::map<int, R> c; // new coefficients at order m, by log-degree
        int J = -1;
        for (const auto& [j, v] : slice)
            J = std::max(J, j);

        if (!resonant) {
            for (int j = J; j >= 0; --j) {
                R rhs = slice.count(j) ? -slice[j] : ring_traits<R>::zero();
                if (c.count(j + 1))
                    rhs = rhs - ring_traits<R>::from_long(j + 1) * Ppm * c[j + 1];
                if (c.count(j + 2))
                    rhs = rhs - ring_traits<R>::from_long((j + 2) * (j + 1)) * c[j + 2];
                if (!ring_traits<R>::is_zero(rhs))
                    c[j] = rhs / Pm;
            }
        } else {
            // P(m) = 0: the log^j equation determines c_{j+1}.
            for (int j = J; j >= 0; --j) {
                R rhs = slice.count(j) ? -slice[j] : ring_traits<R>::zero();
                if (c.count(j + 2))
                    rhs = rhs - ring_traits<R>::from_long((j + 2) * (j + 1)) * c[j + 2];
                if (!ring_traits<R>::is_zero(rhs))
                    c[j + 1] = rhs / (ring_traits<R>::from_long(j + 1) * Ppm);
            }
            const R cfree = ring_traits<R>::from_rational(free_value(m));
            if (!ring_traits<R>::is_zero(cfree))
                c[0] = cfree;
        }
        for (const auto& [j, v] : c)
            E.accumulate(m, j, v);

        // the increment must not feed back at or below its own order
        // (decidable in the exact ring; roundoff masks it elsewhere)
        if constexpr (ring_traits<R>::exact) {
            if (!detail::order_slice(apply_operator(p, E), m).empty())
                throw NumericError("nonlinearity fed back at order " + std::to_string(m) +
                                   "; it does not vanish to second order");
        }
    }

    ExpansionResult<R> out{std::move(E), std::nullopt, {}, 0};
    out.N = out.expansion.log_profile();
    for (const auto& [i, Ni] : out.N)
        if (Ni >= 1 && !out.log_birth_order) {
            out.log_birth_order = i;
            break;
        }
    const auto final_residual = apply_operator(p, out.expansion);
    if constexpr (ring_traits<R>::exact) {
        out.residual_ord = residual_order(final_residual);
        if (out.residual_ord < K + 1)
            throw InternalCheckError("solver left a residual at order " +
                                     std::to_string(out.residual_ord));
    } else {
        // first order standing above the roundoff floor
        const double floor = 1e-10 * std::max(1.0, out.expansion.max_abs_coeff());
        out.residual_ord   = K + 1;
        for (const auto& [key, c] : final_residual.terms())
            if (std::abs(ring_traits<R>::to_double(c)) > floor)
                out.residual_ord = std::min(out.residual_ord, key.first);
    }
    return out;
}

/// Round-trip check: the order through which E annihilates the operator.
template <CoefficientField R>
int verify_expansion(const FuchsianProblem<R>& p, const PolyhomSeries<R>& E, int K) {
    return residual_order(apply_operator(p, E.truncated_to(K)));
}

} // namespace polyhom
