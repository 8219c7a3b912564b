#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <polyhom/bivariate.hpp>
#include <polyhom/cma.hpp>
#include <polyhom/counterexample.hpp>
#include <polyhom/diagnostics.hpp>
#include <polyhom/fuchsian.hpp>
#include <polyhom/oracle.hpp>
#include <polyhom/series.hpp>

namespace polyhom::io {

using nlohmann::json;

/// Shortest round-trip decimal form; locale-independent and stable across
/// runs, which the byte-determinism contract relies on.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// --- coefficient encoding -------------------------------------------------

inline json coeff_to_json(const Rational& c) { return rational_to_string(c); }
inline json coeff_to_json(double c) { return c; }

inline void coeff_from_json(const json& j, Rational& out) {
    if (!j.is_string())
        throw ConfigError("exact series expects rational coefficients as \"p/q\" strings");
    out = parse_rational(j.get<std::string>());
}

inline void coeff_from_json(const json& j, double& out) {
    if (j.is_string())
        out = to_double(parse_rational(j.get<std::string>()));
    else if (j.is_number())
        out = j.get<double>();
    else
        throw ConfigError("bad coefficient in series JSON");
}

// --- series ----------------------------------------------------------------

template <CoefficientRing R>
json series_to_json(const PolyhomSeries<R>& s) {
    json terms = json::array();
    for (const auto& [key, c] : s.terms())
        terms.push_back({{"i", key.first}, {"j", key.second}, {"c", coeff_to_json(c)}});
    return json{{"variable", var_name(s.var())}, {"trunc", s.trunc_order()}, {"terms", terms}};
}

template <CoefficientRing R>
PolyhomSeries<R> series_from_json(const json& j) {
    const std::string v = j.at("variable").get<std::string>();
    if (v != "d" && v != "t")
        throw ConfigError("variable must be \"d\" or \"t\"");
    PolyhomSeries<R> s(v == "d" ? Var::d : Var::t, j.at("trunc").get<int>());
    for (const auto& term : j.at("terms")) {
        R c = ring_traits<R>::zero();
        coeff_from_json(term.at("c"), c);
        s.set(term.at("i").get<int>(), term.at("j").get<int>(), std::move(c));
    }
    return s;
}

template <CoefficientRing R>
std::string series_to_csv(const PolyhomSeries<R>& s) {
    std::string out = "i,j,coefficient\n";
    for (const auto& [key, c] : s.terms()) {
        out += std::to_string(key.first) + "," + std::to_string(key.second) + ",";
        if constexpr (std::is_same_v<R, double>)
            out += format_double(c);
        else
            out += rational_to_string(c);
        out += "\n";
    }
    return out;
}

/// Per-power coefficient norms of a series: norm_i = max_j |c_{i,j}|.
/// This is the sequence the growth diagnostics consume.
template <CoefficientRing R>
std::vector<std::pair<int, double>> coefficient_norms(const PolyhomSeries<R>& s) {
    std::map<int, double> by_power;
    for (const auto& [key, c] : s.terms()) {
        double& slot = by_power[key.first];
        slot         = std::max(slot, std::abs(ring_traits<R>::to_double(c)));
    }
    return {by_power.begin(), by_power.end()};
}

// --- bivariate / counterexample ---------------------------------------------

template <CoefficientRing R>
json bivariate_to_json(const BivariatePoly<R>& p) {
    json terms = json::array();
    for (const auto& [key, c] : p.coeffs())
        terms.push_back({{"dd", key.first}, {"dt", key.second}, {"c", coeff_to_json(c)}});
    return terms;
}

template <CoefficientRing R>
BivariatePoly<R> bivariate_from_json(const json& j) {
    BivariatePoly<R> p;
    for (const auto& term : j) {
        R c = ring_traits<R>::zero();
        coeff_from_json(term.at("c"), c);
        p.set(term.at("dd").get<int>(), term.at("dt").get<int>(), std::move(c));
    }
    return p;
}

inline json cex_to_json(const CexState& st) {
    json a = json::array();
    for (const auto& ak : st.a)
        a.push_back(bivariate_to_json(ak));
    return json{{"n", st.n},
                {"kmax", st.kmax},
                {"seed", bivariate_to_json(st.seed_w)},
                {"a", a}};
}

inline CexState cex_from_json(const json& j) {
    CexState st;
    st.n      = j.at("n").get<int>();
    st.kmax   = j.at("kmax").get<int>();
    st.seed_w = bivariate_from_json<Rational>(j.at("seed"));
    for (const auto& ak : j.at("a"))
        st.a.push_back(bivariate_from_json<Rational>(ak));
    return st;
}

/// Norm sequence of a counterexample state: per k, the largest
/// coefficient magnitude of a_k.
inline std::vector<std::pair<int, double>> coefficient_norms(const CexState& st) {
    std::vector<std::pair<int, double>> out;
    for (int k = 0; k <= st.kmax; ++k) {
        double m = 0.0;
        for (const auto& [key, c] : st.a[k].coeffs())
            m = std::max(m, std::abs(to_double(c)));
        out.emplace_back(k, m);
    }
    return out;
}

// --- reports -----------------------------------------------------------------

inline json ball_report_to_json(const BallBenchmarkReport& rep) {
    json grid = json::array(), residuals = json::array();
    for (double g : rep.grid)
        grid.push_back(g);
    for (double r : rep.residuals)
        residuals.push_back(r);
    return json{{"n", rep.n},
                {"K", rep.K},
                {"grid", grid},
                {"residuals", residuals},
                {"max_pointwise_residual", rep.max_pointwise_residual},
                {"expansion_zero", rep.expansion_zero},
                {"expansion_coeff_max", rep.expansion_coeff_max},
                {"c_n1_log", rational_to_string(rep.c_n1_log)}};
}

inline json growth_fit_to_json(const GrowthFit& fit) {
    json j{{"gevrey_order", fit.gevrey_order},
           {"log_scale", fit.log_scale},
           {"fit_residual", fit.fit_residual},
           {"classification", growth_class_name(fit.classification)}};
    j["radius_estimate"] = fit.radius_estimate ? json(*fit.radius_estimate) : json(nullptr);
    return j;
}

// --- CSV ----------------------------------------------------------------------

inline std::string norms_to_csv(const std::vector<std::pair<int, double>>& norms) {
    std::string out = "k,norm\n";
    for (const auto& [k, v] : norms)
        out += std::to_string(k) + "," + format_double(v) + "\n";
    return out;
}

/// Reads (k, norm) rows; a header line is skipped if present.
inline std::vector<std::pair<int, double>> norms_from_csv(std::istream& in) {
    std::vector<std::pair<int, double>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int k;
        double v;
        if (row >> k >> v)
            out.emplace_back(k, v);
    }
    if (out.empty())
        throw ConfigError("no (k, norm) rows found in CSV input");
    return out;
}

inline std::string ledger_to_csv(const std::vector<double>& ledger) {
    std::string out = "k,log_max_coeff\n";
    for (std::size_t k = 0; k < ledger.size(); ++k) {
        out += std::to_string(k) + ",";
        if (std::isinf(ledger[k]) && ledger[k] < 0)
            out += "-inf";
        else
            out += format_double(ledger[k]);
        out += "\n";
    }
    return out;
}

inline std::string grid_solution_to_csv(const GridSolution& sol) {
    std::string out = "t,v\n";
    for (std::size_t i = 0; i < sol.t.size(); ++i)
        out += format_double(sol.t[i]) + "," + format_double(sol.v[i]) + "\n";
    return out;
}

// --- problem config -------------------------------------------------------------

/// Line-oriented key=value problem description. Keys:
///   n, K, forcing.<i>.<j>=rational, perturb.C1.<i>=rational,
///   perturb.Cd.<i>=rational, free.<m>=rational, nonlinearity=none|model.
/// '#' starts a comment.
struct ProblemSpec {
    int n = 2;
    int K = 8;
    std::map<std::pair<int, int>, Rational> forcing;
    std::map<int, Rational> perturb_c1;
    std::map<int, Rational> perturb_cd;
    std::map<int, Rational> free_params;
    bool model_nonlinearity = false;
};

namespace detail {
    inline int parse_index(std::string_view s, const std::string& key) {
        int v          = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
            throw ConfigError("bad index in config key: " + key);
        return v;
    }
} // namespace detail

inline ProblemSpec problem_spec_from_config(std::istream& in) {
    ProblemSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        const auto e = line.find_last_not_of(" \t\r");
        line         = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);

        if (key == "n")
            spec.n = detail::parse_index(val, key);
        else if (key == "K")
            spec.K = detail::parse_index(val, key);
        else if (key == "nonlinearity") {
            if (val == "model")
                spec.model_nonlinearity = true;
            else if (val == "none")
                spec.model_nonlinearity = false;
            else
                throw ConfigError("nonlinearity must be none or model");
        } else if (key.starts_with("forcing.")) {
            const auto rest = key.substr(8);
            const auto dot  = rest.find('.');
            if (dot == std::string::npos)
                throw ConfigError("forcing key needs forcing.<i>.<j>: " + key);
            spec.forcing[{detail::parse_index(rest.substr(0, dot), key),
                          detail::parse_index(rest.substr(dot + 1), key)}] = parse_rational(val);
        } else if (key.starts_with("perturb.C1."))
            spec.perturb_c1[detail::parse_index(key.substr(11), key)] = parse_rational(val);
        else if (key.starts_with("perturb.Cd."))
            spec.perturb_cd[detail::parse_index(key.substr(11), key)] = parse_rational(val);
        else if (key.starts_with("free."))
            spec.free_params[detail::parse_index(key.substr(5), key)] = parse_rational(val);
        else
            throw ConfigError("unknown config key: " + key);
    }
    return spec;
}

inline FuchsianProblem<Rational> build_problem(const ProblemSpec& spec, Var form = Var::d) {
    if (form == Var::t && !(spec.perturb_c1.empty() && spec.perturb_cd.empty()))
        throw ConfigError("perturb.C1/perturb.Cd keys apply to the d-form problem");
    auto p = assemble_model<Rational>(spec.n,
                                      form == Var::d ? ModelForm::d_form : ModelForm::t_form,
                                      PolyhomSeries<Rational>::zero(Var::d, 0),
                                      PolyhomSeries<Rational>::zero(Var::d, 0),
                                      /*with_nonlinearity=*/false);
    auto poly = [&](const std::map<int, Rational>& terms) {
        int maxdeg = 0;
        for (const auto& [i, c] : terms)
            maxdeg = std::max(maxdeg, i);
        PolyhomSeries<Rational> s(form, maxdeg);
        for (const auto& [i, c] : terms)
            s.set(i, 0, c);
        return s;
    };
    PolyhomSeries<Rational> forcing(form, spec.K);
    for (const auto& [key, c] : spec.forcing) {
        if (key.first > spec.K)
            continue;
        forcing.set(key.first, key.second, c);
    }
    p.forcing     = std::move(forcing);
    p.perturb_c1  = poly(spec.perturb_c1);
    p.perturb_cd  = poly(spec.perturb_cd);
    p.free_params = spec.free_params;
    if (spec.model_nonlinearity) {
        if (form != Var::d)
            throw ConfigError("the model nonlinearity applies to the d-form problem");
        p.nonlinearity = model_nonlinearity<Rational>(spec.n, p.perturb_c1, p.perturb_cd);
    }
    return p;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace polyhom::io
