#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <polyhom/io.hpp>
#include <polyhom/oracle.hpp>

namespace polyhom::cli {

namespace detail {

    inline std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, sep))
            if (!item.empty())
                out.push_back(item);
        return out;
    }

    /// "i:c" or "i.j:c" comma-separated series terms.
    inline std::vector<std::tuple<int, int, Rational>> parse_terms(const std::string& s) {
        std::vector<std::tuple<int, int, Rational>> out;
        for (const auto& item : split(s, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("expected power:coefficient, got: " + item);
            const std::string idx = item.substr(0, colon);
            const auto dot        = idx.find('.');
            const int i = io::detail::parse_index(dot == std::string::npos ? idx : idx.substr(0, dot),
                                                  item);
            const int j = dot == std::string::npos
                              ? 0
                              : io::detail::parse_index(idx.substr(dot + 1), item);
            out.emplace_back(i, j, parse_rational(item.substr(colon + 1)));
        }
        return out;
    }

    /// "m=c" comma-separated assignments.
    inline std::map<int, Rational> parse_assignments(const std::string& s) {
        std::map<int, Rational> out;
        for (const auto& item : split(s, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected order=value, got: " + item);
            out[io::detail::parse_index(item.substr(0, eq), item)] =
                parse_rational(item.substr(eq + 1));
        }
        return out;
    }

    /// Monomial list "d:1", "t^2:3/2", "d^2t^3:5", "1:2" (comma-separated).
    inline BivariatePoly<Rational> parse_bivariate(const std::string& s) {
        BivariatePoly<Rational> out;
        for (const auto& item : split(s, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("expected monomial:coefficient, got: " + item);
            std::string mono = item.substr(0, colon);
            int dd = 0, dt = 0;
            std::size_t pos = 0;
            if (mono == "1") {
                pos = 1;
            } else {
                auto read_power = [&](char var) {
                    int p = 1;
                    ++pos;
                    if (pos < mono.size() && mono[pos] == '^') {
                        ++pos;
                        std::size_t len = 0;
                        p = std::stoi(mono.substr(pos), &len);
                        pos += len;
                    }
                    if (pos < mono.size() && mono[pos] == '*')
                        ++pos;
                    (var == 'd' ? dd : dt) = p;
                };
                if (pos < mono.size() && mono[pos] == 'd')
                    read_power('d');
                if (pos < mono.size() && mono[pos] == 't')
                    read_power('t');
            }
            if (pos != mono.size())
                throw ConfigError("bad monomial: " + mono);
            out.accumulate(dd, dt, parse_rational(item.substr(colon + 1)));
        }
        return out;
    }

    inline std::filesystem::path ensure_dir(const std::string& dir) {
        std::filesystem::path p(dir);
        std::filesystem::create_directories(p);
        return p;
    }

} // namespace detail

struct RunConfig {
    std::string out_dir = ".";
    long seed           = 0; // reserved for randomized experiment batches
};

inline int cmd_expand(const RunConfig& rc, int n, int K, const std::string& forcing,
                      const std::string& free, const std::string& c1, const std::string& cd,
                      const std::string& nonlinearity, const std::string& form,
                      const std::string& config_path, std::ostream& log) {
    io::ProblemSpec spec;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("unreadable config: " + config_path);
        spec = io::problem_spec_from_config(in);
    }
    if (n > 0)
        spec.n = n;
    if (K > 0)
        spec.K = K;
    for (const auto& [i, j, c] : detail::parse_terms(forcing))
        spec.forcing[{i, j}] = c;
    for (const auto& [m, c] : detail::parse_assignments(free))
        spec.free_params[m] = c;
    for (const auto& [i, j, c] : detail::parse_terms(c1))
        spec.perturb_c1[i] = c;
    for (const auto& [i, j, c] : detail::parse_terms(cd))
        spec.perturb_cd[i] = c;
    if (nonlinearity == "model")
        spec.model_nonlinearity = true;
    else if (nonlinearity == "none")
        spec.model_nonlinearity = false;
    else if (!nonlinearity.empty())
        throw ConfigError("--nonlinearity must be none or model");
    const Var var = form == "t" ? Var::t : Var::d;

    auto problem    = io::build_problem(spec, var);
    const auto sol  = solve_polyhom(problem, spec.K);
    const auto dir  = detail::ensure_dir(rc.out_dir);

    io::json j     = io::series_to_json(sol.expansion);
    j["n"]         = spec.n;
    j["K"]         = spec.K;
    j["residual_order"] = sol.residual_ord;
    j["log_birth_order"] =
        sol.log_birth_order ? io::json(*sol.log_birth_order) : io::json(nullptr);
    io::json prof = io::json::object();
    for (const auto& [i, Ni] : sol.N)
        prof[std::to_string(i)] = Ni;
    j["N"]        = prof;
    j["c_n1_log"] = rational_to_string(sol.expansion.coeff(spec.n + 1, 1));
    io::write_file((dir / "expansion.json").string(), j.dump(2) + "\n");
    io::write_file((dir / "expansion.csv").string(), io::series_to_csv(sol.expansion));

    log << "expand: n=" << spec.n << " K=" << spec.K << " residual_order=" << sol.residual_ord
        << " log_birth="
        << (sol.log_birth_order ? std::to_string(*sol.log_birth_order) : std::string("none"))
        << " c_{n+1,1}=" << rational_to_string(sol.expansion.coeff(spec.n + 1, 1)) << "\n";
    return 0;
}

inline int cmd_ball(const RunConfig& rc, int n, int K, int grid_points, double grid_lo,
                    double grid_hi, std::ostream& log) {
    const auto rep = ball_benchmark(n, K, default_ball_grid(grid_points, grid_lo, grid_hi));
    const auto dir = detail::ensure_dir(rc.out_dir);
    io::write_file((dir / "ball_report.json").string(),
                   io::ball_report_to_json(rep).dump(2) + "\n");
    log << "ball: n=" << n << " K=" << K
        << " max_residual=" << io::format_double(rep.max_pointwise_residual)
        << " expansion_zero=" << (rep.expansion_zero ? "true" : "false") << "\n";
    return 0;
}

inline int cmd_cex(const RunConfig& rc, int n, const std::string& seed_poly, int kmax,
                   const std::string& ledger_mode, double bound_c, std::ostream& log) {
    const auto dir = detail::ensure_dir(rc.out_dir);
    if (ledger_mode == "saturating" || ledger_mode == "symbolic") {
        const auto mode = ledger_mode == "saturating" ? LedgerMode::saturating_seed
                                                      : LedgerMode::symbolic_bound;
        const auto ledger = growth_ledger(n, bound_c, kmax, mode);
        io::write_file((dir / "ledger.csv").string(), io::ledger_to_csv(ledger));
        log << "cex ledger: n=" << n << " kmax=" << kmax << " mode=" << ledger_mode
            << " last=" << io::format_double(ledger.back()) << "\n";
        return 0;
    }
    if (!ledger_mode.empty() && ledger_mode != "none")
        throw ConfigError("--ledger must be none, saturating, or symbolic");

    const auto seed = detail::parse_bivariate(seed_poly);
    const auto st   = build_cex_series(n, seed, kmax);
    const auto res  = cex_residual(st);
    int residual_nonzero_below_top = 0;
    for (int k = 0; k < st.kmax; ++k)
        if (!res[k].is_zero())
            ++residual_nonzero_below_top;
    io::json j                       = io::cex_to_json(st);
    j["residual_zero_below_top"]     = residual_nonzero_below_top == 0;
    j["residual_top_zero"]           = res.back().is_zero();
    io::write_file((dir / "cex.json").string(), j.dump(2) + "\n");
    io::write_file((dir / "cex_norms.csv").string(),
                   io::norms_to_csv(io::coefficient_norms(st)));
    log << "cex: n=" << n << " kmax=" << kmax
        << " residual_zero_below_top=" << (residual_nonzero_below_top == 0 ? "true" : "false")
        << " terminated=" << (st.a.back().is_zero() ? "true" : "false") << "\n";
    return 0;
}

inline int cmd_diagnose(const RunConfig& rc, const std::string& input, double sigma_max,
                        double residual_max, std::ostream& log) {
    std::vector<std::pair<int, double>> norms;
    if (input.ends_with(".json")) {
        const auto j = io::json::parse(io::read_file(input));
        if (j.contains("a"))
            norms = io::coefficient_norms(io::cex_from_json(j));
        else
            norms = io::coefficient_norms(io::series_from_json<double>(j));
    } else {
        std::ifstream in(input);
        if (!in)
            throw ConfigError("unreadable input: " + input);
        norms = io::norms_from_csv(in);
    }
    GrowthFitConfig cfg;
    cfg.convergent_sigma_max = sigma_max;
    cfg.residual_max         = residual_max;
    const auto fit           = gevrey_fit(norms, cfg);
    const auto dir           = detail::ensure_dir(rc.out_dir);
    io::json j               = io::growth_fit_to_json(fit);
    io::json jn              = io::json::array();
    for (const auto& [k, v] : norms)
        jn.push_back({{"k", k}, {"norm", v}});
    j["norms"] = jn;
    io::write_file((dir / "growth_fit.json").string(), j.dump(2) + "\n");
    log << "diagnose: classification=" << growth_class_name(fit.classification)
        << " sigma=" << io::format_double(fit.gevrey_order) << "\n";
    return 0;
}

inline int cmd_oracle(const RunConfig& rc, int n, const std::string& f_poly,
                      const std::string& manufactured, double t0, double T, int m,
                      const std::string& fit_basis, std::ostream& log) {
    std::vector<std::pair<int, double>> fterms;
    std::pair<double, double> bc{0.0, 0.0};
    std::optional<std::vector<std::pair<int, double>>> exact;

    if (!manufactured.empty()) {
        // v* = sum c_i t^i; forcing f with t^2 f = L_t[v*] needs min power >= 2
        std::vector<std::pair<int, double>> vstar;
        for (const auto& [i, j, c] : detail::parse_terms(manufactured)) {
            if (j != 0)
                throw ConfigError("manufactured solution must be a plain polynomial in t");
            if (i < 2)
                throw ConfigError("manufactured powers below t^2 give a non-polynomial forcing");
            vstar.emplace_back(i, to_double(c));
        }
        const auto ind = indicial(Rational(-(2 * n - 1)), Rational(-4 * (n + 1)));
        for (const auto& [i, c] : vstar)
            fterms.emplace_back(i - 2, c * to_double(ind.P(i)));
        auto eval = [&](double t) {
            double v = 0.0;
            for (const auto& [i, c] : vstar)
                v += c * std::pow(t, i);
            return v;
        };
        bc    = {eval(t0), eval(T)};
        exact = vstar;
    } else {
        for (const auto& [i, j, c] : detail::parse_terms(f_poly)) {
            if (j != 0)
                throw ConfigError("forcing polynomial must be log-free");
            fterms.emplace_back(i, to_double(c));
        }
    }

    auto f = [&fterms](double t) {
        double v = 0.0;
        for (const auto& [i, c] : fterms)
            v += c * std::pow(t, i);
        return v;
    };
    const auto sol = solve_bvp(n, f, t0, T, m, bc);
    const auto dir = detail::ensure_dir(rc.out_dir);
    io::write_file((dir / "oracle_solution.csv").string(), io::grid_solution_to_csv(sol));

    io::json j{{"n", n}, {"t0", t0}, {"T", T}, {"m", m}, {"h", sol.h}};
    if (exact) {
        double err = 0.0;
        for (std::size_t i = 0; i < sol.t.size(); ++i) {
            double v = 0.0;
            for (const auto& [p, c] : *exact)
                v += c * std::pow(sol.t[i], p);
            err = std::max(err, std::abs(sol.v[i] - v));
        }
        j["max_error_vs_manufactured"] = err;
        log << "oracle: n=" << n << " m=" << m << " max_error=" << io::format_double(err) << "\n";
    } else {
        log << "oracle: n=" << n << " m=" << m << "\n";
    }
    if (!fit_basis.empty()) {
        std::vector<std::pair<int, int>> basis;
        for (const auto& [i, jj, c] : detail::parse_terms(fit_basis))
            basis.emplace_back(i, jj);
        const auto fit = fit_coefficients(sol, basis);
        io::json jf    = io::json::array();
        for (std::size_t i = 0; i < basis.size(); ++i)
            jf.push_back({{"i", basis[i].first},
                          {"j", basis[i].second},
                          {"coefficient", fit.coeffs[i]}});
        j["fit"]              = jf;
        j["condition_number"] = fit.condition_number;
    }
    io::write_file((dir / "oracle_fit.json").string(), j.dump(2) + "\n");
    return 0;
}

/// Command-line driver. Exit codes: 0 success, 2 validation error,
/// 3 computation error. Identical inputs produce byte-identical outputs.
inline int run(const std::vector<std::string>& args, std::ostream& log = std::cout) {
    CLI::App app{"polyhomogeneous boundary expansions for the Fuchsian Monge-Ampere model"};
    app.require_subcommand(1);
    RunConfig rc;
    app.add_option("--out", rc.out_dir, "output directory");
    app.add_option("--seed", rc.seed, "seed for randomized experiment batches");

    // expand
    auto* expand = app.add_subcommand("expand", "solve a model problem order by order");
    int en = 0, eK = 0;
    std::string forcing, freev, c1, cd, nonlinearity, form = "d", config_path;
    expand->add_option("--n", en, "complex dimension");
    expand->add_option("--K", eK, "truncation order");
    expand->add_option("--forcing", forcing, "forcing terms i:c or i.j:c, comma-separated");
    expand->add_option("--free", freev, "free resonant coefficients m=c");
    expand->add_option("--perturb-c1", c1, "C1 coefficient terms i:c");
    expand->add_option("--perturb-cd", cd, "Cd coefficient terms i:c");
    expand->add_option("--nonlinearity", nonlinearity, "none|model");
    expand->add_option("--form", form, "d|t");
    expand->add_option("--config", config_path, "key=value problem config file");

    // ball
    auto* ball = app.add_subcommand("ball", "exact unit-ball benchmark");
    int bn = 2, bK = 10, bpoints = 20;
    double blo = 0.05, bhi = 0.85;
    ball->add_option("--n", bn, "complex dimension");
    ball->add_option("--K", bK, "truncation order");
    ball->add_option("--grid-points", bpoints, "radius grid size");
    ball->add_option("--grid-lo", blo, "smallest radius");
    ball->add_option("--grid-hi", bhi, "largest radius");

    // cex
    auto* cex = app.add_subcommand("cex", "divergence counterexample series");
    int cn = 2, ckmax = 6;
    std::string seed_poly = "1:1", ledger_mode;
    double bound_c = 1.0;
    cex->add_option("--n", cn, "dimension parameter of the operator");
    cex->add_option("--seed-poly", seed_poly, "seed polynomial, e.g. d:1 or t^2:3/2");
    cex->add_option("--kmax", ckmax, "truncation order in s^2");
    cex->add_option("--ledger", ledger_mode, "none|saturating|symbolic growth ledger");
    cex->add_option("--bound-c", bound_c, "constant C of the seed bound pattern");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "classify coefficient growth");
    std::string input;
    double sigma_max = 0.15, residual_max = 0.5;
    diagnose->add_option("--input", input, "CSV (k,norm) or series/cex JSON")->required();
    diagnose->add_option("--sigma-max", sigma_max, "convergent classification threshold");
    diagnose->add_option("--residual-max", residual_max, "Gevrey fit residual threshold");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "finite-difference BVP oracle (t-form)");
    int on = 2, om = 64;
    double t0 = 0.1, T = 0.45;
    std::string f_poly, manufactured, fit_basis;
    oracle->add_option("--n", on, "complex dimension");
    oracle->add_option("--f", f_poly, "forcing polynomial f(t), terms i:c");
    oracle->add_option("--manufactured", manufactured, "manufactured solution terms i:c");
    oracle->add_option("--t0", t0, "left endpoint (>= 1e-3)");
    oracle->add_option("--T", T, "right endpoint");
    oracle->add_option("--m", om, "grid intervals");
    oracle->add_option("--fit-basis", fit_basis, "basis exponents i:j for coefficient fit");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, log, log);
        return code == 0 ? 0 : 2;
    }

    try {
        if (expand->parsed())
            return cmd_expand(rc, en, eK, forcing, freev, c1, cd, nonlinearity, form,
                              config_path, log);
        if (ball->parsed())
            return cmd_ball(rc, bn, bK, bpoints, blo, bhi, log);
        if (cex->parsed())
            return cmd_cex(rc, cn, seed_poly, ckmax, ledger_mode, bound_c, log);
        if (diagnose->parsed())
            return cmd_diagnose(rc, input, sigma_max, residual_max, log);
        if (oracle->parsed())
            return cmd_oracle(rc, on, f_poly, manufactured, t0, T, om, fit_basis, log);
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

inline int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

} // namespace polyhom::cli
