// Command-line front end for the lifetime-ruin solver. Links the C API only.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifetime_ruin.h"

using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw CliError{code, message}; }

int exit_code_for(lr_status status) {
    switch (status) {
        case LR_ERR_PARAMETER:
        case LR_ERR_CONFIG:
        case LR_ERR_STRATEGY:
        case LR_ERR_NULL_ARGUMENT:
            return kExitConfig;
        default:
            return kExitSolver;
    }
}

void check(lr_status status, const std::string& context) {
    if (status == LR_OK) return;
    die(exit_code_for(status),
        context + ": " + lr_status_name(status) + ": " + lr_last_error());
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

ordered_json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) die(kExitConfig, "cannot open config file: " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        die(kExitConfig, std::string("config parse error: ") + e.what());
    }
}

double need_number(const ordered_json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        die(kExitConfig, std::string("config: missing or non-numeric key '") + key + "'");
    return j[key].get<double>();
}

lr_market_params parse_market(const ordered_json& j) {
    lr_market_params p{};
    p.r = need_number(j, "r");
    p.b = j.contains("b") ? need_number(j, "b") : p.r;
    p.mu = need_number(j, "mu");
    p.sigma = need_number(j, "sigma");
    p.lambda = need_number(j, "lambda");
    return p;
}

lr_consumption parse_consumption(const ordered_json& j) {
    if (!j.contains("consumption") || !j["consumption"].is_object())
        die(kExitConfig, "config: missing 'consumption' object");
    const auto& c = j["consumption"];
    const std::string type = c.value("type", "");
    lr_consumption out{};
    if (type == "constant") {
        out.type = LR_CONSUMPTION_CONSTANT;
        out.c = need_number(c, "c");
    } else if (type == "proportional") {
        out.type = LR_CONSUMPTION_PROPORTIONAL;
        out.p = need_number(c, "p");
        out.w0 = need_number(c, "w0");
    } else {
        die(kExitConfig, "config: consumption.type must be 'constant' or 'proportional'");
    }
    return out;
}

lr_regime parse_regime(const std::string& name) {
    if (name == "unconstrained") return LR_REGIME_UNCONSTRAINED;
    if (name == "noborrow") return LR_REGIME_NO_BORROW;
    if (name == "borrow") return LR_REGIME_BORROW;
    die(kExitConfig, "regime must be unconstrained, noborrow or borrow (got '" + name + "')");
}

const char* regime_string(lr_regime regime) {
    switch (regime) {
        case LR_REGIME_UNCONSTRAINED: return "unconstrained";
        case LR_REGIME_NO_BORROW: return "noborrow";
        case LR_REGIME_BORROW: return "borrow";
    }
    return "?";
}

lr_regime regime_from(const ordered_json& config, const std::string& override_name) {
    if (!override_name.empty()) return parse_regime(override_name);
    if (config.contains("regime") && config["regime"].is_string())
        return parse_regime(config["regime"].get<std::string>());
    die(kExitConfig, "config: missing 'regime' (or pass --regime)");
}

lr_sim_config parse_sim_config(const ordered_json& config) {
    if (!config.contains("simulation") || !config["simulation"].is_object())
        die(kExitConfig, "config: missing 'simulation' object");
    const auto& s = config["simulation"];
    lr_sim_config cfg{};
    cfg.n_paths = s.contains("n_paths") ? (long long)need_number(s, "n_paths") : 100000;
    cfg.dt = s.contains("dt") ? need_number(s, "dt") : 1.0 / 250;
    cfg.seed = s.contains("seed") ? (uint64_t)need_number(s, "seed") : 0;
    cfg.w_start = need_number(s, "w_start");
    cfg.max_horizon = s.contains("max_horizon") ? need_number(s, "max_horizon") : 0.0;
    cfg.n_threads = s.contains("threads") ? (int)need_number(s, "threads") : 0;
    cfg.strategy_table_points =
        s.contains("strategy_table_points") ? (int)need_number(s, "strategy_table_points") : 0;
    return cfg;
}

struct SolutionHandle {
    lr_solution* ptr = nullptr;
    ~SolutionHandle() { lr_solution_free(ptr); }
    lr_solution* get() const { return ptr; }
};

void solve_into(const lr_market_params& params, double c, lr_regime regime,
                SolutionHandle& out) {
    check(lr_solve(&params, c, regime, 0, &out.ptr), "solve");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(kExitConfig, "cannot open output file: " + path);
    out << text;
    if (!out) die(kExitConfig, "failed writing output file: " + path);
}

ordered_json params_json(const lr_market_params& p) {
    return {{"r", p.r}, {"b", p.b}, {"mu", p.mu}, {"sigma", p.sigma}, {"lambda", p.lambda}};
}

ordered_json consumption_json(const lr_consumption& c) {
    if (c.type == LR_CONSUMPTION_CONSTANT) return {{"type", "constant"}, {"c", c.c}};
    return {{"type", "proportional"}, {"p", c.p}, {"w0", c.w0}};
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const std::string& config_path, const std::string& regime_name,
              const std::string& output_path, int grid_points) {
    const ordered_json config = load_config(config_path);
    const lr_market_params params = parse_market(config);
    const lr_consumption cons = parse_consumption(config);
    const lr_regime regime = regime_from(config, regime_name);

    ordered_json out;
    out["params"] = params_json(params);
    out["consumption"] = consumption_json(cons);
    out["regime"] = regime_string(regime);

    if (cons.type == LR_CONSUMPTION_CONSTANT) {
        lr_derived_constants k{};
        check(lr_derive_constants(&params, cons.c, &k), "derive constants");
        SolutionHandle sol;
        solve_into(params, cons.c, regime, sol);
        lr_solution_info info{};
        check(lr_solution_get_info(sol.get(), &info), "solution info");

        out["derived"] = {{"m", k.m},     {"m_b", k.m_b},
                          {"d", k.d},     {"x", k.x},
                          {"w_l", k.w_l}, {"safe_level", k.safe_level}};
        out["boundaries"] = {{"w_b", info.w_b},
                             {"w_l", info.w_l},
                             {"w_mu", info.w_mu},
                             {"safe_level", info.safe_level}};
        out["beta"] = info.beta;

        const auto grid = uniform_grid(0.0, info.safe_level, grid_points);
        ordered_json gw = ordered_json::array(), gp = ordered_json::array(),
                     gs = ordered_json::array(), gz = ordered_json::array();
        for (double w : grid) {
            double psi, pistar, riskless;
            check(lr_solution_eval(sol.get(), w, &psi, &pistar, &riskless), "evaluate");
            gw.push_back(w);
            gp.push_back(psi);
            gs.push_back(pistar);
            gz.push_back(riskless);
        }
        out["grid"] = {{"w", gw}, {"psi", gp}, {"pistar", gs}, {"riskless", gz}};
    } else {
        lr_power_solution power{};
        check(lr_solve_proportional(&params, cons.p, cons.w0, regime, &power),
              "solve proportional");
        out["solution"] = {{"exponent", power.exponent},
                           {"w0", power.w0},
                           {"investment_fraction", power.investment_fraction},
                           {"crra", power.crra},
                           {"discount", power.discount}};
        const auto grid = uniform_grid(cons.w0, 10.0 * cons.w0, grid_points);
        ordered_json gw = ordered_json::array(), gp = ordered_json::array(),
                     gs = ordered_json::array();
        for (double w : grid) {
            double psi;
            check(lr_proportional_psi(&power, w, &psi), "evaluate");
            gw.push_back(w);
            gp.push_back(psi);
            gs.push_back(power.investment_fraction * w);
        }
        out["grid"] = {{"w", gw}, {"psi", gp}, {"pistar", gs}};
    }

    write_text(output_path, out.dump(2) + "\n");
    return 0;
}

// --------------------------------------------------------------- figure ----

void csv_header(std::ostringstream& os, const lr_market_params& p, double c, int figure) {
    os << "# lifetime-ruin figure " << figure << "\n";
    os << "# r=" << fmt12(p.r) << " b=" << fmt12(p.b) << " mu=" << fmt12(p.mu)
       << " sigma=" << fmt12(p.sigma) << " lambda=" << fmt12(p.lambda) << " c=" << fmt12(c)
       << "\n";
}

int cmd_figure(const std::string& config_path, int figure, const std::string& output_path,
               int grid_points) {
    const ordered_json config = load_config(config_path);
    const lr_market_params params = parse_market(config);
    const lr_consumption cons = parse_consumption(config);
    if (cons.type != LR_CONSUMPTION_CONSTANT)
        die(kExitConfig, "figures are defined for constant consumption configs");
    const double c = cons.c;

    std::ostringstream os;
    csv_header(os, params, c, figure);

    if (figure == 1) {
        // borrow solve also carries w_b for the metadata; fall back when the
        // configured b cannot support the borrowing regime
        SolutionHandle sol;
        if (lr_solve(&params, c, LR_REGIME_BORROW, 0, &sol.ptr) != LR_OK)
            solve_into(params, c, LR_REGIME_NO_BORROW, sol);
        lr_solution_info info{};
        check(lr_solution_get_info(sol.get(), &info), "solution info");
        double sz, iz_, szb, izb;
        check(lr_aux_line(0, &params, c, &sz, &iz_), "aux line z");
        check(lr_aux_line(1, &params, c, &szb, &izb), "aux line z_b");
        os << "# w_b=" << fmt12(info.w_b) << " w_l=" << fmt12(info.w_l)
           << " w_mu=" << fmt12(info.w_mu) << "\n";
        os << "w,y,z,z_b\n";
        for (double w : uniform_grid(0.0, info.w_l, grid_points)) {
            double y;
            check(lr_solution_eval_y(sol.get(), w, &y), "evaluate y");
            os << fmt12(w) << ',' << fmt12(y) << ',' << fmt12(sz * w + iz_) << ','
               << fmt12(szb * w + izb) << "\n";
        }
    } else if (figure == 2 || figure == 3) {
        SolutionHandle un, nb, bo;
        solve_into(params, c, LR_REGIME_UNCONSTRAINED, un);
        solve_into(params, c, LR_REGIME_NO_BORROW, nb);
        solve_into(params, c, LR_REGIME_BORROW, bo);
        lr_solution_info info{};
        check(lr_solution_get_info(bo.get(), &info), "solution info");
        os << "# w_b=" << fmt12(info.w_b) << " w_l=" << fmt12(info.w_l)
           << " w_mu=" << fmt12(info.w_mu) << " safe_level=" << fmt12(info.safe_level) << "\n";
        os << (figure == 2 ? "w,psi,psi_0,psi_b\n" : "w,zeta,zeta_0,zeta_b\n");
        for (double w : uniform_grid(0.0, info.safe_level, grid_points)) {
            double a, b_, d;
            if (figure == 2) {
                check(lr_solution_eval(un.get(), w, &a, nullptr, nullptr), "eval");
                check(lr_solution_eval(nb.get(), w, &b_, nullptr, nullptr), "eval");
                check(lr_solution_eval(bo.get(), w, &d, nullptr, nullptr), "eval");
            } else {
                check(lr_solution_eval(un.get(), w, nullptr, nullptr, &a), "eval");
                check(lr_solution_eval(nb.get(), w, nullptr, nullptr, &b_), "eval");
                check(lr_solution_eval(bo.get(), w, nullptr, nullptr, &d), "eval");
            }
            os << fmt12(w) << ',' << fmt12(a) << ',' << fmt12(b_) << ',' << fmt12(d) << "\n";
        }
    } else if (figure == 4) {
        const double bs[3] = {0.04, 0.055, 0.059};
        SolutionHandle sols[3];
        for (int i = 0; i < 3; ++i) {
            lr_market_params pb = params;
            pb.b = bs[i];
            solve_into(pb, c, LR_REGIME_BORROW, sols[i]);
        }
        lr_solution_info info{};
        check(lr_solution_get_info(sols[0].get(), &info), "solution info");
        os << "w,zeta_b_0.04,zeta_b_0.055,zeta_b_0.059\n";
        for (double w : uniform_grid(0.0, info.safe_level, grid_points)) {
            os << fmt12(w);
            for (auto& sol : sols) {
                double riskless;
                check(lr_solution_eval(sol.get(), w, nullptr, nullptr, &riskless), "eval");
                os << ',' << fmt12(riskless);
            }
            os << "\n";
        }
    } else {
        die(kExitConfig, "figure id must be 1..4");
    }

    write_text(output_path, os.str());
    return 0;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const std::string& config_path, const std::string& regime_name,
                 const std::string& output_path, std::optional<uint64_t> seed_override,
                 const std::string& strategy_table_path) {
    const ordered_json config = load_config(config_path);
    const lr_market_params params = parse_market(config);
    const lr_consumption cons = parse_consumption(config);
    const lr_regime regime = regime_from(config, regime_name);
    lr_sim_config cfg = parse_sim_config(config);
    if (seed_override) cfg.seed = *seed_override;

    lr_strategy strategy{};
    std::vector<double> tab_w, tab_pi;
    if (!strategy_table_path.empty()) {
        const ordered_json table = load_config(strategy_table_path);
        if (!table.contains("grid") || !table["grid"].contains("w") ||
            !table["grid"].contains("pistar"))
            die(kExitConfig, "strategy table file needs grid.w and grid.pistar arrays");
        tab_w = table["grid"]["w"].get<std::vector<double>>();
        tab_pi = table["grid"]["pistar"].get<std::vector<double>>();
        strategy.kind = LR_STRATEGY_TABLE;
        strategy.table_wealth = tab_w.data();
        strategy.table_allocation = tab_pi.data();
        strategy.table_len = tab_w.size();
    } else {
        strategy.kind = LR_STRATEGY_OPTIMAL;
    }

    lr_sim_result res{};
    check(lr_simulate(&params, &cons, regime, &cfg, &strategy, &res), "simulate");

    // analytic reference and z-score of the discrepancy
    double analytic = 0.0;
    if (cons.type == LR_CONSUMPTION_CONSTANT) {
        SolutionHandle sol;
        solve_into(params, cons.c, regime, sol);
        check(lr_solution_eval(sol.get(), cfg.w_start, &analytic, nullptr, nullptr),
              "evaluate");
    } else {
        lr_power_solution power{};
        check(lr_solve_proportional(&params, cons.p, cons.w0, regime, &power),
              "solve proportional");
        check(lr_proportional_psi(&power, cfg.w_start, &analytic), "evaluate");
    }
    const double z = res.std_error > 0.0
                         ? (res.ruin_probability - analytic) / res.std_error
                         : 0.0;

    ordered_json out;
    out["params"] = params_json(params);
    out["consumption"] = consumption_json(cons);
    out["regime"] = regime_string(regime);
    out["simulation"] = {{"n_paths", cfg.n_paths},
                         {"dt", cfg.dt},
                         {"seed", cfg.seed},
                         {"w_start", cfg.w_start},
                         {"max_horizon", cfg.max_horizon},
                         {"threads", cfg.n_threads},
                         {"strategy", strategy_table_path.empty() ? "optimal" : "table"}};
    out["result"] = {{"ruin_probability", res.ruin_probability},
                     {"std_error", res.std_error},
                     {"n_ruined", res.n_ruined},
                     {"n_died", res.n_died},
                     {"n_censored", res.n_censored},
                     {"n_censored_safe", res.n_censored_safe},
                     {"mean_time_to_absorption", res.mean_time_to_absorption}};
    out["analytic_psi"] = analytic;
    out["z_score"] = z;

    write_text(output_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- sweep ----

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<double>& values, const std::string& output_path,
              const std::vector<double>& probes) {
    static const std::vector<std::string> kAllowed = {"b", "lambda", "mu", "sigma", "c", "p"};
    if (std::find(kAllowed.begin(), kAllowed.end(), parameter) == kAllowed.end())
        die(kExitConfig, "sweep parameter must be one of b, lambda, mu, sigma, c, p");
    if (values.empty()) die(kExitConfig, "sweep needs at least one value");

    const ordered_json config = load_config(config_path);
    const lr_market_params base_params = parse_market(config);
    const lr_consumption base_cons = parse_consumption(config);
    const lr_regime regime = regime_from(config, "");

    std::ostringstream os;
    os << "# lifetime-ruin sweep parameter=" << parameter << " regime="
       << regime_string(regime) << "\n";
    os << "value,status,w_b,w_l,beta,leverage_at_zero,exponent,fraction";
    for (double probe : probes) os << ",psi_at_" << fmt12(probe);
    os << "\n";

    for (double value : values) {
        lr_market_params params = base_params;
        lr_consumption cons = base_cons;
        if (parameter == "b") params.b = value;
        else if (parameter == "lambda") params.lambda = value;
        else if (parameter == "mu") params.mu = value;
        else if (parameter == "sigma") params.sigma = value;
        else if (parameter == "c") {
            if (cons.type != LR_CONSUMPTION_CONSTANT)
                die(kExitConfig, "sweep over c needs a constant-consumption config");
            cons.c = value;
        } else {
            if (cons.type != LR_CONSUMPTION_PROPORTIONAL)
                die(kExitConfig, "sweep over p needs a proportional-consumption config");
            cons.p = value;
        }

        os << fmt12(value);
        const double nan = std::nan("");
        try {
            if (cons.type == LR_CONSUMPTION_CONSTANT) {
                SolutionHandle sol;
                solve_into(params, cons.c, regime, sol);
                lr_solution_info info{};
                check(lr_solution_get_info(sol.get(), &info), "solution info");
                double lev = nan;
                if (regime == LR_REGIME_BORROW)
                    check(lr_leverage_at_zero(&params, cons.c, &lev), "leverage");
                os << ",ok," << fmt12(info.w_b) << ',' << fmt12(info.w_l) << ','
                   << fmt12(info.beta) << ',' << fmt12(lev) << ",nan,nan";
                for (double probe : probes) {
                    double psi;
                    check(lr_solution_eval(sol.get(), probe, &psi, nullptr, nullptr), "eval");
                    os << ',' << fmt12(psi);
                }
            } else {
                lr_power_solution power{};
                check(lr_solve_proportional(&params, cons.p, cons.w0, regime, &power),
                      "solve proportional");
                os << ",ok,nan,nan,nan,nan," << fmt12(power.exponent) << ','
                   << fmt12(power.investment_fraction);
                for (double probe : probes) {
                    double psi;
                    check(lr_proportional_psi(&power, probe, &psi), "eval");
                    os << ',' << fmt12(psi);
                }
            }
            os << "\n";
        } catch (const CliError& e) {
            // keep sweeping: emit the row with an error marker
            std::string msg = e.message;
            for (auto& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            os << ",ERROR:" << msg << ",nan,nan,nan,nan,nan,nan";
            for (std::size_t i = 0; i < probes.size(); ++i) os << ",nan";
            os << "\n";
        }
    }

    write_text(output_path, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum lifetime-ruin probability solver and simulator"};
    app.require_subcommand(1);

    std::string config_path, output_path, regime_name, strategy_table_path, parameter;
    int figure = 0;
    int grid_points = 512;
    std::optional<uint64_t> seed;
    std::vector<double> values;
    std::vector<double> probes = {5.0, 10.0, 20.0};

    auto* solve = app.add_subcommand("solve", "Solve and report the ruin solution as JSON");
    solve->add_option("--config", config_path, "JSON configuration file")->required();
    solve->add_option("--output", output_path, "output JSON path")->required();
    solve->add_option("--regime", regime_name, "unconstrained|noborrow|borrow");
    solve->add_option("--grid-points", grid_points, "samples in the output grid");

    auto* figurecmd = app.add_subcommand("figure", "Emit figure-ready CSV data");
    figurecmd->add_option("--config", config_path, "JSON configuration file")->required();
    figurecmd->add_option("--figure", figure, "figure id 1..4")->required();
    figurecmd->add_option("--output", output_path, "output CSV path")->required();
    figurecmd->add_option("--grid-points", grid_points, "samples in the wealth grid");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the solver");
    simulate->add_option("--config", config_path, "JSON configuration file")->required();
    simulate->add_option("--output", output_path, "output JSON path")->required();
    simulate->add_option("--regime", regime_name, "unconstrained|noborrow|borrow");
    simulate->add_option("--seed", seed, "override simulation.seed");
    simulate->add_option("--strategy-table", strategy_table_path,
                         "re-ingest a solve output JSON as the allocation rule");

    auto* sweep = app.add_subcommand("sweep", "Diagnostics across one parameter");
    sweep->add_option("--config", config_path, "JSON configuration file")->required();
    sweep->add_option("--parameter", parameter, "b|lambda|mu|sigma|c|p")->required();
    sweep->add_option("--values", values, "comma-separated values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--output", output_path, "output CSV path")->required();
    sweep->add_option("--probes", probes, "wealth probes for psi columns")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, regime_name, output_path, grid_points);
        if (figurecmd->parsed())
            return cmd_figure(config_path, figure, output_path, grid_points);
        if (simulate->parsed())
            return cmd_simulate(config_path, regime_name, output_path, seed,
                                strategy_table_path);
        if (sweep->parsed())
            return cmd_sweep(config_path, parameter, values, output_path, probes);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
