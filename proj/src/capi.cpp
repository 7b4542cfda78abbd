#include "lifetime_ruin.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "ruin/assembler.hpp"
#include "ruin/closed_form.hpp"
#include "ruin/dual_solver.hpp"
#include "ruin/model.hpp"
#include "ruin/riccati.hpp"
#include "ruin/simulator.hpp"

namespace {

thread_local std::string g_last_error;

lr_status fail(lr_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
lr_status guarded(Fn&& fn) {
    try {
        fn();
        return LR_OK;
    } catch (const ruin::ParameterError& e) {
        return fail(LR_ERR_PARAMETER, e.what());
    } catch (const ruin::DomainError& e) {
        return fail(LR_ERR_DOMAIN, e.what());
    } catch (const ruin::IntegrationError& e) {
        return fail(LR_ERR_INTEGRATION, e.what());
    } catch (const ruin::RootError& e) {
        return fail(LR_ERR_ROOT, e.what());
    } catch (const ruin::InversionError& e) {
        return fail(LR_ERR_INVERSION, e.what());
    } catch (const ruin::CaseSelectionError& e) {
        return fail(LR_ERR_CASE_SELECTION, e.what());
    } catch (const ruin::ConfigError& e) {
        return fail(LR_ERR_CONFIG, e.what());
    } catch (const ruin::StrategyError& e) {
        return fail(LR_ERR_STRATEGY, e.what());
    } catch (const std::exception& e) {
        return fail(LR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LR_ERR_INTERNAL, "unknown error");
    }
}

ruin::MarketParams to_params(const lr_market_params& p) {
    return {p.r, p.b, p.mu, p.sigma, p.lambda};
}

ruin::Regime to_regime(lr_regime r) {
    switch (r) {
        case LR_REGIME_UNCONSTRAINED: return ruin::Regime::Unconstrained;
        case LR_REGIME_NO_BORROW: return ruin::Regime::NoBorrow;
        case LR_REGIME_BORROW: return ruin::Regime::Borrow;
    }
    throw ruin::ParameterError("unknown regime code");
}

ruin::ConsumptionSpec to_consumption(const lr_consumption& c) {
    if (c.type == LR_CONSUMPTION_CONSTANT) return ruin::ConstantConsumption{c.c};
    if (c.type == LR_CONSUMPTION_PROPORTIONAL)
        return ruin::ProportionalConsumption{c.p, c.w0};
    throw ruin::ParameterError("unknown consumption type");
}

} // namespace

struct lr_solution {
    ruin::RuinSolution impl;
};

extern "C" {

const char* lr_version(void) { return "1.0.0"; }

const char* lr_last_error(void) { return g_last_error.c_str(); }

const char* lr_status_name(lr_status status) {
    switch (status) {
        case LR_OK: return "ok";
        case LR_ERR_PARAMETER: return "parameter_error";
        case LR_ERR_DOMAIN: return "domain_error";
        case LR_ERR_INTEGRATION: return "integration_error";
        case LR_ERR_ROOT: return "root_error";
        case LR_ERR_INVERSION: return "inversion_error";
        case LR_ERR_CASE_SELECTION: return "case_selection_error";
        case LR_ERR_CONFIG: return "config_error";
        case LR_ERR_STRATEGY: return "strategy_error";
        case LR_ERR_NULL_ARGUMENT: return "null_argument";
        case LR_ERR_INTERNAL: return "internal_error";
    }
    return "?";
}

lr_status lr_validate(const lr_market_params* params, const lr_consumption* consumption,
                      lr_regime regime) {
    if (!params || !consumption) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        ruin::validate(to_params(*params), to_consumption(*consumption), to_regime(regime));
    });
}

lr_status lr_derive_constants(const lr_market_params* params, double c,
                              lr_derived_constants* out) {
    if (!params || !out) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto k = ruin::derive_constants(to_params(*params), c);
        *out = {k.m, k.m_b, k.d, k.x, k.w_l, k.safe_level};
    });
}

lr_status lr_solve(const lr_market_params* params, double c, lr_regime regime, int grid_points,
                   lr_solution** out) {
    if (!params || !out) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        const int n = grid_points > 0 ? grid_points : 2048;
        auto handle = new lr_solution{ruin::solve(to_params(*params), c, to_regime(regime), n)};
        *out = handle;
    });
}

void lr_solution_free(lr_solution* solution) { delete solution; }

lr_status lr_solution_get_info(const lr_solution* solution, lr_solution_info* out) {
    if (!solution || !out) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& s = solution->impl;
        lr_solution_info info{};
        switch (s.regime()) {
            case ruin::Regime::Unconstrained: info.regime = LR_REGIME_UNCONSTRAINED; break;
            case ruin::Regime::NoBorrow: info.regime = LR_REGIME_NO_BORROW; break;
            case ruin::Regime::Borrow: info.regime = LR_REGIME_BORROW; break;
        }
        info.c = s.consumption();
        info.w_b = s.wb() ? *s.wb() : std::numeric_limits<double>::quiet_NaN();
        info.w_l = s.wl();
        info.w_mu = s.wmu();
        info.safe_level = s.safe_level();
        info.beta = s.beta();
        info.d = s.constants().d;
        info.m = s.constants().m;
        info.x = s.constants().x;
        *out = info;
    });
}

lr_status lr_solution_eval(const lr_solution* solution, double w, double* psi, double* pistar,
                           double* riskless) {
    if (!solution) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ev = solution->impl.evaluate(w);
        if (psi) *psi = ev.psi;
        if (pistar) *pistar = ev.pistar;
        if (riskless) *riskless = ev.riskless;
    });
}

lr_status lr_solution_eval_y(const lr_solution* solution, double w, double* y) {
    if (!solution || !y) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto* ric = solution->impl.riccati();
        if (!ric)
            throw ruin::DomainError("y is only defined for the constrained regimes");
        if (!(w >= 0.0 && w <= ric->w_l() * (1.0 + 1e-12)))
            throw ruin::DomainError("y requested outside [0, w_l]");
        *y = ric->y(w);
    });
}

lr_status lr_aux_line(int kind, const lr_market_params* params, double c, double* slope,
                      double* intercept) {
    if (!params || !slope || !intercept) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        ruin::AuxLineKind k;
        switch (kind) {
            case 0: k = ruin::AuxLineKind::Lending; break;
            case 1: k = ruin::AuxLineKind::Borrowing; break;
            case 2: k = ruin::AuxLineKind::Drift; break;
            default: throw ruin::DomainError("aux line kind must be 0, 1 or 2");
        }
        const auto line = ruin::aux_line(k, to_params(*params), c);
        *slope = line.slope;
        *intercept = line.intercept;
    });
}

lr_status lr_leverage_at_zero(const lr_market_params* params, double c, double* out) {
    if (!params || !out) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto p = to_params(*params);
        ruin::validate(p, ruin::ConstantConsumption{c}, ruin::Regime::Borrow);
        const auto k = ruin::derive_constants(p, c);
        const auto ric = ruin::solve_riccati(p, c, k);
        const double wb = ruin::find_wb(ric, p, c);
        *out = ruin::leverage_at_zero(p, c, wb);
    });
}

lr_status lr_solve_proportional(const lr_market_params* params, double p, double w0,
                                lr_regime regime, lr_power_solution* out) {
    if (!params || !out) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto mp = to_params(*params);
        const auto sol = ruin::solve_proportional(mp, p, w0, to_regime(regime));
        const auto eq = ruin::crra_equivalent(sol.exponent, mp, p);
        *out = {sol.exponent, sol.w0, sol.investment_fraction, eq.relative_risk_aversion,
                eq.discount};
    });
}

lr_status lr_proportional_psi(const lr_power_solution* solution, double w, double* psi) {
    if (!solution || !psi) return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const ruin::PowerSolution sol{solution->exponent, solution->w0,
                                      solution->investment_fraction};
        *psi = ruin::proportional_psi(sol, w);
    });
}

lr_status lr_simulate(const lr_market_params* params, const lr_consumption* consumption,
                      lr_regime regime, const lr_sim_config* config,
                      const lr_strategy* strategy, lr_sim_result* out) {
    if (!params || !consumption || !config || !strategy || !out)
        return fail(LR_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto mp = to_params(*params);
        const auto cons = to_consumption(*consumption);
        const auto reg = to_regime(regime);
        ruin::SimConfig cfg;
        cfg.n_paths = config->n_paths;
        cfg.dt = config->dt;
        cfg.seed = config->seed;
        cfg.w_start = config->w_start;
        cfg.max_horizon = config->max_horizon;
        cfg.n_threads = config->n_threads;
        if (config->strategy_table_points > 0)
            cfg.strategy_table_points = config->strategy_table_points;

        ruin::SimResult res{};
        switch (strategy->kind) {
            case LR_STRATEGY_OPTIMAL:
                res = ruin::simulate_optimal(mp, cons, reg, cfg);
                break;
            case LR_STRATEGY_FRACTION:
                res = ruin::simulate(mp, cons, reg, cfg,
                                     ruin::Strategy::fraction_of_wealth(strategy->fraction));
                break;
            case LR_STRATEGY_TABLE: {
                if (!strategy->table_wealth || !strategy->table_allocation)
                    throw ruin::StrategyError("table strategy needs both arrays");
                std::vector<double> w(strategy->table_wealth,
                                      strategy->table_wealth + strategy->table_len);
                std::vector<double> pi(strategy->table_allocation,
                                       strategy->table_allocation + strategy->table_len);
                res = ruin::simulate(mp, cons, reg, cfg,
                                     ruin::Strategy::from_table(std::move(w), std::move(pi)));
                break;
            }
            default: throw ruin::StrategyError("unknown strategy kind");
        }
        *out = {res.ruin_probability, res.std_error,        res.n_ruined,
                res.n_died,           res.n_censored,       res.n_censored_safe,
                res.mean_time_to_absorption};
    });
}

} // extern "C"
