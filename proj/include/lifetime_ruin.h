/* C API for the lifetime-ruin solver.
 *
 * The library computes the minimum probability that a retiree consuming at a
 * fixed (or wealth-proportional) rate runs out of money before dying, together
 * with the risky-asset allocation that attains it, under three borrowing
 * regimes. A Monte Carlo simulator of the controlled wealth process is
 * included for verification.
 *
 * All functions return lr_status; LR_OK means success. On failure,
 * lr_last_error() returns a thread-local description of what went wrong.
 * Solution objects are opaque handles owned by the caller via
 * lr_solution_free().
 */
#ifndef LIFETIME_RUIN_H
#define LIFETIME_RUIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LR_API __declspec(dllexport)
#else
#define LR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lr_status {
    LR_OK = 0,
    LR_ERR_PARAMETER = 1,
    LR_ERR_DOMAIN = 2,
    LR_ERR_INTEGRATION = 3,
    LR_ERR_ROOT = 4,
    LR_ERR_INVERSION = 5,
    LR_ERR_CASE_SELECTION = 6,
    LR_ERR_CONFIG = 7,
    LR_ERR_STRATEGY = 8,
    LR_ERR_NULL_ARGUMENT = 9,
    LR_ERR_INTERNAL = 10
} lr_status;

typedef enum lr_regime {
    LR_REGIME_UNCONSTRAINED = 0, /* borrow and lend at the same rate r */
    LR_REGIME_NO_BORROW = 1,     /* allocation restricted to [0, w] */
    LR_REGIME_BORROW = 2         /* borrowing allowed at rate b, r < b < mu */
} lr_regime;

typedef struct lr_market_params {
    double r;      /* riskless lending rate, per year */
    double b;      /* borrowing rate, per year */
    double mu;     /* risky-asset drift, per year */
    double sigma;  /* risky-asset volatility, per sqrt-year */
    double lambda; /* hazard rate, per year */
} lr_market_params;

typedef enum lr_consumption_type {
    LR_CONSUMPTION_CONSTANT = 0,
    LR_CONSUMPTION_PROPORTIONAL = 1
} lr_consumption_type;

typedef struct lr_consumption {
    lr_consumption_type type;
    double c;  /* constant dollars per year (constant type) */
    double p;  /* fraction of wealth per year (proportional type) */
    double w0; /* ruin wealth level (proportional type) */
} lr_consumption;

typedef struct lr_derived_constants {
    double m;
    double m_b;
    double d;
    double x;
    double w_l;
    double safe_level;
} lr_derived_constants;

/* opaque constant-consumption solution */
typedef struct lr_solution lr_solution;

typedef struct lr_solution_info {
    lr_regime regime;
    double c;
    double w_b;  /* NaN when the regime has no borrowing level */
    double w_l;
    double w_mu; /* NaN for the unconstrained regime */
    double safe_level;
    double beta;
    double d;
    double m;
    double x;
} lr_solution_info;

typedef struct lr_power_solution {
    double exponent;            /* a > 0; psi(w) = (w/w0)^(-a) */
    double w0;
    double investment_fraction; /* optimal allocation is fraction * w */
    double crra;                /* equivalent relative risk aversion, 1 + a */
    double discount;            /* equivalent utility discount, lambda + p */
} lr_power_solution;

typedef struct lr_sim_config {
    long long n_paths;
    double dt;           /* years per step, in (0, 0.1] */
    uint64_t seed;
    double w_start;
    double max_horizon;  /* years; <= 0 selects 60/lambda */
    int n_threads;       /* 0 -> hardware concurrency */
    int strategy_table_points; /* <= 0 -> 8192 */
} lr_sim_config;

typedef struct lr_sim_result {
    double ruin_probability;
    double std_error;
    long long n_ruined;
    long long n_died;
    long long n_censored;
    long long n_censored_safe;
    double mean_time_to_absorption;
} lr_sim_result;

typedef enum lr_strategy_kind {
    LR_STRATEGY_OPTIMAL = 0,  /* solve internally, then simulate */
    LR_STRATEGY_FRACTION = 1, /* allocation = fraction * wealth */
    LR_STRATEGY_TABLE = 2     /* linear interpolation of (wealth, allocation) */
} lr_strategy_kind;

typedef struct lr_strategy {
    lr_strategy_kind kind;
    double fraction;
    const double* table_wealth;
    const double* table_allocation;
    size_t table_len;
} lr_strategy;

LR_API const char* lr_version(void);

/* Thread-local message describing the most recent failure in this thread. */
LR_API const char* lr_last_error(void);

LR_API const char* lr_status_name(lr_status status);

/* Parameter validation for the given regime; LR_OK iff the model is usable. */
LR_API lr_status lr_validate(const lr_market_params* params,
                             const lr_consumption* consumption, lr_regime regime);

LR_API lr_status lr_derive_constants(const lr_market_params* params, double c,
                                     lr_derived_constants* out);

/* Solve the constant-consumption problem. grid_points <= 0 selects 2048. */
LR_API lr_status lr_solve(const lr_market_params* params, double c, lr_regime regime,
                          int grid_points, lr_solution** out);

LR_API void lr_solution_free(lr_solution* solution);

LR_API lr_status lr_solution_get_info(const lr_solution* solution, lr_solution_info* out);

/* Ruin probability, optimal risky allocation and riskless position at w.
 * A negative riskless position is money borrowed at rate b. Output pointers
 * may be NULL when a component is not needed. */
LR_API lr_status lr_solution_eval(const lr_solution* solution, double w, double* psi,
                                  double* pistar, double* riskless);

/* Riccati ratio y(w) = h(w)/h'(w) on [0, w_l]; needs a constrained regime. */
LR_API lr_status lr_solution_eval_y(const lr_solution* solution, double w, double* y);

/* Auxiliary line slope/intercept: kind 0 -> z, 1 -> z_b, 2 -> z_mu. */
LR_API lr_status lr_aux_line(int kind, const lr_market_params* params, double c,
                             double* slope, double* intercept);

/* Optimal allocation at zero wealth in the borrowing regime. */
LR_API lr_status lr_leverage_at_zero(const lr_market_params* params, double c, double* out);

LR_API lr_status lr_solve_proportional(const lr_market_params* params, double p, double w0,
                                       lr_regime regime, lr_power_solution* out);

LR_API lr_status lr_proportional_psi(const lr_power_solution* solution, double w, double* psi);

/* Monte Carlo estimate of the lifetime-ruin probability under the given
 * allocation rule. Deterministic for a fixed config, independent of
 * n_threads. */
LR_API lr_status lr_simulate(const lr_market_params* params, const lr_consumption* consumption,
                             lr_regime regime, const lr_sim_config* config,
                             const lr_strategy* strategy, lr_sim_result* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIFETIME_RUIN_H */
