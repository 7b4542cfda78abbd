#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ruin/assembler.hpp"
#include "ruin/closed_form.hpp"
#include "ruin/model.hpp"

namespace ruin {

struct SimConfig {
    long long n_paths = 100'000;
    double dt = 1.0 / 250;
    std::uint64_t seed = 0;
    double w_start = 0.0;
    double max_horizon = 0.0;        ///< years; <= 0 picks the default 60/lambda
    int n_threads = 0;               ///< 0 -> hardware concurrency
    int strategy_table_points = 8192;///< resolution used when tabulating a solution
};

struct SimResult {
    double ruin_probability;
    double std_error;                ///< sqrt(p(1-p)/n)
    long long n_ruined;
    long long n_died;
    long long n_censored;            ///< safe-level wins plus horizon cutoffs
    long long n_censored_safe;       ///< diagnostic subset of n_censored
    double mean_time_to_absorption;  ///< years
};

/// Wealth -> risky-allocation rule. Either a fraction of wealth or a lookup
/// table with linear interpolation; tables hold the first value below their
/// front node and continue the last segment past their end, so a tabulated
/// proportional rule extends exactly.
class Strategy {
public:
    static Strategy fraction_of_wealth(double fraction);
    static Strategy from_table(std::vector<double> wealth, std::vector<double> allocation);
    /// Samples the solution's pistar on a uniform grid over [0, safe level].
    static Strategy from_solution(const RuinSolution& solution, int points);
    /// The closed-form proportional rule fraction * w.
    static Strategy from_power(const PowerSolution& solution);

    double at(double w) const;
    bool is_fraction() const { return kind_ == Kind::Fraction; }
    double fraction() const { return fraction_; }
    std::span<const double> table_wealth() const { return w_; }
    std::span<const double> table_allocation() const { return pi_; }

private:
    enum class Kind { Fraction, Table };
    Kind kind_ = Kind::Fraction;
    double fraction_ = 0.0;
    std::vector<double> w_, pi_;
    bool uniform_ = false;
    double lo_ = 0, inv_dx_ = 0;

    friend SimResult simulate(const MarketParams&, const ConsumptionSpec&, Regime,
                              const SimConfig&, const Strategy&);
};

/// Euler-Maruyama estimate of the lifetime-ruin probability under the given
/// allocation rule. Paths are absorbed at the ruin boundary (0, or w0 for
/// proportional consumption), at death (drawn once per path from the
/// exponential law), at the safe level c/r for constant consumption, or at
/// the horizon. Bit-identical results for identical configs, independent of
/// the number of worker threads.
SimResult simulate(const MarketParams& params, const ConsumptionSpec& consumption, Regime regime,
                   const SimConfig& config, const Strategy& strategy);

/// Solves for the optimal strategy first, then simulates it.
SimResult simulate_optimal(const MarketParams& params, const ConsumptionSpec& consumption,
                           Regime regime, const SimConfig& config);

struct ConvergenceRow {
    double dt;
    double w_start;
    SimResult result;
    double analytic;
    double z_score;
};

/// Runs simulate() across a ladder of step sizes at fixed seed streams,
/// reporting the discrepancy against the analytic value at each probe.
std::vector<ConvergenceRow> convergence_study(const MarketParams& params,
                                              const ConsumptionSpec& consumption, Regime regime,
                                              std::span<const double> w_probes,
                                              std::span<const double> dt_ladder,
                                              const SimConfig& base_config);

} // namespace ruin
