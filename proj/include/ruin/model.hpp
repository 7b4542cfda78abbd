#pragma once

#include <variant>

#include "ruin/errors.hpp"

namespace ruin {

/// Market and mortality parameters, all annual and in real terms.
struct MarketParams {
    double r;      ///< riskless lending rate
    double b;      ///< borrowing rate (ignored unless the regime borrows)
    double mu;     ///< risky-asset drift
    double sigma;  ///< risky-asset volatility (per sqrt-year)
    double lambda; ///< hazard rate; 1/lambda is expected remaining lifetime
};

/// Consume a fixed dollar amount per year.
struct ConstantConsumption {
    double c;
};

/// Consume a fixed fraction of wealth per year; ruin is hitting w0 > 0.
struct ProportionalConsumption {
    double p;
    double w0;
};

using ConsumptionSpec = std::variant<ConstantConsumption, ProportionalConsumption>;

/// Borrowing constraint in force. Kept explicit (instead of inferring from
/// b == r) so the b -> r limit can be tested across two distinct code paths.
enum class Regime {
    Unconstrained, ///< borrow and lend at the same rate r
    NoBorrow,      ///< risky allocation restricted to [0, w]
    Borrow,        ///< borrowing allowed at rate b > r
};

const char* regime_name(Regime regime);

/// Constants derived from a constant-consumption model.
struct DerivedConstants {
    double m;          ///< half squared Sharpe ratio at the lending rate
    double m_b;        ///< same with the borrowing rate in place of r
    double d;          ///< ruin-probability exponent, always > 1
    double x;          ///< slope of the unconstrained strategy, (mu-r)/sigma^2/(d-1)
    double w_l;        ///< lending level, in (0, safe_level)
    double safe_level; ///< c/r; ruin probability vanishes at or above it
};

/// Checks every parameter inequality required by the chosen regime and
/// consumption form. Throws ParameterError naming the violated constraint.
void validate(const MarketParams& params, const ConsumptionSpec& consumption, Regime regime);

/// Derived constants for constant consumption at rate c. Requires a model
/// that passes validate() for the intended regime.
DerivedConstants derive_constants(const MarketParams& params, double c);

} // namespace ruin
