#pragma once

#include "ruin/model.hpp"

namespace ruin {

/// Power-law ruin solution (w/w0)^(-exponent) for proportional consumption,
/// with the optimal risky allocation investment_fraction * w.
struct PowerSolution {
    double exponent;            ///< a > 0
    double w0;                  ///< ruin wealth level (anchor of the power law)
    double investment_fraction; ///< may exceed 1 when borrowing is optimal
};

/// CRRA utility maximizer that acts identically to the ruin minimizer.
struct CrraEquivalence {
    double relative_risk_aversion; ///< 1 + a
    double discount;               ///< lambda + p
};

// --- constant consumption, no constraint (b = r) ---

/// Ruin probability (1 - r w / c)^d, zero at and above the safe level.
double psi_unconstrained(double w, const DerivedConstants& k, double c);

/// Optimal risky allocation x * (c/r - w) on [0, c/r].
double pistar_unconstrained(double w, const DerivedConstants& k, double c);

// --- proportional consumption exponents ---

double exponent_ar(const MarketParams& params, double p);
double exponent_k(const MarketParams& params, double p);
double exponent_ab(const MarketParams& params, double p);

/// Selects the exponent and allocation fraction for the given regime.
/// Throws CaseSelectionError if the case conditions are inconsistent.
PowerSolution solve_proportional(const MarketParams& params, double p, double w0, Regime regime);

/// Ruin probability under a PowerSolution; wealth at or below w0 counts as ruined.
double proportional_psi(const PowerSolution& sol, double w);

CrraEquivalence crra_equivalent(double a, const MarketParams& params, double p);

} // namespace ruin
