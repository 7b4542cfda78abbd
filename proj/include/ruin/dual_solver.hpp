#pragma once

#include <utility>

#include "ruin/model.hpp"

namespace ruin {

/// Legendre-dual value function on the leveraged region [0, w_b):
///
///   htilde(v) = D1 v^B1 + D2 v^B2 + (c/b) v,   v in [vb, v0],
///
/// pinned by htilde(v0) = 1, htilde'(v0) = 0, htilde'(vb) = wb. Everything is
/// evaluated through the scaled variable u = v/vb, so the object stays usable
/// when B1 is enormous (b close to mu) and D1, D2 overflow as raw doubles.
struct DualSolution {
    double B1, B2; ///< positive and negative quadratic roots
    double D1, D2; ///< raw power coefficients; reporting only, may be inf
    double A1, A2; ///< bracket combinations driving the scaled evaluators
    double rho;    ///< v0 / vb > 1
    double v0;     ///< marginal value of ruin probability at w = 0
    double vb;     ///< marginal value at w = wb
    double wb;
    double cb;     ///< c / b
    double theta;  ///< (mu - b) / sigma^2

    double u_max() const { return rho; }

    double wealth_of_u(double u) const;  ///< htilde'(vb*u), decreasing in u
    double htilde_of_u(double u) const;
    double pistar_of_u(double u) const;

    double htilde(double v) const;
    double htilde_p(double v) const;
    double htilde_pp(double v) const;

    /// Inverts htilde'(v) = w on [vb, v0]; returns u = v/vb.
    double u_of_w(double w) const;
};

/// Roots B1 > 1 and B2 < 0 of  m_b B^2 - (b - lambda + m_b) B - lambda = 0.
std::pair<double, double> dual_exponents(const MarketParams& params);

/// Builds the dual solution for the borrowing level wb (from find_wb).
DualSolution solve_dual(const MarketParams& params, double c, double wb);

struct PrimalPoint {
    double psi;
    double pistar;
};

/// Ruin probability and optimal allocation at wealth w in [0, wb].
PrimalPoint dual_to_primal(const DualSolution& dual, double w);

/// Optimal allocation at w = 0, by the closed form independent of inversion.
double leverage_at_zero(const DualSolution& dual);
double leverage_at_zero(const MarketParams& params, double c, double wb);

} // namespace ruin
