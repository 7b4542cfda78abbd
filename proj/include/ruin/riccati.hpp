#pragma once

#include <span>
#include <vector>

#include "ruin/model.hpp"
#include "ruin/numerics.hpp"

namespace ruin {

/// Straight line a*w + intercept; all three auxiliary lines share the
/// intercept -c/lambda.
struct AuxLine {
    double slope;
    double intercept;
    double operator()(double w) const { return slope * w + intercept; }
};

enum class AuxLineKind {
    Lending,   ///< z, slope (mu+r)/(2 lambda)
    Borrowing, ///< z_b, slope (mu+b)/(2 lambda)
    Drift,     ///< z_mu, slope mu/lambda
};

AuxLine aux_line(AuxLineKind kind, const MarketParams& params, double c);

/// Dense solution of the first-order equation for y = h/h' on [0, w_l],
///
///   sigma^2 w^2 (y' - 1) = -2 lambda y^2 + 2 (mu w - c) y,
///
/// integrated backward from the exact terminal value at w_l. Evaluation below
/// taylor_cutoff() uses the series anchor y ~ -c/lambda + (mu/lambda) w,
/// which removes the singular endpoint from the interpolant's domain.
class RiccatiSolution {
public:
    double y(double w) const;
    double y_prime(double w) const;

    double w_l() const { return w_l_; }
    double taylor_cutoff() const { return w_cut_; }
    /// |integrated - series| at the integration stop, a backward-accuracy check.
    double origin_defect() const { return origin_defect_; }

    std::span<const double> grid() const { return spline_.knots(); }
    std::span<const double> y_values() const { return spline_.values(); }
    std::span<const double> y_slopes() const { return spline_.slopes(); }
    const num::CubicHermite& interpolant() const { return spline_; }

private:
    friend RiccatiSolution solve_riccati(const MarketParams&, double, const DerivedConstants&,
                                         int);
    num::CubicHermite spline_;
    double w_l_ = 0, w_cut_ = 0, origin_defect_ = 0;
    double c_over_lambda_ = 0, mu_over_lambda_ = 0;
};

RiccatiSolution solve_riccati(const MarketParams& params, double c, const DerivedConstants& k,
                              int grid_points = 2048);

/// Borrowing level: the unique root of y(w) = z_b(w) in (0, w_l).
double find_wb(const RiccatiSolution& ric, const MarketParams& params, double c);

/// Inflection point of the no-borrowing ruin probability: the positive root of
/// y(w) = z_mu(w) when mu > lambda, else 0.
double find_wmu(const RiccatiSolution& ric, const MarketParams& params, double c);

/// h at the given targets (ascending, within [0, w_l]) from
/// h(w) = anchor_value * exp( integral of 1/y from anchor_w to w ).
std::vector<double> reconstruct_h(const RiccatiSolution& ric, double anchor_w,
                                  double anchor_value, std::span<const double> targets);

} // namespace ruin
