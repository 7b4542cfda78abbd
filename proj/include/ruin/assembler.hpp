#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruin/dual_solver.hpp"
#include "ruin/model.hpp"
#include "ruin/riccati.hpp"

namespace ruin {

enum class RegionKind {
    Dual, ///< [0, w_b): leveraged, strategy from the dual transform
    Unit, ///< up to w_l: everything in the risky asset, h from the Riccati side
    Tail, ///< (w_l, c/r]: multiple of the unconstrained closed form
    Safe, ///< [c/r, inf): ruin probability zero, all wealth riskless
};

struct Region {
    double lo, hi;
    RegionKind kind;
};

struct Evaluation {
    double psi;     ///< minimum ruin probability, clamped to [0, 1]
    double pistar;  ///< optimal risky allocation, dollars
    double riskless;///< w - pistar; negative means borrowing at rate b
};

/// Piecewise-assembled minimum ruin probability and optimal strategy for a
/// constant-consumption model. Immutable after solve(); evaluation is pure.
class RuinSolution {
public:
    Evaluation evaluate(double w) const;
    double psi(double w) const { return evaluate(w).psi; }
    double pistar(double w) const { return evaluate(w).pistar; }

    Regime regime() const { return regime_; }
    double consumption() const { return c_; }
    const DerivedConstants& constants() const { return k_; }
    const MarketParams& params() const { return params_; }

    double beta() const { return beta_; }
    std::optional<double> wb() const { return wb_; }
    double wl() const { return k_.w_l; }
    double safe_level() const { return k_.safe_level; }
    /// Inflection point of the no-borrow problem; NaN for the unconstrained
    /// regime (no Riccati layer is built there).
    double wmu() const { return wmu_; }

    std::vector<Region> regions() const;

    /// Riccati layer, present for NoBorrow and Borrow solutions.
    const RiccatiSolution* riccati() const { return riccati_.get(); }
    const DualSolution* dual() const { return dual_ ? &*dual_ : nullptr; }

private:
    friend RuinSolution solve(const MarketParams&, double, Regime, int);
    friend RuinSolution assemble_borrow(const MarketParams&, double, const DerivedConstants&,
                                        std::shared_ptr<const RiccatiSolution>);

    MarketParams params_{};
    DerivedConstants k_{};
    double c_ = 0;
    Regime regime_ = Regime::Unconstrained;
    double beta_ = 1.0;
    std::optional<double> wb_;
    double wmu_ = 0;
    std::shared_ptr<const RiccatiSolution> riccati_;
    std::optional<DualSolution> dual_;
    num::CubicHermite h_; // unit-region h with slopes h/y
};

RuinSolution solve(const MarketParams& params, double c, Regime regime, int grid_points = 2048);

struct RegimeRow {
    double w;
    double psi_unconstrained;
    double psi_borrow;
    double psi_noborrow;
};

/// Tabulates all three regimes on the grid and verifies the pointwise
/// ordering psi <= psi_b <= psi_0 (with 1e-9 slack).
std::vector<RegimeRow> compare_regimes(const MarketParams& params, double c,
                                       std::span<const double> w_grid);

struct SweepPoint {
    double b;
    bool ok;
    std::string error;               ///< set when this b failed validation/solve
    double w_b;
    double beta_b;
    double leverage_at_zero;
    std::vector<double> psi_at_probes;
};

/// Borrow-regime diagnostics across borrowing rates; the Riccati layer is
/// shared since y does not depend on b. Values outside (r, mu) produce rows
/// flagged with an error instead of aborting the sweep.
std::vector<SweepPoint> limit_sweep(const MarketParams& params, double c,
                                    std::span<const double> b_values,
                                    std::span<const double> probes, int grid_points = 2048);

} // namespace ruin
