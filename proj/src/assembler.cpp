#include "ruin/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ruin/closed_form.hpp"

namespace ruin {

namespace {

// unit-region h spline over [anchor_w, w_l]: knots on the shared Riccati grid
// plus exact endpoints, slopes from h' = h/y
num::CubicHermite build_unit_spline(const RiccatiSolution& ric, double anchor_w,
                                    double anchor_value) {
    const auto grid = ric.grid();
    std::vector<double> knots;
    knots.reserve(grid.size() + 2);
    knots.push_back(anchor_w);
    for (double g : grid) {
        if (g > anchor_w * (1.0 + 1e-12) + 1e-300 && g < ric.w_l()) {
            if (!knots.empty() && g - knots.back() < 1e-9 * ric.w_l()) continue;
            knots.push_back(g);
        }
    }
    if (ric.w_l() - knots.back() < 1e-9 * ric.w_l()) knots.pop_back();
    knots.push_back(ric.w_l());

    std::vector<double> h = reconstruct_h(ric, anchor_w, anchor_value, knots);
    std::vector<double> slopes(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) slopes[i] = h[i] / ric.y(knots[i]);
    return num::CubicHermite(std::move(knots), std::move(h), std::move(slopes));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

RuinSolution assemble_borrow(const MarketParams& params, double c, const DerivedConstants& k,
                             std::shared_ptr<const RiccatiSolution> ric) {
    RuinSolution s;
    s.params_ = params;
    s.k_ = k;
    s.c_ = c;
    s.regime_ = Regime::Borrow;
    s.riccati_ = std::move(ric);
    s.wmu_ = find_wmu(*s.riccati_, params, c);

    const double wb = find_wb(*s.riccati_, params, c);
    s.wb_ = wb;
    s.dual_ = solve_dual(params, c, wb);
    const double h_at_wb = dual_to_primal(*s.dual_, wb).psi;
    s.h_ = build_unit_spline(*s.riccati_, wb, h_at_wb);
    s.beta_ = s.h_.values().back() * std::pow(1.0 - params.r * k.w_l / c, -k.d);
    return s;
}

RuinSolution solve(const MarketParams& params, double c, Regime regime, int grid_points) {
    validate(params, ConstantConsumption{c}, regime);
    const DerivedConstants k = derive_constants(params, c);

    if (regime == Regime::Unconstrained) {
        RuinSolution s;
        s.params_ = params;
        s.k_ = k;
        s.c_ = c;
        s.regime_ = Regime::Unconstrained;
        s.beta_ = 1.0;
        s.wmu_ = std::numeric_limits<double>::quiet_NaN();
        return s;
    }

    auto ric = std::make_shared<const RiccatiSolution>(
        solve_riccati(params, c, k, grid_points));

    if (regime == Regime::Borrow) return assemble_borrow(params, c, k, std::move(ric));

    RuinSolution s;
    s.params_ = params;
    s.k_ = k;
    s.c_ = c;
    s.regime_ = Regime::NoBorrow;
    s.riccati_ = std::move(ric);
    s.wmu_ = find_wmu(*s.riccati_, params, c);
    s.h_ = build_unit_spline(*s.riccati_, 0.0, 1.0);
    s.beta_ = s.h_.values().back() * std::pow(1.0 - params.r * k.w_l / c, -k.d);
    return s;
}

Evaluation RuinSolution::evaluate(double w) const {
    if (!(w >= 0.0)) throw DomainError("evaluate: wealth must be non-negative");
    const double safe = k_.safe_level;
    if (w >= safe) return {0.0, 0.0, w};

    // boundary points dispatch to the right-hand region; the pasting
    // conditions make both sides agree there
    if (regime_ == Regime::Unconstrained) {
        const double pi = k_.x * (safe - w);
        return {clamp01(psi_unconstrained(w, k_, c_)), pi, w - pi};
    }
    if (w >= k_.w_l) {
        const double pi = k_.x * (safe - w);
        const double psi = beta_ * std::pow(1.0 - params_.r * w / c_, k_.d);
        return {clamp01(psi), pi, w - pi};
    }
    if (regime_ == Regime::Borrow && w < *wb_) {
        const auto pt = dual_to_primal(*dual_, w);
        return {clamp01(pt.psi), pt.pistar, w - pt.pistar};
    }
    return {clamp01(h_.value(w)), w, 0.0};
}

std::vector<Region> RuinSolution::regions() const {
    std::vector<Region> out;
    const double safe = k_.safe_level;
    if (regime_ == Regime::Unconstrained) {
        out.push_back({0.0, safe, RegionKind::Tail});
    } else {
        double unit_lo = 0.0;
        if (regime_ == Regime::Borrow) {
            out.push_back({0.0, *wb_, RegionKind::Dual});
            unit_lo = *wb_;
        }
        out.push_back({unit_lo, k_.w_l, RegionKind::Unit});
        out.push_back({k_.w_l, safe, RegionKind::Tail});
    }
    out.push_back({safe, std::numeric_limits<double>::infinity(), RegionKind::Safe});
    return out;
}

std::vector<RegimeRow> compare_regimes(const MarketParams& params, double c,
                                       std::span<const double> w_grid) {
    const RuinSolution un = solve(params, c, Regime::Unconstrained);
    const RuinSolution nb = solve(params, c, Regime::NoBorrow);
    const RuinSolution bo = solve(params, c, Regime::Borrow);

    std::vector<RegimeRow> rows;
    rows.reserve(w_grid.size());
    for (double w : w_grid) {
        RegimeRow row{w, un.psi(w), bo.psi(w), nb.psi(w)};
        if (row.psi_unconstrained > row.psi_borrow + 1e-9 ||
            row.psi_borrow > row.psi_noborrow + 1e-9) {
            std::ostringstream os;
            os << "compare_regimes: ordering violated at w = " << w;
            throw Error(os.str());
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepPoint> limit_sweep(const MarketParams& params, double c,
                                    std::span<const double> b_values,
                                    std::span<const double> probes, int grid_points) {
    const DerivedConstants k = derive_constants(params, c);
    // y does not depend on b, so one Riccati layer serves the whole sweep
    auto ric = std::make_shared<const RiccatiSolution>(
        solve_riccati(params, c, k, grid_points));

    std::vector<SweepPoint> out;
    out.reserve(b_values.size());
    for (double b : b_values) {
        SweepPoint pt;
        pt.b = b;
        MarketParams pb = params;
        pb.b = b;
        try {
            validate(pb, ConstantConsumption{c}, Regime::Borrow);
            RuinSolution sol = assemble_borrow(pb, c, k, ric);
            pt.ok = true;
            pt.w_b = *sol.wb();
            pt.beta_b = sol.beta();
            pt.leverage_at_zero = leverage_at_zero(*sol.dual());
            for (double w : probes) pt.psi_at_probes.push_back(sol.psi(w));
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
            pt.w_b = pt.beta_b = pt.leverage_at_zero =
                std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace ruin
