#include "ruin/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ruin {

namespace {

struct RiccatiRhs {
    double sigma2, lambda, mu, c;
    double operator()(double w, double y) const {
        return 1.0 + (-2.0 * lambda * y * y + 2.0 * (mu * w - c) * y) / (sigma2 * w * w);
    }
};

} // namespace

AuxLine aux_line(AuxLineKind kind, const MarketParams& p, double c) {
    const double intercept = -c / p.lambda;
    switch (kind) {
        case AuxLineKind::Lending: return {(p.mu + p.r) / (2.0 * p.lambda), intercept};
        case AuxLineKind::Borrowing: return {(p.mu + p.b) / (2.0 * p.lambda), intercept};
        case AuxLineKind::Drift: return {p.mu / p.lambda, intercept};
    }
    throw Error("aux_line: bad kind");
}

double RiccatiSolution::y(double w) const {
    if (w < w_cut_) return -c_over_lambda_ + mu_over_lambda_ * w;
    return spline_.value(std::min(w, w_l_));
}

double RiccatiSolution::y_prime(double w) const {
    if (w < w_cut_) return mu_over_lambda_;
    return spline_.derivative(std::min(w, w_l_));
}

RiccatiSolution solve_riccati(const MarketParams& p, double c, const DerivedConstants& k,
                              int grid_points) {
    validate(p, ConstantConsumption{c}, Regime::NoBorrow);
    if (grid_points < 16) throw Error("solve_riccati: grid too coarse");

    const double wl = k.w_l;
    const double w_cut = 1e-6 * wl;
    const double y_terminal = -(1.0 / k.d) * (k.safe_level - wl);

    const RiccatiRhs rhs{p.sigma * p.sigma, p.lambda, p.mu, c};
    num::OdeOptions opts;
    num::DormandPrince<RiccatiRhs> ode(rhs, opts);
    ode.start(wl, y_terminal);

    const int n = grid_points;
    std::vector<double> grid(n), yv(n), ys(n);
    for (int i = 0; i < n; ++i) grid[i] = wl * double(i) / double(n - 1);
    grid[n - 1] = wl;

    yv[n - 1] = y_terminal;
    ys[n - 1] = rhs(wl, y_terminal);
    for (int i = n - 2; i >= 1; --i) {
        const auto st = ode.advance_to(grid[i]);
        if (!(st.y < 0.0)) throw IntegrationError("solve_riccati: y crossed zero");
        yv[i] = st.y;
        ys[i] = rhs(grid[i], st.y);
    }
    // the grid origin is the singular endpoint: pin the exact series values
    yv[0] = -c / p.lambda;
    ys[0] = p.mu / p.lambda;

    // continue to the series cutoff; agreement there checks backward accuracy
    const auto tail = ode.advance_to(w_cut);
    const double series_at_cut = -c / p.lambda + (p.mu / p.lambda) * w_cut;
    const double defect = std::abs(tail.y - series_at_cut);
    if (!(defect < 1e-5 * (c / p.lambda))) {
        std::ostringstream os;
        os << "solve_riccati: origin defect " << defect << " too large";
        throw IntegrationError(os.str());
    }

    RiccatiSolution sol;
    sol.spline_ = num::CubicHermite(std::move(grid), std::move(yv), std::move(ys));
    sol.w_l_ = wl;
    sol.w_cut_ = w_cut;
    sol.origin_defect_ = defect;
    sol.c_over_lambda_ = c / p.lambda;
    sol.mu_over_lambda_ = p.mu / p.lambda;
    return sol;
}

namespace {

// unique sign change of y - line on (0, w_l), refined to 1e-12 in w
double line_crossing(const RiccatiSolution& ric, const AuxLine& line, const char* what) {
    const auto grid = ric.grid();
    const auto yv = ric.y_values();
    const auto g = [&](double w) { return ric.y(w) - line(w); };

    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double gi = yv[i] - line(grid[i]);
        const double gj = yv[i + 1] - line(grid[i + 1]);
        if (gi > 0.0 && gj <= 0.0)
            return num::bisect_secant(g, grid[i], grid[i + 1], gi, gj, 1e-12);
    }
    throw RootError(std::string(what) + ": no sign change of y against the line");
}

} // namespace

double find_wb(const RiccatiSolution& ric, const MarketParams& p, double c) {
    if (!(p.b > p.r && p.b < p.mu)) throw ParameterError("find_wb: requires r < b < mu");
    return line_crossing(ric, aux_line(AuxLineKind::Borrowing, p, c), "find_wb");
}

double find_wmu(const RiccatiSolution& ric, const MarketParams& p, double c) {
    if (p.mu <= p.lambda) return 0.0;
    return line_crossing(ric, aux_line(AuxLineKind::Drift, p, c), "find_wmu");
}

std::vector<double> reconstruct_h(const RiccatiSolution& ric, double anchor_w,
                                  double anchor_value, std::span<const double> targets) {
    if (!(anchor_w >= 0.0 && anchor_w <= ric.w_l()))
        throw DomainError("reconstruct_h: anchor outside [0, w_l]");
    if (!(anchor_value > 0.0 && anchor_value <= 1.0))
        throw DomainError("reconstruct_h: anchor value outside (0, 1]");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!(targets[i] >= 0.0 && targets[i] <= ric.w_l() * (1.0 + 1e-12)))
            throw DomainError("reconstruct_h: target outside [0, w_l]");
        if (i > 0 && !(targets[i] > targets[i - 1]))
            throw DomainError("reconstruct_h: targets must be ascending");
    }

    const auto inv_y = [&](double s) {
        const double ys = ric.y(s);
        if (!(ys < 0.0)) throw IntegrationError("reconstruct_h: y vanished on the range");
        return 1.0 / ys;
    };
    // split each leg at grid knots so the quadrature panels stay inside one
    // cubic segment
    const auto grid = ric.grid();
    const auto integrate = [&](double a, double b) {
        if (a == b) return 0.0;
        const double lo = std::min(a, b), hi = std::max(a, b);
        double acc = 0.0;
        auto it = std::upper_bound(grid.begin(), grid.end(), lo);
        double left = lo;
        while (it != grid.end() && *it < hi) {
            acc += num::gauss7(inv_y, left, *it);
            left = *it;
            ++it;
        }
        acc += num::gauss7(inv_y, left, hi);
        return (a < b) ? acc : -acc;
    };

    std::vector<double> h(targets.size());
    if (targets.empty()) return h;
    double log_h = integrate(anchor_w, targets[0]);
    h[0] = anchor_value * std::exp(log_h);
    for (std::size_t i = 1; i < targets.size(); ++i) {
        log_h += integrate(targets[i - 1], targets[i]);
        h[i] = anchor_value * std::exp(log_h);
    }
    return h;
}

} // namespace ruin
