#include "ruin/dual_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace ruin {

namespace {

constexpr double kExpOverflow = 700.0;

double safe_exp(double a) {
    if (a > kExpOverflow) return std::numeric_limits<double>::infinity();
    return std::exp(a);
}

} // namespace

std::pair<double, double> dual_exponents(const MarketParams& p) {
    if (!(p.b < p.mu)) throw ParameterError("dual_exponents: requires b < mu");
    const double m_b = 0.5 * ((p.mu - p.b) / p.sigma) * ((p.mu - p.b) / p.sigma);
    const double t = p.b - p.lambda + m_b;
    const double disc = std::sqrt(t * t + 4.0 * p.lambda * m_b);
    return {(t + disc) / (2.0 * m_b), (t - disc) / (2.0 * m_b)};
}

double DualSolution::wealth_of_u(double u) const {
    const double lu = std::log(u);
    const double p1 = safe_exp((B1 - 1.0) * lu);
    const double p2 = safe_exp((B2 - 1.0) * lu);
    return cb - (A1 * p1 + A2 * p2) / (B1 - B2);
}

double DualSolution::htilde_of_u(double u) const {
    const double lu = std::log(u);
    const double p1 = safe_exp((B1 - 1.0) * lu);
    const double p2 = safe_exp((B2 - 1.0) * lu);
    return vb * u * (cb - A1 * p1 / (B1 * (B1 - B2)) - A2 * p2 / (B2 * (B1 - B2)));
}

double DualSolution::pistar_of_u(double u) const {
    const double lu = std::log(u);
    const double p1 = safe_exp((B1 - 1.0) * lu);
    const double p2 = safe_exp((B2 - 1.0) * lu);
    return theta * ((B1 - 1.0) * A1 * p1 + (B2 - 1.0) * A2 * p2) / (B1 - B2);
}

double DualSolution::htilde(double v) const { return htilde_of_u(v / vb); }
double DualSolution::htilde_p(double v) const { return wealth_of_u(v / vb); }

double DualSolution::htilde_pp(double v) const {
    const double u = v / vb;
    const double lu = std::log(u);
    const double p1 = safe_exp((B1 - 2.0) * lu);
    const double p2 = safe_exp((B2 - 2.0) * lu);
    return -((B1 - 1.0) * A1 * p1 + (B2 - 1.0) * A2 * p2) / ((B1 - B2) * vb);
}

double DualSolution::u_of_w(double w) const {
    if (!(w >= 0.0 && w <= wb * (1.0 + 1e-12)))
        throw InversionError("dual inversion: wealth outside [0, wb]");
    if (w <= 0.0) return rho;
    if (w >= wb) return 1.0;
    // wealth_of_u decreases from wb at u=1 to 0 at u=rho; plain bisection is
    // reliable even when B1 is huge and the curve is extremely steep
    double lo = 1.0, hi = rho;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (wealth_of_u(mid) > w)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

DualSolution solve_dual(const MarketParams& p, double c, double wb) {
    if (!(p.b > p.r && p.b < p.mu)) throw ParameterError("solve_dual: requires r < b < mu");
    if (!(wb > 0.0)) throw ParameterError("solve_dual: wb must be positive");
    if (!(wb < c / p.b)) throw ParameterError("solve_dual: wb must lie below c/b");

    DualSolution d{};
    d.wb = wb;
    d.cb = c / p.b;
    d.theta = (p.mu - p.b) / (p.sigma * p.sigma);
    std::tie(d.B1, d.B2) = dual_exponents(p);
    d.A1 = wb / d.theta + (d.cb - wb) * (1.0 - d.B2);
    d.A2 = -wb / d.theta + (d.cb - wb) * (d.B1 - 1.0);
    if (!(d.A1 > 0.0))
        throw RootError("solve_dual: leading bracket not positive (wb >= c/b?)");

    // solve for rho = v0/vb in log space: F(0) = -wb < 0 and F grows without
    // bound, so expand the upper end until the sign flips
    const auto F = [&](double t) {
        const double p1 = safe_exp((d.B1 - 1.0) * t);
        const double p2 = safe_exp((d.B2 - 1.0) * t);
        return (d.A1 * p1 + d.A2 * p2) / (d.B1 - d.B2) - d.cb;
    };
    const double t_cap = std::log(1e12);
    double t_hi = 1.0 / std::max(d.B1, 2.0);
    while (F(t_hi) < 0.0) {
        t_hi *= 2.0;
        if (t_hi > t_cap) throw RootError("solve_dual: bracket expansion exceeded rho = 1e12");
    }
    double lo = 0.0, hi = t_hi;
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (F(mid) < 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    // Newton polish while the exponentials stay in range
    for (int i = 0; i < 4; ++i) {
        const double e1 = (d.B1 - 1.0) * t, e2 = (d.B2 - 1.0) * t;
        if (e1 > kExpOverflow) break;
        const double p1 = std::exp(e1), p2 = std::exp(e2);
        const double f = (d.A1 * p1 + d.A2 * p2) / (d.B1 - d.B2) - d.cb;
        const double fp =
            (d.A1 * (d.B1 - 1.0) * p1 + d.A2 * (d.B2 - 1.0) * p2) / (d.B1 - d.B2);
        if (fp == 0.0) break;
        const double step = f / fp;
        const double tn = t - step;
        if (!(tn > 0.0)) break;
        t = tn;
        if (std::abs(step) < 1e-16 * std::max(1.0, t)) break;
    }
    d.rho = std::exp(t);

    // htilde(v0) = 1 pins v0 directly once rho is known
    const double p1 = safe_exp((d.B1 - 1.0) * t);
    const double p2 = safe_exp((d.B2 - 1.0) * t);
    const double K = d.cb - d.A1 * p1 / (d.B1 * (d.B1 - d.B2)) -
                     d.A2 * p2 / (d.B2 * (d.B1 - d.B2));
    if (!(K > 0.0)) throw RootError("solve_dual: marginal value at zero not positive");
    d.v0 = 1.0 / K;
    d.vb = d.v0 / d.rho;

    // raw coefficients, for reporting; they overflow once B1 is large
    const double l_vb = std::log(d.vb);
    const double e1 = (1.0 - d.B1) * l_vb, e2 = (1.0 - d.B2) * l_vb;
    d.D1 = (e1 > kExpOverflow) ? -std::numeric_limits<double>::infinity()
                               : -std::exp(e1) / (d.B1 * (d.B1 - d.B2)) * d.A1;
    d.D2 = (e2 > kExpOverflow) ? std::numeric_limits<double>::infinity()
                               : -std::exp(e2) / (d.B2 * (d.B1 - d.B2)) * d.A2;
    return d;
}

PrimalPoint dual_to_primal(const DualSolution& dual, double w) {
    if (!(w >= 0.0)) throw DomainError("dual_to_primal: wealth must be non-negative");
    const double u = dual.u_of_w(w);
    const double psi = dual.htilde_of_u(u) - w * dual.vb * u;
    return {psi, dual.pistar_of_u(u)};
}

double leverage_at_zero(const DualSolution& d) {
    // closed form at v = v0, independent of the inversion path
    const double lr = (d.B1 - 1.0) * std::log(d.rho);
    return d.theta * (d.B2 - 1.0) * d.cb +
           safe_exp(lr) * (d.wb + d.theta * (d.cb - d.wb) * (1.0 - d.B2));
}

double leverage_at_zero(const MarketParams& p, double c, double wb) {
    return leverage_at_zero(solve_dual(p, c, wb));
}

} // namespace ruin
