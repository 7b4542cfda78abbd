#include "ruin/closed_form.hpp"

#include <cmath>
#include <sstream>

namespace ruin {

namespace {

constexpr double kCaseTol = 1e-12;

// positive root of (p - rate) a^2 + (p - rate - m - lambda) a - lambda = 0
double positive_power_root(double rate, double p, double m, double lambda) {
    const double t = rate - p + lambda + m;
    return (t + std::sqrt(t * t + 4.0 * lambda * (p - rate))) / (2.0 * (p - rate));
}

} // namespace

double psi_unconstrained(double w, const DerivedConstants& k, double c) {
    (void)c;
    if (!(w >= 0.0)) throw DomainError("psi_unconstrained: wealth must be non-negative");
    if (w >= k.safe_level) return 0.0;
    const double r_over_c = 1.0 / k.safe_level;
    return std::pow(1.0 - r_over_c * w, k.d);
}

double pistar_unconstrained(double w, const DerivedConstants& k, double c) {
    (void)c;
    if (!(w >= 0.0 && w <= k.safe_level))
        throw DomainError("pistar_unconstrained: wealth outside [0, c/r]");
    return k.x * (k.safe_level - w);
}

double exponent_ar(const MarketParams& params, double p) {
    const double m = 0.5 * ((params.mu - params.r) / params.sigma) *
                     ((params.mu - params.r) / params.sigma);
    return positive_power_root(params.r, p, m, params.lambda);
}

double exponent_k(const MarketParams& params, double p) {
    const double s2 = params.sigma * params.sigma;
    const double g = params.mu - p - 0.5 * s2;
    return (g + std::sqrt(g * g + 2.0 * s2 * params.lambda)) / s2;
}

double exponent_ab(const MarketParams& params, double p) {
    const double m_b = 0.5 * ((params.mu - params.b) / params.sigma) *
                       ((params.mu - params.b) / params.sigma);
    return positive_power_root(params.b, p, m_b, params.lambda);
}

PowerSolution solve_proportional(const MarketParams& params, double p, double w0,
                                 Regime regime) {
    validate(params, ProportionalConsumption{p, w0}, regime);
    const double s2 = params.sigma * params.sigma;
    const double theta_r = (params.mu - params.r) / s2;

    if (regime == Regime::Unconstrained) {
        const double a = exponent_ar(params, p);
        return {a, w0, theta_r / (a + 1.0)};
    }

    if (regime == Regime::NoBorrow) {
        const double a_r = exponent_ar(params, p);
        const double q = theta_r / (a_r + 1.0);
        // a tie (q == 1) is resolved to the truncated rule; both branches agree there
        if (q < 1.0 - kCaseTol) return {a_r, w0, q};
        return {exponent_k(params, p), w0, 1.0};
    }

    const double theta_b = (params.mu - params.b) / s2;
    const double a_r = exponent_ar(params, p);
    const double k = exponent_k(params, p);
    const double a_b = exponent_ab(params, p);

    const double q1 = theta_r / (a_r + 1.0);
    const double q2lo = theta_b / (k + 1.0);
    const double q2hi = theta_r / (k + 1.0);
    const double q3 = theta_b / (a_b + 1.0);

    const bool c1 = q1 < 1.0 - kCaseTol;
    const bool c2 = (q2lo < 1.0 - kCaseTol) && (q2hi >= 1.0 - kCaseTol);
    const bool c3 = q3 >= 1.0 + kCaseTol;
    const bool tie = std::abs(q2lo - 1.0) <= kCaseTol || std::abs(q2hi - 1.0) <= kCaseTol ||
                     std::abs(q3 - 1.0) <= kCaseTol || std::abs(q1 - 1.0) <= kCaseTol;

    const int fired = int(c1) + int(c2) + int(c3);
    if (fired == 1) {
        if (c1) return {a_r, w0, q1};
        if (c2) return {k, w0, 1.0};
        return {a_b, w0, q3};
    }
    if (tie) return {exponent_k(params, p), w0, 1.0};

    std::ostringstream os;
    os << "solve_proportional: " << fired << " case conditions hold (q1=" << q1
       << ", q2=[" << q2lo << "," << q2hi << "], q3=" << q3 << ")";
    throw CaseSelectionError(os.str());
}

double proportional_psi(const PowerSolution& sol, double w) {
    if (!(w >= 0.0)) throw DomainError("proportional_psi: wealth must be non-negative");
    if (w <= sol.w0) return 1.0;
    return std::pow(w / sol.w0, -sol.exponent);
}

CrraEquivalence crra_equivalent(double a, const MarketParams& params, double p) {
    if (!(a > 0.0)) throw DomainError("crra_equivalent: exponent must be positive");
    return {1.0 + a, params.lambda + p};
}

} // namespace ruin
