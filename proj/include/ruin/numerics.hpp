#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ruin/errors.hpp"

namespace ruin::num {

/// Bracketed root finder: bisection with secant acceleration. The bracket
/// [lo, hi] must satisfy f(lo)*f(hi) <= 0. Converges to |hi-lo| <= xtol.
template <typename F>
double bisect_secant(F&& f, double lo, double hi, double flo, double fhi, double xtol,
                     int max_iter = 240) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw RootError("bisect_secant: root not bracketed");
    double x = lo, fx = flo;
    for (int i = 0; i < max_iter; ++i) {
        const double width = hi - lo;
        if (width <= xtol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo))
            return 0.5 * (lo + hi);
        // secant step from the bracket endpoints, bisection as fallback
        double cand = lo - flo * (hi - lo) / (fhi - flo);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        // keep strict progress: never let the candidate hug an endpoint
        const double margin = 0.01 * width;
        cand = std::clamp(cand, lo + margin, hi - margin);
        x = cand;
        fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

template <typename F>
double bisect_secant(F&& f, double lo, double hi, double xtol, int max_iter = 240) {
    const double flo = f(lo);
    const double fhi = f(hi);
    return bisect_secant(f, lo, hi, flo, fhi, xtol, max_iter);
}

/// Piecewise-cubic Hermite interpolant on strictly increasing knots.
/// Values and first derivatives are matched exactly at the knots, so when the
/// slopes come from an ODE right-hand side the interpolant satisfies the ODE
/// exactly at every knot.
class CubicHermite {
public:
    CubicHermite() = default;
    CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dydx);

    double value(double x) const;
    double derivative(double x) const;

    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }
    std::span<const double> slopes() const { return d_; }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

    /// True when every segment passes the Fritsch-Carlson monotonicity test.
    bool is_monotone() const;

private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, d_;
};

/// Integral of f over [a, b] using fixed 7-point Gauss-Legendre panels. The
/// caller picks the panel edges; accuracy is the caller's responsibility.
template <typename F>
double gauss7(F&& f, double a, double b) {
    // nodes/weights for [-1, 1]
    static constexpr double xs[7] = {
        0.0,
        0.4058451513773971669066064, -0.4058451513773971669066064,
        0.7415311855993944398638648, -0.7415311855993944398638648,
        0.9491079123427585245261897, -0.9491079123427585245261897};
    static constexpr double ws[7] = {
        0.4179591836734693877551020,
        0.3818300505051189449503698, 0.3818300505051189449503698,
        0.2797053914892766679014678, 0.2797053914892766679014678,
        0.1294849661688696932706114, 0.1294849661688696932706114};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

/// Scalar adaptive Dormand-Prince 5(4) integrator. Steps from `from` towards
/// `to` (either direction), reporting the state at every requested target.
struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 0.0;   // 0 -> heuristic
    long long max_steps = 20'000'000;
};

template <typename Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, OdeOptions opts) : f_(std::move(rhs)), opt_(opts) {}

    struct State {
        double x;
        double y;
    };

    void start(double x0, double y0) {
        s_ = {x0, y0};
        k1_ = f_(x0, y0);
        h_ = opt_.initial_step;
    }

    /// Advance to x_target exactly; returns the state there.
    State advance_to(double x_target) {
        const double dir = (x_target >= s_.x) ? 1.0 : -1.0;
        if (h_ == 0.0 || (h_ > 0) != (dir > 0)) h_ = dir * first_step_guess(x_target);
        while (dir * (x_target - s_.x) > 0.0) {
            if (++steps_ > opt_.max_steps)
                throw IntegrationError("ode: exceeded maximum step count");
            double h = h_;
            if (dir * (s_.x + h - x_target) > 0.0) h = x_target - s_.x;
            const double err = try_step(h);
            if (err <= 1.0) {
                s_ = trial_;
                k1_ = k7_; // FSAL
                const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h_ = h * std::clamp(grow, 0.2, 5.0);
            } else {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (std::abs(h_) < 1e3 * std::numeric_limits<double>::epsilon() * std::abs(s_.x))
                    throw IntegrationError("ode: step size underflow");
            }
        }
        return s_;
    }

    double slope() const { return k1_; }
    long long steps() const { return steps_; }

private:
    double first_step_guess(double x_target) const {
        const double span = std::abs(x_target - s_.x);
        return std::max(span * 1e-4, 1e-12);
    }

    // one trial step of size h; returns the scaled error estimate
    double try_step(double h) {
        const double x = s_.x, y = s_.y;
        const double k1 = k1_;
        const double k2 = f_(x + h * (1.0 / 5), y + h * (1.0 / 5) * k1);
        const double k3 = f_(x + h * (3.0 / 10), y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
        const double k4 = f_(x + h * (4.0 / 5),
                             y + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
        const double k5 =
            f_(x + h * (8.0 / 9), y + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                                           (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
        const double k6 = f_(x + h, y + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 +
                                             (46732.0 / 5247) * k3 + (49.0 / 176) * k4 -
                                             (5103.0 / 18656) * k5));
        const double ynew = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                                     (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
        const double k7 = f_(x + h, ynew);
        const double eterm = h * ((71.0 / 57600) * k1 - (71.0 / 16695) * k3 + (71.0 / 1920) * k4 -
                                  (17253.0 / 339200) * k5 + (22.0 / 525) * k6 - (1.0 / 40) * k7);
        trial_ = {x + h, ynew};
        k7_ = k7;
        const double scale = opt_.atol + opt_.rtol * std::max(std::abs(y), std::abs(ynew));
        return std::abs(eterm) / scale;
    }

    Rhs f_;
    OdeOptions opt_;
    State s_{0, 0};
    State trial_{0, 0};
    double k1_ = 0, k7_ = 0, h_ = 0;
    long long steps_ = 0;
};

} // namespace ruin::num
