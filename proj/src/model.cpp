#include "ruin/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ruin {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParameterError(what); }

void check_finite(const MarketParams& p) {
    for (double v : {p.r, p.b, p.mu, p.sigma, p.lambda})
        if (!std::isfinite(v)) fail("market parameters must be finite");
}

} // namespace

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::Unconstrained: return "unconstrained";
        case Regime::NoBorrow: return "noborrow";
        case Regime::Borrow: return "borrow";
    }
    return "?";
}

void validate(const MarketParams& p, const ConsumptionSpec& consumption, Regime regime) {
    check_finite(p);
    if (!(p.sigma > 0.0)) fail("sigma must be positive");
    if (!(p.lambda > 0.0)) fail("lambda must be positive");
    if (!(p.r > 0.0)) fail("r must be positive");
    if (!(p.mu > p.r)) fail("mu must exceed r");

    if (regime == Regime::Borrow) {
        // b == r is served by the Unconstrained regime; b == mu degenerates
        // the dual exponents, so the borrowing regime needs r < b < mu.
        if (!(p.b > p.r)) fail("borrow regime requires b > r");
        if (!(p.b < p.mu)) fail("borrow regime requires b < mu");
    }

    if (const auto* cc = std::get_if<ConstantConsumption>(&consumption)) {
        if (!(std::isfinite(cc->c) && cc->c > 0.0)) fail("c must be positive");
    } else {
        const auto& pc = std::get<ProportionalConsumption>(consumption);
        if (!(std::isfinite(pc.p) && pc.p > p.r)) fail("p must exceed r");
        if (!(std::isfinite(pc.w0) && pc.w0 > 0.0)) fail("w0 must be positive");
        if (regime == Regime::Borrow && !(p.b < std::min(p.mu, pc.p)))
            fail("proportional borrow regime requires b < min(mu, p)");
    }
}

DerivedConstants derive_constants(const MarketParams& p, double c) {
    validate(p, ConstantConsumption{c}, Regime::Unconstrained);

    DerivedConstants k{};
    k.m = 0.5 * ((p.mu - p.r) / p.sigma) * ((p.mu - p.r) / p.sigma);
    k.m_b = 0.5 * ((p.mu - p.b) / p.sigma) * ((p.mu - p.b) / p.sigma);
    const double s = p.r + p.lambda + k.m;
    k.d = (s + std::sqrt(s * s - 4.0 * p.r * p.lambda)) / (2.0 * p.r);
    k.x = ((p.mu - p.r) / (p.sigma * p.sigma)) / (k.d - 1.0);
    k.safe_level = c / p.r;
    k.w_l = k.x / (1.0 + k.x) * k.safe_level;
    return k;
}

} // namespace ruin
