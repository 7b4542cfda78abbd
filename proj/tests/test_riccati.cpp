#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "reference_case.hpp"
#include "ruin/riccati.hpp"

using namespace ruin;

namespace {

double z_line(const MarketParams& p, double c, double w) {
    return (p.mu + p.r) / (2.0 * p.lambda) * w - c / p.lambda;
}

// test-only oracle: classic fixed-step RK4 for the same equation, integrated
// backward from w_l and sampled at chosen probes. Independent of the adaptive
// integrator and interpolant used by the implementation.
std::map<double, double> rk4_reference(const MarketParams& p, double c,
                                       const DerivedConstants& k,
                                       std::vector<double> probes, double h) {
    const double s2 = p.sigma * p.sigma;
    const auto f = [&](double w, double y) {
        return 1.0 + (-2.0 * p.lambda * y * y + 2.0 * (p.mu * w - c) * y) / (s2 * w * w);
    };
    std::sort(probes.begin(), probes.end(), std::greater<>());
    std::map<double, double> out;
    double w = k.w_l;
    double y = -(1.0 / k.d) * (k.safe_level - k.w_l);
    std::size_t next = 0;
    while (next < probes.size()) {
        double step = -h;
        if (w + step < probes[next]) step = probes[next] - w;
        const double k1 = f(w, y);
        const double k2 = f(w + 0.5 * step, y + 0.5 * step * k1);
        const double k3 = f(w + 0.5 * step, y + 0.5 * step * k2);
        const double k4 = f(w + step, y + step * k3);
        y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        w += step;
        if (w <= probes[next] + 1e-15) {
            out[probes[next]] = y;
            ++next;
        }
    }
    return out;
}

} // namespace

TEST_CASE("auxiliary lines for the reference case") {
    const auto p = refcase::params();
    const auto z = aux_line(AuxLineKind::Lending, p, refcase::c);
    CHECK(z.slope == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.intercept == doctest::Approx(-25.0).epsilon(1e-14));
    const auto zb = aux_line(AuxLineKind::Borrowing, p, refcase::c);
    CHECK(zb.slope == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(zb.intercept == doctest::Approx(-25.0).epsilon(1e-14));
    const auto zmu = aux_line(AuxLineKind::Drift, p, refcase::c);
    CHECK(zmu.slope == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(zmu.intercept == doctest::Approx(-25.0).epsilon(1e-14));
}

TEST_CASE("riccati solution endpoints and frozen probes") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);

    CHECK(ric.y(k.w_l) == doctest::Approx(refcase::y_at_wl).epsilon(1e-12));
    // the terminal value coincides with the lending line
    CHECK(ric.y(k.w_l) == doctest::Approx(z_line(p, refcase::c, k.w_l)).epsilon(1e-12));
    CHECK(ric.y(0.0) == doctest::Approx(-25.0).epsilon(1e-14));
    CHECK(ric.origin_defect() < 1e-8);

    // terminal slope: 1 + (r+m)/lambda - (r/lambda) d
    const double yp = 1.0 + (p.r + k.m) / p.lambda - (p.r / p.lambda) * k.d;
    CHECK(yp == doctest::Approx(refcase::yp_at_wl).epsilon(1e-12));
    CHECK(ric.y_prime(k.w_l) == doctest::Approx(yp).epsilon(1e-9));
    CHECK(ric.y_prime(0.0) == doctest::Approx(p.mu / p.lambda).epsilon(1e-12));

    CHECK(ric.y(2.0) == doctest::Approx(refcase::y_at_2).epsilon(1e-8));
    CHECK(ric.y(5.0) == doctest::Approx(refcase::y_at_5).epsilon(1e-8));
    CHECK(ric.y(10.0) == doctest::Approx(refcase::y_at_10).epsilon(1e-8));
    CHECK(ric.y(14.0) == doctest::Approx(refcase::y_at_14).epsilon(1e-8));
}

TEST_CASE("riccati solution agrees with a fixed-step RK4 oracle") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const auto oracle = rk4_reference(p, refcase::c, k, {2.0, 5.0, 10.0}, 2e-4);
    for (const auto& [w, y] : oracle) CHECK(ric.y(w) == doctest::Approx(y).epsilon(1e-9));
}

TEST_CASE("y stays above the lending line inside (0, w_l)") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const auto grid = ric.grid();
    const auto yv = ric.y_values();
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        CHECK(yv[i] > z_line(p, refcase::c, grid[i]));
    CHECK(std::abs(ric.y(0.0) - z_line(p, refcase::c, 0.0)) < 1e-6);
    CHECK(std::abs(ric.y(k.w_l) - z_line(p, refcase::c, k.w_l)) < 1e-6);
}

TEST_CASE("interpolant satisfies the equation at every grid point") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const double s2 = p.sigma * p.sigma;
    const auto grid = ric.grid();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double w = grid[i];
        const double y = ric.y(w);
        const double yp = ric.y_prime(w);
        const double resid =
            s2 * w * w * (yp - 1.0) + 2.0 * p.lambda * y * y - 2.0 * (p.mu * w - refcase::c) * y;
        const double scale = std::max({std::abs(s2 * w * w * (yp - 1.0)),
                                       std::abs(2.0 * p.lambda * y * y),
                                       std::abs(2.0 * (p.mu * w - refcase::c) * y)});
        CHECK(std::abs(resid) < 1e-8 * scale);
    }
    CHECK(ric.interpolant().is_monotone());
}

TEST_CASE("borrowing level matches the worked example") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const double wb = find_wb(ric, p, refcase::c);
    CHECK(std::abs(wb - 10.62) < 0.02);
    CHECK(wb == doctest::Approx(refcase::w_b).epsilon(1e-7));
    // the root sits on the borrowing line
    CHECK(ric.y(wb) == doctest::Approx(1.25 * wb - 25.0).epsilon(1e-9));
}

TEST_CASE("borrowing level approaches the lending level as b drops to r") {
    const auto p0 = refcase::params();
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    double prev = 0.0;
    for (double b : {0.021, 0.0201, 0.02001}) {
        MarketParams p = p0;
        p.b = b;
        const double wb = find_wb(ric, p, refcase::c);
        CHECK(wb > prev);
        prev = wb;
    }
    CHECK(k.w_l - prev < 0.01);
}

TEST_CASE("borrowing level decreases as the borrowing rate rises") {
    const auto p0 = refcase::params();
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    double prev = 1e9;
    for (double b : {0.025, 0.03, 0.04, 0.05, 0.055, 0.059}) {
        MarketParams p = p0;
        p.b = b;
        const double wb = find_wb(ric, p, refcase::c);
        CHECK(wb < prev);
        prev = wb;
    }
}

TEST_CASE("find_wb input checking") {
    const auto p0 = refcase::params();
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    MarketParams p = p0;
    p.b = p.mu;
    CHECK_THROWS_AS(find_wb(ric, p, refcase::c), ParameterError);
    p.b = p.r;
    CHECK_THROWS_AS(find_wb(ric, p, refcase::c), ParameterError);
}

TEST_CASE("inflection point location") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const double wmu = find_wmu(ric, p, refcase::c);
    CHECK(std::abs(wmu - 7.39) < 0.02);
    CHECK(wmu == doctest::Approx(refcase::w_mu).epsilon(1e-6));

    const double wb = find_wb(ric, p, refcase::c);
    CHECK(wmu < wb);
    CHECK(wb < k.w_l);

    // a hazard rate above the drift leaves the no-borrow probability convex
    MarketParams p2 = refcase::params();
    p2.lambda = 0.08;
    const auto k2 = derive_constants(p2, refcase::c);
    const auto ric2 = solve_riccati(p2, refcase::c, k2);
    CHECK(find_wmu(ric2, p2, refcase::c) == 0.0);
}

TEST_CASE("h reconstruction from the log-derivative") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);

    const std::vector<double> at_zero{0.0};
    CHECK(reconstruct_h(ric, 0.0, 1.0, at_zero)[0] == doctest::Approx(1.0));

    // h'(0)/h(0) = 1/y(0) = -lambda/c
    const double eps = 1e-6;
    const std::vector<double> near_zero{0.0, eps};
    const auto h0 = reconstruct_h(ric, 0.0, 1.0, near_zero);
    CHECK((h0[1] - h0[0]) / eps == doctest::Approx(-p.lambda / refcase::c).epsilon(1e-6));

    // multiplier beta_0 = h(w_l) (1 - r w_l / c)^(-d) is at least one
    const std::vector<double> at_wl{k.w_l};
    const double h_wl = reconstruct_h(ric, 0.0, 1.0, at_wl)[0];
    const double beta0 = h_wl * std::pow(1.0 - p.r * k.w_l / refcase::c, -k.d);
    CHECK(beta0 >= 1.0);
    CHECK(beta0 == doctest::Approx(refcase::beta0).epsilon(1e-9));
}

TEST_CASE("reconstructed h satisfies the second-order equation") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const auto grid = ric.grid();
    std::vector<double> targets(grid.begin(), grid.end());
    const auto h = reconstruct_h(ric, 0.0, 1.0, targets);

    for (std::size_t i = 0; i + 1 < h.size(); ++i) CHECK(h[i + 1] < h[i]);
    CHECK(h.back() > 0.0);

    // fourth-order central differences on the uniform grid
    const double dw = grid[1] - grid[0];
    const double s2 = p.sigma * p.sigma;
    for (std::size_t i = 2; i + 2 < grid.size(); ++i) {
        const double w = grid[i];
        const double hp =
            (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dw);
        const double hpp =
            (-h[i + 2] + 16.0 * h[i + 1] - 30.0 * h[i] + 16.0 * h[i - 1] - h[i - 2]) /
            (12.0 * dw * dw);
        const double resid =
            p.lambda * h[i] - (p.mu * w - refcase::c) * hp - 0.5 * s2 * w * w * hpp;
        const double scale = std::max({std::abs(p.lambda * h[i]),
                                       std::abs((p.mu * w - refcase::c) * hp),
                                       std::abs(0.5 * s2 * w * w * hpp)});
        CHECK(std::abs(resid) < 1e-6 * scale);
    }
}

TEST_CASE("reconstruct_h argument checking") {
    const auto p = refcase::params();
    const auto k = derive_constants(p, refcase::c);
    const auto ric = solve_riccati(p, refcase::c, k);
    const std::vector<double> ok{1.0, 2.0};
    CHECK_THROWS_AS(reconstruct_h(ric, -1.0, 1.0, ok), DomainError);
    CHECK_THROWS_AS(reconstruct_h(ric, 0.0, 0.0, ok), DomainError);
    CHECK_THROWS_AS(reconstruct_h(ric, 0.0, 2.0, ok), DomainError);
    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(reconstruct_h(ric, 0.0, 1.0, unsorted), DomainError);
    const std::vector<double> outside{1.0, 99.0};
    CHECK_THROWS_AS(reconstruct_h(ric, 0.0, 1.0, outside), DomainError);
}

TEST_CASE("endpoint identity holds over random parameters") {
    // the terminal value of y always touches the lending line at w_l
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        MarketParams p{};
        p.r = 0.005 + 0.05 * u(rng);
        p.mu = p.r + 0.005 + 0.18 * u(rng);
        p.b = 0.5 * (p.r + p.mu);
        p.sigma = 0.1 + 0.4 * u(rng);
        p.lambda = 0.01 + 0.14 * u(rng);
        const double c = 0.5 + 2.0 * u(rng);
        const auto k = derive_constants(p, c);
        const double y_wl = -(1.0 / k.d) * (k.safe_level - k.w_l);
        CHECK(y_wl == doctest::Approx(z_line(p, c, k.w_l)).epsilon(1e-10));
    }
}
