#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reference_case.hpp"
#include "ruin/dual_solver.hpp"
#include "ruin/riccati.hpp"

using namespace ruin;

namespace {

DualSolution reference_dual() {
    return solve_dual(refcase::params(), refcase::c, refcase::w_b);
}

} // namespace

TEST_CASE("dual exponents") {
    const auto [B1, B2] = dual_exponents(refcase::params());
    CHECK(B1 == doctest::Approx(refcase::B1).epsilon(1e-12));
    CHECK(B2 == doctest::Approx(refcase::B2).epsilon(1e-12));
    CHECK(B1 > 1.0);
    CHECK(B2 < 0.0);

    // residual of the defining quadratic and the product of its roots
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        MarketParams p{};
        p.r = 0.005 + 0.03 * u(rng);
        p.mu = p.r + 0.01 + 0.2 * u(rng);
        p.b = p.r + (p.mu - p.r) * (0.05 + 0.9 * u(rng));
        p.sigma = 0.08 + 0.5 * u(rng);
        p.lambda = 0.01 + 0.15 * u(rng);
        const double m_b = 0.5 * std::pow((p.mu - p.b) / p.sigma, 2);
        const auto [b1, b2] = dual_exponents(p);
        for (double B : {b1, b2}) {
            const double resid = -p.lambda - (p.b - p.lambda + m_b) * B + m_b * B * B;
            CHECK(std::abs(resid) < 1e-12 * (1.0 + std::abs(m_b * B * B)));
        }
        CHECK(b1 * b2 == doctest::Approx(-p.lambda / m_b).epsilon(1e-11));
        CHECK(b1 > 1.0);
        CHECK(b2 < 0.0);
    }
}

TEST_CASE("dual solution pins its boundary data") {
    const auto d = reference_dual();
    CHECK(d.htilde(d.v0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(d.htilde_p(d.v0)) < 1e-8);
    CHECK(d.htilde_p(d.vb) == doctest::Approx(refcase::w_b).epsilon(1e-10));
    CHECK(d.rho == doctest::Approx(refcase::rho).epsilon(1e-9));
    CHECK(d.v0 == doctest::Approx(refcase::v0).epsilon(1e-9));
    CHECK(d.vb == doctest::Approx(refcase::vb).epsilon(1e-9));
    CHECK(d.D1 == doctest::Approx(refcase::D1).epsilon(1e-6));
    CHECK(d.D2 == doctest::Approx(refcase::D2).epsilon(1e-6));
    CHECK(d.v0 > d.vb);
    CHECK(d.vb > 0.0);
    // strict positivity of the leading bracket combination
    CHECK(d.A1 > 0.0);
    CHECK(refcase::w_b / d.theta + (d.cb - refcase::w_b) * (1.0 - d.B2) > 0.0);
}

TEST_CASE("dual equation residual is tiny on the working interval") {
    const auto d = reference_dual();
    const auto p = refcase::params();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double m_b = 0.5 * std::pow((p.mu - p.b) / p.sigma, 2);
    for (int i = 0; i < 100; ++i) {
        const double v = d.vb + (d.v0 - d.vb) * u(rng);
        const double resid = p.lambda * d.htilde(v) + (p.b - p.lambda) * v * d.htilde_p(v) -
                             m_b * v * v * d.htilde_pp(v) - refcase::c * v;
        CHECK(std::abs(resid) < 1e-10 * (1.0 + std::abs(refcase::c * v)));
    }
}

TEST_CASE("primal equation residual via the dual relations") {
    const auto d = reference_dual();
    const auto p = refcase::params();
    const double s2 = p.sigma * p.sigma;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double w = refcase::w_b * u(rng);
        const double uu = d.u_of_w(w);
        const double v = d.vb * uu;
        const double psi = d.htilde_of_u(uu) - w * v;
        const double psi_p = -v;
        const double psi_pp = -1.0 / d.htilde_pp(v);
        const double pi = -((p.mu - p.b) / s2) * psi_p / psi_pp;
        const double resid = p.lambda * psi - (p.b * w - refcase::c) * psi_p -
                             ((p.mu - p.b) * pi * psi_p + 0.5 * s2 * pi * pi * psi_pp);
        CHECK(std::abs(resid) < 1e-8);
    }
}

TEST_CASE("dual marginal is strictly monotone so inversion is well posed") {
    const auto d = reference_dual();
    double prev = d.htilde_p(d.vb);
    for (int i = 1; i <= 1000; ++i) {
        const double v = d.vb + (d.v0 - d.vb) * double(i) / 1000.0;
        const double w = d.htilde_p(v);
        CHECK(w < prev);
        prev = w;
    }
    // equivalently the curvature stays negative
    CHECK(d.htilde_pp(0.5 * (d.vb + d.v0)) < 0.0);
}

TEST_CASE("left side of the matching equation increases in rho") {
    const auto d = reference_dual();
    const auto F = [&](double rho) {
        return (d.A1 * std::pow(rho, d.B1 - 1.0) + d.A2 * std::pow(rho, d.B2 - 1.0)) /
               (d.B1 - d.B2);
    };
    double prev = F(1.0);
    for (double rho = 1.1; rho < 3.0; rho += 0.1) {
        const double cur = F(rho);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK(F(1.0) == doctest::Approx(d.cb - d.wb).epsilon(1e-12));
}

TEST_CASE("primal recovery") {
    const auto d = reference_dual();

    const auto at_zero = dual_to_primal(d, 0.0);
    CHECK(at_zero.psi == doctest::Approx(1.0).epsilon(1e-10));

    const auto near_wb = dual_to_primal(d, refcase::w_b * (1.0 - 1e-8));
    CHECK(near_wb.pistar == doctest::Approx(refcase::w_b).epsilon(1e-5));

    const auto at5 = dual_to_primal(d, 5.0);
    CHECK(at5.pistar == doctest::Approx(refcase::pistar_b_5).epsilon(1e-9));
    CHECK(at5.pistar > 5.0);

    // strict leverage everywhere inside the region
    for (double w : {0.5, 2.0, 4.0, 7.0, 9.0, 10.5}) {
        const auto pt = dual_to_primal(d, w);
        CHECK(pt.pistar > w);
        CHECK(pt.psi > 0.0);
        CHECK(pt.psi < 1.0);
    }
    CHECK_THROWS_AS(dual_to_primal(d, -1.0), DomainError);
    CHECK_THROWS_AS(dual_to_primal(d, refcase::w_b * 1.5), InversionError);
}

TEST_CASE("allocation at zero wealth: closed form equals inversion") {
    const auto d = reference_dual();
    const double closed = leverage_at_zero(d);
    CHECK(closed == doctest::Approx(refcase::leverage0).epsilon(1e-9));
    CHECK(closed == doctest::Approx(dual_to_primal(d, 0.0).pistar).epsilon(1e-8));
    CHECK(leverage_at_zero(refcase::params(), refcase::c, refcase::w_b) ==
          doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("leverage at zero blows up as b approaches the drift when mu > lambda") {
    const auto p0 = refcase::params();
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    double prev = 0.0;
    double first = 0.0;
    for (double b : {0.04, 0.055, 0.059, 0.0599}) {
        MarketParams p = p0;
        p.b = b;
        const double wb = find_wb(ric, p, refcase::c);
        const double lev = leverage_at_zero(p, refcase::c, wb);
        CHECK(lev > prev);
        if (first == 0.0) first = lev;
        prev = lev;
    }
    CHECK(prev > 10.0 * first);
}

TEST_CASE("leverage at zero stays bounded when the hazard rate dominates the drift") {
    MarketParams p0 = refcase::params();
    p0.lambda = 0.08; // exceeds mu
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    double prev_wb = 1e9, prev_lev = 1e9;
    for (double b : {0.04, 0.055, 0.059, 0.0599}) {
        MarketParams p = p0;
        p.b = b;
        const double wb = find_wb(ric, p, refcase::c);
        const double lev = leverage_at_zero(p, refcase::c, wb);
        CHECK(wb < prev_wb);
        CHECK(lev < prev_lev);
        prev_wb = wb;
        prev_lev = lev;
    }
    // the borrowing region and the leverage both collapse toward zero
    CHECK(prev_wb < 0.2);
    CHECK(prev_lev < 0.2);
}

TEST_CASE("solve_dual rejects inconsistent inputs") {
    const auto p = refcase::params();
    CHECK_THROWS_AS(solve_dual(p, refcase::c, 30.0), ParameterError); // wb above c/b
    CHECK_THROWS_AS(solve_dual(p, refcase::c, -1.0), ParameterError);
    MarketParams bad = p;
    bad.b = bad.mu;
    CHECK_THROWS_AS(solve_dual(bad, refcase::c, 5.0), ParameterError);
}

TEST_CASE("scaled evaluators survive an extreme borrowing rate") {
    // b close to mu makes B1 huge; raw coefficients overflow but the scaled
    // path must keep working
    const auto p0 = refcase::params();
    const auto k = derive_constants(p0, refcase::c);
    const auto ric = solve_riccati(p0, refcase::c, k);
    MarketParams p = p0;
    p.b = 0.059999;
    const double wb = find_wb(ric, p, refcase::c);
    const auto d = solve_dual(p, refcase::c, wb);
    CHECK(std::isfinite(d.rho));
    CHECK(d.rho > 1.0);
    CHECK(d.htilde(d.v0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(d.htilde_p(d.vb) == doctest::Approx(wb).epsilon(1e-8));
    const auto pt = dual_to_primal(d, 0.5 * wb);
    CHECK(std::isfinite(pt.psi));
    CHECK(pt.pistar > 0.5 * wb);
    CHECK(std::isfinite(leverage_at_zero(d)));
}
