#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "reference_case.hpp"
#include "ruin/model.hpp"

using namespace ruin;

TEST_CASE("reference borrow model validates") {
    CHECK_NOTHROW(validate(refcase::params(), ConstantConsumption{1.0}, Regime::Borrow));
    CHECK_NOTHROW(validate(refcase::params(), ConstantConsumption{1.0}, Regime::NoBorrow));
    CHECK_NOTHROW(validate(refcase::params(), ConstantConsumption{1.0}, Regime::Unconstrained));
}

TEST_CASE("violated inequalities are named") {
    MarketParams p = refcase::params();

    p.mu = p.r;
    CHECK_THROWS_WITH_AS(validate(p, ConstantConsumption{1.0}, Regime::Unconstrained),
                         "mu must exceed r", ParameterError);

    p = refcase::params();
    p.sigma = 0.0;
    CHECK_THROWS_AS(validate(p, ConstantConsumption{1.0}, Regime::NoBorrow), ParameterError);

    p = refcase::params();
    p.lambda = -0.01;
    CHECK_THROWS_AS(validate(p, ConstantConsumption{1.0}, Regime::NoBorrow), ParameterError);

    p = refcase::params();
    CHECK_THROWS_AS(validate(p, ConstantConsumption{0.0}, Regime::NoBorrow), ParameterError);
    CHECK_THROWS_AS(validate(p, ConstantConsumption{-1.0}, Regime::NoBorrow), ParameterError);
}

TEST_CASE("borrow regime needs r < b < mu") {
    MarketParams p = refcase::params();
    p.b = p.r; // served by the unconstrained regime instead
    CHECK_THROWS_AS(validate(p, ConstantConsumption{1.0}, Regime::Borrow), ParameterError);
    p.b = 0.01;
    CHECK_THROWS_AS(validate(p, ConstantConsumption{1.0}, Regime::Borrow), ParameterError);
    p.b = p.mu;
    CHECK_THROWS_AS(validate(p, ConstantConsumption{1.0}, Regime::Borrow), ParameterError);
    // the same parameters are fine when b is ignored
    CHECK_NOTHROW(validate(p, ConstantConsumption{1.0}, Regime::NoBorrow));
}

TEST_CASE("proportional consumption constraints") {
    MarketParams p = refcase::params();
    CHECK_THROWS_WITH_AS(validate(p, ProportionalConsumption{0.01, 1.0}, Regime::NoBorrow),
                         "p must exceed r", ParameterError);
    CHECK_THROWS_AS(validate(p, ProportionalConsumption{0.05, 0.0}, Regime::NoBorrow),
                    ParameterError);
    CHECK_NOTHROW(validate(p, ProportionalConsumption{0.05, 1.0}, Regime::Borrow));
    // borrowing rate must stay below both mu and p
    CHECK_THROWS_AS(validate(p, ProportionalConsumption{0.03, 1.0}, Regime::Borrow),
                    ParameterError);
}

TEST_CASE("derived constants match the reference case") {
    const auto k = derive_constants(refcase::params(), refcase::c);
    CHECK(k.m == doctest::Approx(refcase::m).epsilon(1e-14));
    CHECK(k.m_b == doctest::Approx(refcase::m_b).epsilon(1e-14));
    CHECK(k.d == doctest::Approx(refcase::d).epsilon(1e-13));
    CHECK(k.x == doctest::Approx(refcase::x).epsilon(1e-13));
    CHECK(k.w_l == doctest::Approx(refcase::w_l).epsilon(1e-13));
    CHECK(k.safe_level == doctest::Approx(50.0));
    // the two printed decimals of the worked example
    CHECK(std::abs(k.w_l - 14.64) < 5e-3);
}

TEST_CASE("derived constants invariants over random parameters") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        MarketParams p{};
        p.r = 0.002 + 0.06 * u(rng);
        p.mu = p.r + 0.002 + 0.2 * u(rng);
        p.b = p.r + (p.mu - p.r) * 0.5;
        p.sigma = 0.05 + 0.5 * u(rng);
        p.lambda = 0.005 + 0.2 * u(rng);
        const double c = 0.1 + 5.0 * u(rng);
        const auto k = derive_constants(p, c);
        CHECK(k.d > 1.0);
        CHECK(k.m > 0.0);
        const double base = 1.0 - p.r * k.w_l / c;
        CHECK(base > 0.0);
        CHECK(base < 1.0);
        CHECK(k.w_l > 0.0);
        CHECK(k.w_l < k.safe_level);
    }
}

TEST_CASE("consumption scale covariance") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        MarketParams p{};
        p.r = 0.005 + 0.05 * u(rng);
        p.mu = p.r + 0.01 + 0.15 * u(rng);
        p.b = 0.5 * (p.r + p.mu);
        p.sigma = 0.1 + 0.4 * u(rng);
        p.lambda = 0.01 + 0.1 * u(rng);
        const double c = 0.2 + 3.0 * u(rng);
        const auto k1 = derive_constants(p, c);
        const auto k2 = derive_constants(p, 2.0 * c);
        CHECK(k2.d == doctest::Approx(k1.d).epsilon(1e-14));
        CHECK(k2.m == doctest::Approx(k1.m).epsilon(1e-14));
        CHECK(k2.x == doctest::Approx(k1.x).epsilon(1e-14));
        CHECK(k2.w_l == doctest::Approx(2.0 * k1.w_l).epsilon(1e-13));
    }
}

TEST_CASE("m_b approaches m as b drops to r") {
    MarketParams p = refcase::params();
    double prev_gap = 1e9;
    for (double db : {1e-2, 1e-4, 1e-6, 1e-9}) {
        p.b = p.r + db;
        const auto k = derive_constants(p, 1.0);
        const double gap = std::abs(k.m_b - k.m);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-9);
}

TEST_CASE("regime names") {
    CHECK(std::string(regime_name(Regime::Unconstrained)) == "unconstrained");
    CHECK(std::string(regime_name(Regime::NoBorrow)) == "noborrow");
    CHECK(std::string(regime_name(Regime::Borrow)) == "borrow");
}
