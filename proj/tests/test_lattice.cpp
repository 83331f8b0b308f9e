#include "pput/lattice.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pput;

TEST_CASE("closed-form put limits") {
    CHECK(black_scholes_put(2.0, 1.0, 0.0, 0.0, 1.0) == 0.0);
    CHECK(black_scholes_put(0.5, 1.0, 0.0, 0.0, 1.0) == 0.5);
    CHECK(black_scholes_put(1.0, 1.0, 0.05, 0.2, 0.0) == 0.0);
    // deep in the money, vanishing vol: forward-value limit
    const double v = black_scholes_put(0.2, 1.0, 0.05, 1e-8, 2.0);
    CHECK(std::abs(v - (std::exp(-0.1) - 0.2)) <= 1e-8);
    CHECK_THROWS_AS(black_scholes_put(-1.0, 1.0, 0.0, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form at-the-money value against a Monte Carlo oracle") {
    // s = K = 1, r = 0, sigma = 0.2, tau = 1
    const double v = black_scholes_put(1.0, 1.0, 0.0, 0.2, 1.0);
    CHECK(v == doctest::Approx(0.0797).epsilon(2e-3));

    std::mt19937_64 rng(314159u);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double st = std::exp(-0.5 * 0.2 * 0.2 + 0.2 * normal(rng));
        const double pay = std::max(1.0 - st, 0.0);
        sum += pay;
        sum_sq += pay * pay;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(v - mean) <= 3.0 * se);
}

TEST_CASE("zero intensity collapses the lattice to the European tree") {
    MarketParams p = test_util::linear_params(0.03);
    p.lambda = 0.0;
    p.jump_cap = 0;
    p.horizon = 1.0;
    const double lat = lattice_value(p, LatticeSpec{2000, 0.03});
    const double bs = black_scholes_put(1.0, 1.0, 0.03, 0.2, 1.0);
    CHECK(std::abs(lat - bs) / bs <= 0.002);
}

TEST_CASE("dense exercise opportunities approach the American put") {
    MarketParams p = test_util::linear_params(0.03);
    p.lambda = 500.0;
    p.jump_cap = 0;
    p.horizon = 1.0;
    const double lat = lattice_value(p, LatticeSpec{2000, 0.03});
    const double am = binomial_american_put(1.0, 1.0, 0.03, 0.2, 1.0, 2000);
    CHECK(std::abs(lat - am) / am <= 0.01);
}

TEST_CASE("lattice value is nondecreasing in lambda") {
    MarketParams p = test_util::linear_params(0.03);
    p.horizon = 2.0;
    for (int k : {0, 4}) {
        p.jump_cap = k;
        double prev = -1.0;
        for (double lam : {0.1, 0.2, 0.5, 1.0}) {
            p.lambda = lam;
            const double v = lattice_value(p, LatticeSpec{500, 0.03});
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("lattice value falls as the asset rises against the fixed strikes") {
    MarketParams p = test_util::linear_params(0.03);
    p.jump_cap = 2;
    p.horizon = 2.0;
    double prev = 1e300;
    for (double s0 : {0.8, 1.0, 1.2, 1.5}) {
        p.s0 = s0;
        const double v = lattice_value(p, LatticeSpec{500, 0.03});
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("step doubling converges at first order or better") {
    MarketParams p = test_util::linear_params(0.03);
    p.jump_cap = 2;
    p.horizon = 2.0;
    p.lambda = 1.0;
    const double v1 = lattice_value(p, LatticeSpec{500, 0.03});
    const double v2 = lattice_value(p, LatticeSpec{1000, 0.03});
    const double v3 = lattice_value(p, LatticeSpec{2000, 0.03});
    CHECK(std::abs(v1 - v2) / std::abs(v2 - v3) >= 1.5);
}

TEST_CASE("lattice agrees with the chain in the linear regime") {
    const auto& chain = test_util::linear_chain_200();
    const double lat = lattice_value(chain.params, LatticeSpec{2000, 0.03});
    CHECK(std::abs(chain.value(0, 0.0, 1.0) - lat) <= 1e-2);
}

TEST_CASE("lattice input validation") {
    MarketParams p = test_util::linear_params(0.03);
    CHECK_THROWS_AS(lattice_value(p, LatticeSpec{50, 0.03}), std::invalid_argument);
    CHECK_THROWS_AS(lattice_value(p, LatticeSpec{2000, 0.05}), std::invalid_argument);

    MarketParams spread = test_util::reference_params();
    CHECK_THROWS_AS(lattice_value(spread, LatticeSpec{2000, 0.03}), std::invalid_argument);

    MarketParams dense = test_util::linear_params(0.03);
    dense.lambda = 500.0; // per-step arrival probability above one at this step count
    CHECK_THROWS_AS(lattice_value(dense, LatticeSpec{100, 0.03}), std::invalid_argument);
}
