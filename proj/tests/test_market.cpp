#include "pput/market.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

using namespace pput;

TEST_CASE("payoff evaluates the staircase strikes") {
    auto p = test_util::reference_params();
    CHECK(payoff(4, 1.0, p) == doctest::Approx(0.4641).epsilon(1e-12));
    CHECK(payoff(0, 2.0, p) == 0.0);
    CHECK(payoff(2, 1.0, p) == doctest::Approx(0.21).epsilon(1e-12));
    // level beyond the cap sticks at the top strike
    CHECK(payoff(9, 1.0, p) == payoff(4, 1.0, p));
    CHECK_THROWS_AS(payoff(-1, 1.0, p), std::invalid_argument);
    CHECK_THROWS_AS(payoff(0, -0.5, p), std::invalid_argument);
}

TEST_CASE("payoff is nonincreasing, convex, Lipschitz-1 and ordered in level") {
    auto p = test_util::reference_params();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int n = 0; n < 2000; ++n) {
        const double a = u(rng), b = u(rng);
        const int i = n % 5;
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(payoff(i, lo, p) >= payoff(i, hi, p));
        CHECK(std::abs(payoff(i, a, p) - payoff(i, b, p)) <= std::abs(a - b) + 1e-14);
        const double mid = 0.5 * (a + b);
        CHECK(payoff(i, mid, p) <= 0.5 * payoff(i, a, p) + 0.5 * payoff(i, b, p) + 1e-14);
        if (i < 4) CHECK(payoff(i + 1, a, p) >= payoff(i, a, p)); // eta > 0
    }
}

TEST_CASE("generator matches the hand-evaluated branches") {
    auto p = test_util::reference_params();
    CHECK(generator_eval(0, 0, 0, JumpRegime::active, p) == 0.0);
    CHECK(generator_eval(0, 0, 0, JumpRegime::inactive, p) == 0.0);
    CHECK(generator_eval(1, 0, 0, JumpRegime::inactive, p) ==
          doctest::Approx(-0.02).epsilon(1e-14));
    CHECK(generator_eval(-1, 0, 0, JumpRegime::inactive, p) ==
          doctest::Approx(0.05).epsilon(1e-14));

    MarketParams z = p;
    z.eta = 0.0;
    z.jump_cap = 0;
    CHECK_THROWS_AS(generator_eval(1, 1, 1, JumpRegime::active, z), std::invalid_argument);
}

namespace {

// independent enumeration oracle: corner combinations of the constraint box
std::set<std::tuple<double, double, double>> enumerate_vertices(const MarketParams& p) {
    std::set<std::tuple<double, double, double>> out;
    const double m2 = p.lambda * p.eta;
    for (double a : {-p.r_high, -p.r_low})
        for (double b : {-p.mu1_high, -p.mu1_low})
            for (double g : {-m2, -m2})
                out.insert({a, (b - a) / p.sigma, (g - a) / p.eta});
    return out;
}

} // namespace

TEST_CASE("dual vertices match the enumeration oracle") {
    auto p = test_util::reference_params();
    p.mu1_low = p.mu1_high = 0.03;
    const auto oracle = enumerate_vertices(p);
    const auto set = dual_vertices(p);
    CHECK(set.vertices.size() == oracle.size());
    CHECK(set.vertices.size() == 2); // the rate spread is the only nondegenerate interval
    for (const auto& v : set.vertices)
        CHECK(oracle.count({v.alpha, v.beta, v.gamma}) == 1);

    // all three intervals collapsed: a single vertex
    MarketParams q = p;
    q.r_low = q.r_high = 0.03;
    CHECK(dual_vertices(q).vertices.size() == 1);

    // full spread on rates and drifts: four corners
    CHECK(dual_vertices(test_util::reference_params()).vertices.size() == 4);
}

TEST_CASE("dual vertices lie in the constraint box with gamma >= -lambda") {
    for (auto p : {test_util::reference_params(), test_util::linear_params(0.02)}) {
        const double m2 = p.mu2();
        for (const auto& v : dual_vertices(p).vertices) {
            CHECK(v.alpha >= -p.r_high - 1e-15);
            CHECK(v.alpha <= -p.r_low + 1e-15);
            CHECK(v.alpha + p.sigma * v.beta >= -p.mu1_high - 1e-15);
            CHECK(v.alpha + p.sigma * v.beta <= -p.mu1_low + 1e-15);
            CHECK(v.alpha + p.eta * v.gamma == doctest::Approx(-m2).epsilon(1e-14));
            CHECK(v.gamma >= -p.lambda - 1e-12);
        }
    }
}

TEST_CASE("generator equals its dual representation on random points") {
    auto p = test_util::reference_params();
    const auto set = dual_vertices(p);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const double y = u(rng), z = u(rng), c = u(rng);
        worst = std::max(worst, std::abs(generator_eval(y, z, c, JumpRegime::active, p) -
                                         generator_via_dual(y, z, c, set)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("degenerate dual cases") {
    auto p = test_util::linear_params(0.03);
    const auto set = dual_vertices(p);
    REQUIRE(set.vertices.size() == 1);
    const auto& v = set.vertices[0];
    CHECK(generator_via_dual(1.5, -2.0, 3.0, set) ==
          doctest::Approx(v.alpha * 1.5 + v.beta * (-2.0) + v.gamma * 3.0).epsilon(1e-15));
    CHECK(generator_via_dual(0, 0, 0, set) == 0.0);
    CHECK_THROWS_AS(generator_via_dual(1, 1, 1, DualVertexSet{}), std::invalid_argument);
}

TEST_CASE("generator is convex and Lipschitz with the analytic constants") {
    auto p = test_util::reference_params();
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double ly = std::max(std::abs(p.r_low), std::abs(p.r_high));
    const double lz = (std::max(std::abs(p.mu1_low), std::abs(p.mu1_high)) + ly) / p.sigma;
    const double lc = p.lambda + ly / std::abs(p.eta);
    for (int n = 0; n < 5000; ++n) {
        const double y1 = u(rng), z1 = u(rng), c1 = u(rng);
        const double y2 = u(rng), z2 = u(rng), c2 = u(rng);
        const double f1 = generator_eval(y1, z1, c1, JumpRegime::active, p);
        const double f2 = generator_eval(y2, z2, c2, JumpRegime::active, p);
        CHECK(std::abs(f1 - f2) <= ly * std::abs(y1 - y2) + lz * std::abs(z1 - z2) +
                                       lc * std::abs(c1 - c2) + 1e-12);
        for (double t : {0.25, 0.5, 0.75}) {
            const double fm = generator_eval(t * y1 + (1 - t) * y2, t * z1 + (1 - t) * z2,
                                             t * c1 + (1 - t) * c2, JumpRegime::active, p);
            CHECK(fm <= t * f1 + (1 - t) * f2 + 1e-12);
        }
    }
}

TEST_CASE("sampled jump-ratio bound holds when validation passes") {
    auto p = test_util::reference_params();
    REQUIRE(validate_assumptions(p).pass);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int n = 0; n < 1000; ++n) {
        const double y = u(rng), z = u(rng);
        double c = u(rng), c2 = u(rng);
        if (c == c2) c2 += 1.0;
        const double ratio = (generator_eval(y, z, c, JumpRegime::active, p) -
                              generator_eval(y, z, c2, JumpRegime::active, p)) /
                             (p.lambda * (c - c2));
        CHECK(ratio >= -1.0 - 1e-10);
    }
}

TEST_CASE("validation accepts the figure parameters and names violations") {
    CHECK(validate_assumptions(test_util::reference_params()).pass);

    auto bad_rate = test_util::reference_params();
    bad_rate.r_low = -0.01;
    auto rep = validate_assumptions(bad_rate);
    CHECK(!rep.pass);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("r_low >= 0 for eta > 0") != std::string::npos) found = true;
    CHECK(found);

    auto bad_eta = test_util::reference_params();
    bad_eta.eta = -1.5;
    rep = validate_assumptions(bad_eta);
    CHECK(!rep.pass);
    found = false;
    for (const auto& v : rep.violations)
        if (v.find("eta > -1") != std::string::npos) found = true;
    CHECK(found);

    // negative-eta regime with nonpositive rates is in theory
    MarketParams neg;
    neg.sigma = 0.2;
    neg.eta = -0.2;
    neg.r_low = -0.03;
    neg.r_high = -0.01;
    neg.mu1_low = -0.03;
    neg.mu1_high = -0.01;
    neg.lambda = 0.5;
    neg.jump_cap = 1;
    neg.horizon = 2.0;
    CHECK(validate_assumptions(neg).pass);
}
