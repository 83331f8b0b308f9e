#include "pput/boundary.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace pput;

namespace {

// chain whose only level is an explicit function of (t, s)
template <typename F>
ValueChain synthetic_chain(const MarketParams& p, const GridSpec& g, F&& f) {
    ValueChain chain;
    chain.params = p;
    chain.grid = g;
    chain.levels.emplace_back(g.nt, g.ns);
    for (int j = 0; j <= g.nt; ++j)
        for (int m = 0; m <= g.ns; ++m)
            chain.levels[0].at(j, m) = f(g.t(j, p.horizon), g.s(m));
    return chain;
}

} // namespace

TEST_CASE("terminal boundary sits at the strike exactly") {
    const auto& chain = test_util::reference_chain_200();
    for (int i = 0; i <= 4; ++i) {
        const auto bd = extract_boundary(chain, i);
        REQUIRE(bd.b.back().has_value());
        CHECK(*bd.b.back() == chain.params.strike(i));
    }
}

TEST_CASE("boundary values stay in [0, strike] and extraction is pure") {
    const auto& chain = test_util::reference_chain_200();
    const auto bd = extract_boundary(chain, 4);
    for (const auto& b : bd.b)
        if (b) {
            CHECK(*b >= 0.0);
            CHECK(*b <= chain.params.strike(4));
        }
    const auto bd2 = extract_boundary(chain, 4);
    REQUIRE(bd2.b.size() == bd.b.size());
    for (size_t j = 0; j < bd.b.size(); ++j)
        CHECK(bd2.b[j] == bd.b[j]);
}

TEST_CASE("boundary shrinks when lambda grows") {
    auto p = test_util::reference_params();
    auto g = GridSpec::default_for(p);
    g.ns = g.nt = 200;
    const auto chain_lo = test_util::reference_chain_200();
    MarketParams hi = p;
    hi.lambda = 25.0;
    const auto chain_hi = solve_chain(hi, g);

    const auto b_lo = extract_boundary(chain_lo, 4);
    const auto b_hi = extract_boundary(chain_hi, 4);
    const double cell = g.ds();
    for (size_t j = 0; j < b_lo.b.size(); ++j) {
        if (b_lo.b[j] && b_hi.b[j])
            CHECK(*b_hi.b[j] <= *b_lo.b[j] + cell);
        else
            CHECK(!b_hi.b[j]); // the region must not appear as lambda grows
    }
}

TEST_CASE("pasting gap shrinks from small to large lambda") {
    auto p = test_util::reference_params();
    auto g = GridSpec::default_for(p);
    g.ns = g.nt = 200;
    MarketParams hi = p;
    hi.lambda = 25.0;
    const auto& lo_chain = test_util::reference_chain_200();
    const auto hi_chain = solve_chain(hi, g);
    const double gap_lo = pasting_gap(lo_chain, 4, extract_boundary(lo_chain, 4));
    const double gap_hi = pasting_gap(hi_chain, 4, extract_boundary(hi_chain, 4));
    CHECK(gap_hi < gap_lo);
}

TEST_CASE("near-American regime pastes smoothly") {
    MarketParams p = test_util::linear_params(0.03);
    p.lambda = 500.0;
    p.jump_cap = 0;
    p.horizon = 1.0;
    const auto chain = solve_chain(p, GridSpec{4.0, 400, 400});
    const double gap = pasting_gap(chain, 0, extract_boundary(chain, 0));
    CHECK(gap < 0.05);
}

TEST_CASE("synthetic surface with slope -1 measures only stencil truncation") {
    MarketParams p = test_util::linear_params(0.03);
    p.jump_cap = 0;
    p.horizon = 1.0;
    const GridSpec g{4.0, 400, 64};
    const double K = p.strike(0);
    // V = g below the strike, quadratic continuation with matching slope above
    auto chain = synthetic_chain(p, g, [&](double, double s) {
        return s <= K ? K - s : K - s + 0.2 * (s - K) * (s - K);
    });
    const auto bd = extract_boundary(chain, 0);
    for (const auto& b : bd.b) {
        REQUIRE(b.has_value());
        CHECK(*b == K);
    }
    CHECK(pasting_gap(chain, 0, bd) <= 1e-8);
}

TEST_CASE("a surface strictly above the obstacle has no stop region") {
    MarketParams p = test_util::linear_params(0.03);
    p.jump_cap = 0;
    p.horizon = 1.0;
    const GridSpec g{4.0, 128, 32};
    const double K = p.strike(0);
    auto chain = synthetic_chain(p, g, [&](double, double) { return K + 1.0; });
    const auto bd = extract_boundary(chain, 0);
    for (const auto& b : bd.b)
        CHECK(!b.has_value());
    CHECK_THROWS_AS(pasting_gap(chain, 0, bd), std::invalid_argument);
}

TEST_CASE("an all-zero obstacle marks every interior row as no-stop") {
    const auto& chain = test_util::reference_chain_200();
    const auto& g = chain.grid;
    std::vector<double> zeros(g.ns + 1, 0.0);
    const double tol = default_boundary_tol(chain.params);
    const double K = chain.params.strike(4);
    for (int j = 0; j < g.nt; ++j) {
        const auto b = detail::boundary_in_row(chain.level(4).row(j), zeros, K, g.ds(), tol);
        CHECK(!b.has_value());
    }
}

TEST_CASE("level range is checked") {
    const auto& chain = test_util::reference_chain_200();
    CHECK_THROWS_AS(extract_boundary(chain, 5), std::invalid_argument);
    CHECK_THROWS_AS(extract_boundary(chain, -1), std::invalid_argument);
}
