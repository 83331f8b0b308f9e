#pragma once

#include "pput/pde.hpp"

namespace test_util {

// bid-ask figure parameters
inline pput::MarketParams reference_params() {
    pput::MarketParams p;
    p.sigma = 0.2;
    p.eta = 0.1;
    p.r_low = 0.02;
    p.r_high = 0.05;
    p.mu1_low = 0.02;
    p.mu1_high = 0.05;
    p.lambda = 0.2;
    p.jump_cap = 4;
    p.horizon = 5.0;
    p.s0 = 1.0;
    return p;
}

// same market with both rates collapsed to a single value
inline pput::MarketParams linear_params(double rate = 0.03) {
    pput::MarketParams p = reference_params();
    p.r_low = p.r_high = rate;
    p.mu1_low = p.mu1_high = rate;
    return p;
}

// shared solves, cached across test cases (200x200 keeps the unit suite fast)
inline const pput::ValueChain& reference_chain_200() {
    static const pput::ValueChain chain = [] {
        auto p = reference_params();
        pput::GridSpec g = pput::GridSpec::default_for(p);
        g.ns = g.nt = 200;
        return pput::solve_chain(p, g);
    }();
    return chain;
}

inline const pput::ValueChain& linear_chain_200() {
    static const pput::ValueChain chain = [] {
        auto p = linear_params();
        pput::GridSpec g = pput::GridSpec::default_for(p);
        g.ns = g.nt = 200;
        return pput::solve_chain(p, g);
    }();
    return chain;
}

} // namespace test_util
