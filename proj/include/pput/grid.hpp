#pragma once

#include "pput/market.hpp"

#include <stdexcept>

namespace pput {

/// Uniform space-time grid for the backward PDE chain: s in [0, s_max] with
/// ns intervals, t in [0, T] with nt intervals.
struct GridSpec {
    double s_max = 0.0;
    int ns = 400;
    int nt = 400;

    double ds() const { return s_max / ns; }
    double dt(double horizon) const { return horizon / nt; }
    double s(int m) const { return m * ds(); }
    double t(int j, double horizon) const { return j * dt(horizon); }

    // s_max = 4 * (1+eta)^k puts the truncation deep out of the money for
    // every strike in the chain
    static GridSpec default_for(const MarketParams& p) {
        return GridSpec{4.0 * p.max_strike(), 400, 400};
    }

    void check(const MarketParams& p) const {
        if (ns < 16) throw std::invalid_argument("GridSpec: ns must be >= 16");
        if (nt < 16) throw std::invalid_argument("GridSpec: nt must be >= 16");
        if (!(s_max > p.max_strike()))
            throw std::invalid_argument("GridSpec: s_max must exceed the largest strike");
        if (!(p.horizon > 0.0)) throw std::invalid_argument("GridSpec: horizon must be positive");
    }
};

} // namespace pput
