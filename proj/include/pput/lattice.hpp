#pragma once

#include "pput/market.hpp"

namespace pput {

/// Closed-form European put. At sigma = 0 or tau = 0 returns the deterministic
/// limit (K e^{-r tau} - s)^+.
double black_scholes_put(double s, double strike, double rate, double sigma, double tau);

/// Standard CRR binomial American put, used as an oracle for the large-lambda
/// limit and the smooth-pasting diagnostic.
double binomial_american_put(double s0, double strike, double rate, double sigma,
                             double horizon, int steps);

/// Delta of the CRR American put at the root, by the first-step node pair.
double binomial_american_put_delta(double s0, double strike, double rate, double sigma,
                                   double horizon, int steps);

struct LatticeSpec {
    int steps = 2000;   // >= 100
    double rate = 0.03; // single interest rate; must equal r_low = r_high
};

/// Independent dynamic program over (step, CRR node, level) for the
/// linear-rate regime. One backward step applies
///
///   V = e^{-rate dt} [ (1 - q dt) E[V(., level)]
///                      + q dt E[max(payoff(level', .), V(., level'))] ],
///
/// level' = min(level+1, k). The per-level transition intensity q matches the
/// one the linear-rate PDE chain embeds: rate/eta while the strike can still
/// ratchet (levels below the cap) and the Poisson intensity lambda at the cap,
/// where arrivals only open exercise windows. With k = 0 this is plain
/// lambda-thinning. Terminal value is payoff(level, .); returns the root value
/// at level 0.
double lattice_value(const MarketParams& p, const LatticeSpec& spec);

} // namespace pput
