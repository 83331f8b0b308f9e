#pragma once

#include <string>
#include <vector>

namespace pput {

/// Market and model constants for the staircase put under Poisson exercise
/// windows. Asset 1 is a geometric Brownian motion with bid-ask drifts
/// [mu1_low, mu1_high]; asset 2 is a pure-jump ratchet that multiplies by
/// (1+eta) at each Poisson arrival until the cap is reached. The bond carries
/// bid-ask rates [r_low, r_high]. The drift of asset 2 is implied by its
/// dynamics as lambda*eta and is not a free parameter.
struct MarketParams {
    double sigma = 0.2;     // volatility of asset 1, per sqrt(year), > 0
    double eta = 0.1;       // relative jump size of asset 2, > -1, != 0 when jump_cap >= 1
    double r_low = 0.02;    // lending (bid) rate, per year
    double r_high = 0.05;   // borrowing (ask) rate, per year
    double mu1_low = 0.02;  // bid drift of asset 1, per year
    double mu1_high = 0.05; // ask drift of asset 1, per year
    double lambda = 0.2;    // Poisson intensity, arrivals per year
    int jump_cap = 4;       // k: the strike stops ratcheting after this many arrivals
    double horizon = 5.0;   // T, years
    double s0 = 1.0;        // initial asset-1 price

    // drift of asset 2 implied by its jump dynamics
    double mu2() const { return lambda * eta; }

    // strike in force after `level` arrivals: (1+eta)^min(level, jump_cap)
    double strike(int level) const;
    double max_strike() const { return strike(jump_cap); }
};

/// Put payoff at level `level`: ((1+eta)^min(level,k) - s)^+.
double payoff(int level, double s, const MarketParams& p);

/// Whether the jump asset is still trading (before the cap) or frozen.
enum class JumpRegime { active, inactive };

/// The bid-ask wealth-equation generator f(y, z, c):
///
///   f = -r_low * w^+ + r_high * w^-          w = y - z/sigma - (c/eta)
///       - mu1_low * z^+/sigma + mu1_high * z^-/sigma
///       - mu2 * (c/eta)^+ + mu2 * (c/eta)^-
///
/// with every c-term dropped in the inactive regime (the jump asset is frozen,
/// so w = y - z/sigma). Throws std::invalid_argument if the active regime is
/// requested with eta == 0.
double generator_eval(double y, double z, double c, JumpRegime regime,
                      const MarketParams& p);

struct DualVertex {
    double alpha;
    double beta;
    double gamma;
};

/// Vertices of the effective domain of the generator's convex dual. The
/// domain is the polytope
///   { -r_high <= a <= -r_low,
///     -mu1_high <= a + sigma*b <= -mu1_low,
///     -mu2 <= a + eta*g <= -mu2 }
/// (the third interval is a point because mu2 is pinned to lambda*eta).
struct DualVertexSet {
    std::vector<DualVertex> vertices;
};

/// Enumerates the corner combinations of the three constraint intervals and
/// solves each for (alpha, beta, gamma); coincident corners are collapsed.
/// Requires sigma > 0 and eta != 0.
DualVertexSet dual_vertices(const MarketParams& p);

/// max over vertices of alpha*y + beta*z + gamma*c. Equals generator_eval in
/// the active regime (both are maxima of the same finite linear family).
/// Throws std::invalid_argument on an empty vertex set.
double generator_via_dual(double y, double z, double c, const DualVertexSet& set);

struct ValidationReport {
    bool pass = true;
    std::vector<std::string> violations;
    std::string summary() const;
};

/// Checks structural invariants of MarketParams, the sign conditions on the
/// rates relative to eta, the intensity bound on the dual domain, gamma >= -lambda
/// over the dual vertices, and a sampled check of the jump-monotonicity ratio
/// (f(.,c) - f(.,c'))/(lambda (c - c')) >= -1. Failures are reported, never
/// thrown: sweep tooling records which parameter combinations are out of theory.
ValidationReport validate_assumptions(const MarketParams& p);

} // namespace pput
