#pragma once

#include "pput/pde.hpp"

#include <optional>
#include <vector>

namespace pput {

/// Per-level free boundary b_i(t) separating the stop region (below) from the
/// hold region. Rows where the whole gap V - g exceeds the tolerance carry no
/// boundary (nullopt) rather than a fabricated 0.
struct ExerciseBoundary {
    int level = 0;
    std::vector<double> times;
    std::vector<std::optional<double>> b;
};

double default_boundary_tol(const MarketParams& p);

/// For each time row, the largest grid s below the strike with
/// V(t,s) - g(s) <= tol, refined by linear interpolation of the gap between
/// the bracketing nodes and capped at the strike. tol <= 0 selects the
/// default 1e-6 * max strike.
ExerciseBoundary extract_boundary(const ValueChain& chain, int level, double tol = 0.0);

/// Smooth-pasting diagnostic: max over interior time rows of
/// |dV/ds(t, b(t)) - (-1)|, the slope taken by a one-sided second-order
/// stencil from the continuation side. The terminal row is excluded (there the
/// stencil reads the payoff kink, not pasting). Throws if the boundary is
/// undefined at every interior row.
double pasting_gap(const ValueChain& chain, int level, const ExerciseBoundary& boundary);

namespace detail {

/// Extraction against an explicit obstacle row, shared by extract_boundary and
/// the synthetic-obstacle tests.
std::optional<double> boundary_in_row(std::span<const double> values,
                                      std::span<const double> obstacle,
                                      double strike, double ds, double tol);

} // namespace detail

} // namespace pput
