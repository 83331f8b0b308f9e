#include "pput/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pput {

double default_boundary_tol(const MarketParams& p) {
    return 1e-6 * p.max_strike();
}

namespace detail {

std::optional<double> boundary_in_row(std::span<const double> values,
                                      std::span<const double> obstacle,
                                      double strike, double ds, double tol) {
    const int ns = static_cast<int>(values.size()) - 1;
    int m = -1;
    for (int i = ns; i >= 0; --i) {
        const double s = i * ds;
        if (s < strike && values[i] - obstacle[i] <= tol) {
            m = i;
            break;
        }
    }
    if (m < 0) return std::nullopt;
    const double gap0 = values[m] - obstacle[m];
    if (m + 1 <= ns) {
        const double gap1 = values[m + 1] - obstacle[m + 1];
        if (gap1 > tol) {
            const double frac = (tol - gap0) / (gap1 - gap0);
            return std::min(m * ds + frac * ds, strike);
        }
    }
    // the next node (at or beyond the strike) is still within tolerance:
    // the region reaches the strike itself
    return strike;
}

} // namespace detail

ExerciseBoundary extract_boundary(const ValueChain& chain, int level, double tol) {
    const MarketParams& p = chain.params;
    if (level < 0 || level > p.jump_cap)
        throw std::invalid_argument("extract_boundary: level out of range");
    if (tol <= 0.0) tol = default_boundary_tol(p);

    const GridSpec& grid = chain.grid;
    const double K = p.strike(level);
    const double ds = grid.ds();
    std::vector<double> obstacle(grid.ns + 1);
    for (int m = 0; m <= grid.ns; ++m)
        obstacle[m] = payoff(level, grid.s(m), p);

    ExerciseBoundary out;
    out.level = level;
    out.times.resize(grid.nt + 1);
    out.b.resize(grid.nt + 1);
    for (int j = 0; j <= grid.nt; ++j) {
        out.times[j] = grid.t(j, p.horizon);
        out.b[j] = detail::boundary_in_row(chain.level(level).row(j), obstacle, K, ds, tol);
    }
    return out;
}

double pasting_gap(const ValueChain& chain, int level, const ExerciseBoundary& boundary) {
    const GridSpec& grid = chain.grid;
    if (static_cast<int>(boundary.b.size()) != grid.nt + 1)
        throw std::invalid_argument("pasting_gap: boundary does not match the chain grid");
    const double ds = grid.ds();
    const Surface& surf = chain.level(level);

    double worst = -1.0;
    for (int j = 0; j < grid.nt; ++j) { // terminal row excluded
        if (!boundary.b[j]) continue;
        const int m0 = static_cast<int>(std::ceil(*boundary.b[j] / ds - 1e-12));
        if (m0 + 2 > grid.ns) continue;
        const double slope =
            (-3.0 * surf.at(j, m0) + 4.0 * surf.at(j, m0 + 1) - surf.at(j, m0 + 2)) /
            (2.0 * ds);
        worst = std::max(worst, std::abs(slope + 1.0));
    }
    if (worst < 0.0)
        throw std::invalid_argument(
            "pasting_gap: boundary undefined at every interior time row");
    return worst;
}

} // namespace pput
