#pragma once

#include "pput/grid.hpp"
#include "pput/market.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pput {

struct SolveOptions {
    double tolerance = 1e-10;      // residual tolerance, price units
    int max_policy_iterations = 50;
};

/// Thrown when policy iteration fails to converge or values go non-finite.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double worst_residual)
        : std::runtime_error(msg), worst_residual_(worst_residual) {}
    double worst_residual() const { return worst_residual_; }

private:
    double worst_residual_;
};

/// One value surface on the grid: rows are time levels t_0..t_nt, columns the
/// space nodes s_0..s_ns.
class Surface {
public:
    Surface() = default;
    Surface(int nt, int ns) : nt_(nt), ns_(ns), data_((nt + 1) * (ns + 1), 0.0) {}

    double& at(int j, int m) { return data_[static_cast<size_t>(j) * (ns_ + 1) + m]; }
    double at(int j, int m) const { return data_[static_cast<size_t>(j) * (ns_ + 1) + m]; }
    std::span<double> row(int j) { return {data_.data() + static_cast<size_t>(j) * (ns_ + 1), static_cast<size_t>(ns_ + 1)}; }
    std::span<const double> row(int j) const { return {data_.data() + static_cast<size_t>(j) * (ns_ + 1), static_cast<size_t>(ns_ + 1)}; }

    int nt() const { return nt_; }
    int ns() const { return ns_; }

private:
    int nt_ = 0;
    int ns_ = 0;
    std::vector<double> data_;
};

struct LevelDiagnostics {
    int level = 0;
    long policy_iterations = 0;  // summed over time steps
    int worst_step_iterations = 0;
    double worst_residual = 0.0; // max over steps of the converged residual
};

/// The family of jump_cap+1 value surfaces on a shared grid, indexed by the
/// number of arrivals seen so far (capped). Immutable after construction.
struct ValueChain {
    MarketParams params;
    GridSpec grid;
    std::vector<Surface> levels; // index 0..jump_cap
    std::vector<LevelDiagnostics> diagnostics;

    const Surface& level(int i) const { return levels.at(static_cast<size_t>(i)); }

    /// Bilinear interpolation of level i at (t, s); values at or beyond s_max
    /// clamp to 0, t clamps into [0, T].
    double value(int i, double t, double s) const;
};

/// Solves the top-level equation (the strike stops ratcheting, exercise is
/// penalised at rate lambda):
///
///   dV/dt + 1/2 sigma^2 s^2 V_ss + max_{r in {r_low, r_high}} [-r (V - s V_s)]
///        + lambda (g_k - V)^+ = 0,     V(T, s) = g_k(s)
///
/// by backward Euler with Howard policy iteration over the rate choice and
/// the penalty active set; convection is upwinded so every policy system is
/// an M-matrix.
Surface solve_top_level(const MarketParams& p, const GridSpec& grid,
                        const SolveOptions& opts = {});

/// Solves the level-i equation given the already-solved level i+1:
///
///   dV/dt + 1/2 sigma^2 s^2 V_ss + max_r [-r B(V)] = 0,  V(T, s) = g_i(s)
///   B = V - s V_s - [Vnext - V + (g_{i+1} - Vnext)^+] / eta
///
/// where Vnext is read from v_next at the same new time level and the V
/// inside B is implicit.
Surface solve_level(const MarketParams& p, const GridSpec& grid, int level,
                    const Surface& v_next, const SolveOptions& opts = {});

/// Runs solve_top_level then solve_level for i = k-1 down to 0.
ValueChain solve_chain(const MarketParams& p, const GridSpec& grid,
                       const SolveOptions& opts = {});

/// Max absolute residual of the discretized equations over every interior node
/// of every stored time step, recomputed from the chain values alone.
double max_chain_residual(const ValueChain& chain);

namespace detail {

/// One implicit step's tridiagonal system for a fixed policy, exposed so the
/// monotone-scheme structure (nonpositive off-diagonals, diagonally dominant
/// rows) can be asserted on the assembled operator.
struct StepSystem {
    std::vector<double> lower, diag, upper, rhs;
    std::vector<double> rate;          // selected rate per node
    std::vector<std::uint8_t> penalty; // top level only: penalty active set
};

/// Policy selection + assembly for the top-level step. v_iter supplies the
/// policy; v_prev is the already-known row at the previous (later) time.
StepSystem assemble_top_step(const MarketParams& p, const GridSpec& grid,
                             std::span<const double> v_iter,
                             std::span<const double> v_prev);

/// Same for a coupled level-i step; w is the row max(g_{i+1}, v_next).
StepSystem assemble_coupled_step(const MarketParams& p, const GridSpec& grid,
                                 std::span<const double> v_iter,
                                 std::span<const double> v_prev,
                                 std::span<const double> w);

/// Residuals of the nonlinear (sup-form) step equations.
double top_step_residual(const MarketParams& p, const GridSpec& grid,
                         std::span<const double> v, std::span<const double> v_prev);
double coupled_step_residual(const MarketParams& p, const GridSpec& grid,
                             std::span<const double> v, std::span<const double> v_prev,
                             std::span<const double> w);

} // namespace detail

} // namespace pput
