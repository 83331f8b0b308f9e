#pragma once

#include "pput/pde.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pput {

/// Which arrival law drives the ensemble.
///   physical: homogeneous Poisson at the market intensity lambda — scenario
///             realism for exported paths.
///   pricing:  the law the solved chain prices under in the linear-rate
///             regime (rate/eta while the strike can still ratchet, lambda at
///             the cap), which is what makes the ensemble mean a lower-bound
///             estimator of the chain value.
enum class ArrivalModel { physical, pricing };

struct SimConfig {
    long n_paths = 100000;
    std::uint64_t seed = 42;
    double dt_sim = 0.05;  // years between recorded path points
    double drift = 0.0;    // asset-1 drift for path generation
    ArrivalModel arrivals = ArrivalModel::physical;
};

/// The inputs of one scenario: arrival times, the recording grid (grid points
/// plus every arrival, plus 0 and T), and asset-1 values on it.
struct SimulatedPath {
    std::vector<double> arrivals;
    std::vector<double> times;
    std::vector<double> s1;
    double horizon = 0.0;
};

/// One executed scenario.
struct PathRecord {
    SimulatedPath path;
    double tau = 0.0;          // T, or a member of arrivals
    int stop_level = 0;        // min(n, k) at the stop; level held at T if matured
    bool matured = false;
    double payoff_value = 0.0;
    double discounted_payoff = 0.0;
};

struct EstimateResult {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::vector<long> stop_level_counts; // index 0..k for stops, k+1 for matured
    std::vector<long> tau_histogram;     // 20 uniform bins over (0, T]
    bool reliable = true;                // false when n_paths < 30
};

/// Deterministic per-stream seed derivation, so results are independent of
/// evaluation order.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

/// Sorted arrival times of a Poisson process with the given intensity,
/// truncated at the horizon; may be empty.
std::vector<double> simulate_arrivals(double lambda, double horizon, std::mt19937_64& rng);

/// Geometric Brownian path at the given time points, started from s0 at time
/// zero, with exact log-normal increments between consecutive points.
std::vector<double> simulate_asset(double s0, double drift, double sigma,
                                   std::span<const double> times, std::mt19937_64& rng);

/// Merges the uniform recording grid with the arrival times.
std::vector<double> build_time_grid(double horizon, double dt_sim,
                                    std::span<const double> arrivals);

/// Executes the stopping rule against the chain: walk the arrivals in order;
/// at the n-th, evaluate level min(n, k) by bilinear interpolation and stop at
/// the first arrival where V <= payoff + interp_tol; otherwise mature at T at
/// the level reached. Throws if the path horizon disagrees with the chain.
PathRecord run_stopping(const ValueChain& chain, const SimulatedPath& path,
                        double discount_rate);

/// Generates the index-th scenario of the ensemble (deterministic in
/// (cfg.seed, index)) and executes the stopping rule.
PathRecord simulate_one_path(const ValueChain& chain, const SimConfig& cfg,
                             double discount_rate, long index);

/// Ensemble mean of discounted payoffs under the chain's stopping rule, with
/// its standard error and stopping statistics.
EstimateResult estimate_value(const ValueChain& chain, const SimConfig& cfg,
                              double discount_rate);

} // namespace pput
