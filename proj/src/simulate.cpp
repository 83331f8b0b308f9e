#include "pput/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pput {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// arrival gaps at a level-dependent rate: q_sub until the cap, q_top after
std::vector<double> arrivals_leveled(double q_sub, double q_top, int cap, double horizon,
                                     std::mt19937_64& rng) {
    std::vector<double> out;
    std::exponential_distribution<double> exp_dist(1.0);
    double t = 0.0;
    int n = 0;
    while (true) {
        const double rate = n < cap ? q_sub : q_top;
        if (!(rate > 0.0)) break;
        t += exp_dist(rng) / rate;
        if (t > horizon) break;
        out.push_back(t);
        ++n;
    }
    return out;
}

} // namespace

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

std::vector<double> simulate_arrivals(double lambda, double horizon, std::mt19937_64& rng) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("simulate_arrivals: lambda must be positive");
    return arrivals_leveled(lambda, lambda, 0, horizon, rng);
}

std::vector<double> simulate_asset(double s0, double drift, double sigma,
                                   std::span<const double> times, std::mt19937_64& rng) {
    if (!(s0 > 0.0)) throw std::invalid_argument("simulate_asset: s0 must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("simulate_asset: sigma must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> s(times.size());
    double cur = s0;
    double t_prev = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        const double dt = times[i] - t_prev;
        if (dt < 0.0) throw std::invalid_argument("simulate_asset: times must be nondecreasing");
        if (dt > 0.0) {
            const double z = normal(rng);
            cur *= std::exp((drift - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z);
        }
        s[i] = cur;
        t_prev = times[i];
    }
    return s;
}

std::vector<double> build_time_grid(double horizon, double dt_sim,
                                    std::span<const double> arrivals) {
    if (!(dt_sim > 0.0 && dt_sim <= horizon))
        throw std::invalid_argument("build_time_grid: need 0 < dt_sim <= horizon");
    std::vector<double> t;
    const long n = static_cast<long>(std::ceil(horizon / dt_sim - 1e-12));
    t.reserve(n + arrivals.size() + 2);
    for (long j = 0; j < n; ++j)
        t.push_back(j * dt_sim);
    t.push_back(horizon);
    t.insert(t.end(), arrivals.begin(), arrivals.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

PathRecord run_stopping(const ValueChain& chain, const SimulatedPath& path,
                        double discount_rate) {
    const MarketParams& p = chain.params;
    if (path.horizon != p.horizon)
        throw std::invalid_argument("run_stopping: path and chain disagree on the horizon");
    if (path.times.size() != path.s1.size() || path.times.empty())
        throw std::invalid_argument("run_stopping: malformed path");

    const double interp_tol = 1e-8 * p.max_strike();
    auto s_at = [&](double t) {
        auto it = std::lower_bound(path.times.begin(), path.times.end(), t);
        if (it == path.times.end() || *it != t)
            throw std::invalid_argument("run_stopping: arrival time missing from the path grid");
        return path.s1[static_cast<size_t>(it - path.times.begin())];
    };

    PathRecord rec;
    rec.path = path;
    for (size_t n = 0; n < path.arrivals.size(); ++n) {
        const double tn = path.arrivals[n];
        const int level = std::min(static_cast<int>(n) + 1, p.jump_cap);
        const double s = s_at(tn);
        const double v = chain.value(level, tn, s);
        const double g = payoff(level, s, p);
        if (v <= g + interp_tol) {
            rec.tau = tn;
            rec.stop_level = level;
            rec.matured = false;
            rec.payoff_value = g;
            rec.discounted_payoff = std::exp(-discount_rate * tn) * g;
            return rec;
        }
    }
    const int level = std::min(static_cast<int>(path.arrivals.size()), p.jump_cap);
    const double sT = path.s1.back();
    rec.tau = p.horizon;
    rec.stop_level = level;
    rec.matured = true;
    rec.payoff_value = payoff(level, sT, p);
    rec.discounted_payoff = std::exp(-discount_rate * p.horizon) * rec.payoff_value;
    return rec;
}

PathRecord simulate_one_path(const ValueChain& chain, const SimConfig& cfg,
                             double discount_rate, long index) {
    const MarketParams& p = chain.params;
    std::mt19937_64 rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(index)));

    SimulatedPath path;
    path.horizon = p.horizon;
    if (cfg.arrivals == ArrivalModel::physical) {
        path.arrivals = simulate_arrivals(p.lambda, p.horizon, rng);
    } else {
        if (p.r_low != p.r_high)
            throw std::invalid_argument(
                "simulate_one_path: the pricing arrival model needs the linear-rate regime");
        double q_sub = 0.0;
        if (p.jump_cap >= 1) {
            if (p.eta == 0.0)
                throw std::invalid_argument("simulate_one_path: eta must be nonzero when k >= 1");
            q_sub = p.r_low / p.eta;
            if (q_sub < 0.0)
                throw std::invalid_argument(
                    "simulate_one_path: rate/eta is negative; parameters out of theory");
        }
        path.arrivals = arrivals_leveled(q_sub, p.lambda, p.jump_cap, p.horizon, rng);
    }
    path.times = build_time_grid(p.horizon, cfg.dt_sim, path.arrivals);
    path.s1 = simulate_asset(p.s0, cfg.drift, p.sigma, path.times, rng);
    return run_stopping(chain, path, discount_rate);
}

EstimateResult estimate_value(const ValueChain& chain, const SimConfig& cfg,
                              double discount_rate) {
    if (cfg.n_paths < 1)
        throw std::invalid_argument("estimate_value: need at least one path");
    const MarketParams& p = chain.params;
    constexpr int kTauBins = 20;

    EstimateResult res;
    res.n_paths = cfg.n_paths;
    res.reliable = cfg.n_paths >= 30;
    res.stop_level_counts.assign(p.jump_cap + 2, 0);
    res.tau_histogram.assign(kTauBins, 0);

    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < cfg.n_paths; ++i) {
        const PathRecord rec = simulate_one_path(chain, cfg, discount_rate, i);
        sum += rec.discounted_payoff;
        sum_sq += rec.discounted_payoff * rec.discounted_payoff;
        const int bin = std::min(static_cast<int>(rec.tau / p.horizon * kTauBins),
                                 kTauBins - 1);
        res.tau_histogram[bin] += 1;
        res.stop_level_counts[rec.matured ? p.jump_cap + 1 : rec.stop_level] += 1;
    }
    res.mean = sum / cfg.n_paths;
    const double var = std::max(sum_sq / cfg.n_paths - res.mean * res.mean, 0.0);
    res.std_error = std::sqrt(var / cfg.n_paths);
    return res;
}

} // namespace pput
