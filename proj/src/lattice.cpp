#include "pput/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pput {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct CrrTree {
    double up, down, prob, disc;
    std::vector<double> up_pow; // up^(e - steps) at index e, e = 0..2*steps

    CrrTree(double rate, double sigma, double dt, int steps) {
        up = std::exp(sigma * std::sqrt(dt));
        down = 1.0 / up;
        prob = (std::exp(rate * dt) - down) / (up - down);
        disc = std::exp(-rate * dt);
        if (!(prob > 0.0 && prob < 1.0))
            throw std::invalid_argument("lattice: step count too coarse for these parameters");
        up_pow.resize(2 * steps + 1);
        for (int e = 0; e <= 2 * steps; ++e)
            up_pow[e] = std::pow(up, e - steps);
    }

    // price at step j, node m (m down-moves)
    double node_s(double s0, int steps, int j, int m) const {
        return s0 * up_pow[steps + j - 2 * m];
    }
};

} // namespace

double black_scholes_put(double s, double strike, double rate, double sigma, double tau) {
    if (s <= 0.0 || strike <= 0.0)
        throw std::invalid_argument("black_scholes_put: s and strike must be positive");
    if (sigma < 0.0 || tau < 0.0)
        throw std::invalid_argument("black_scholes_put: sigma and tau must be nonnegative");
    if (tau == 0.0 || sigma == 0.0)
        return std::max(strike * std::exp(-rate * tau) - s, 0.0);
    const double st = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / strike) + (rate + 0.5 * sigma * sigma) * tau) / st;
    const double d2 = d1 - st;
    return strike * std::exp(-rate * tau) * norm_cdf(-d2) - s * norm_cdf(-d1);
}

double binomial_american_put(double s0, double strike, double rate, double sigma,
                             double horizon, int steps) {
    const double dt = horizon / steps;
    CrrTree tree(rate, sigma, dt, steps);
    std::vector<double> v(steps + 1);
    for (int m = 0; m <= steps; ++m)
        v[m] = std::max(strike - tree.node_s(s0, steps, steps, m), 0.0);
    for (int j = steps - 1; j >= 0; --j) {
        for (int m = 0; m <= j; ++m) {
            const double cont = tree.disc * (tree.prob * v[m] + (1.0 - tree.prob) * v[m + 1]);
            v[m] = std::max(cont, strike - tree.node_s(s0, steps, j, m));
        }
    }
    return v[0];
}

double binomial_american_put_delta(double s0, double strike, double rate, double sigma,
                                   double horizon, int steps) {
    const double dt = horizon / steps;
    CrrTree tree(rate, sigma, dt, steps);
    std::vector<double> v(steps + 1);
    for (int m = 0; m <= steps; ++m)
        v[m] = std::max(strike - tree.node_s(s0, steps, steps, m), 0.0);
    for (int j = steps - 1; j >= 1; --j) {
        for (int m = 0; m <= j; ++m) {
            const double cont = tree.disc * (tree.prob * v[m] + (1.0 - tree.prob) * v[m + 1]);
            v[m] = std::max(cont, strike - tree.node_s(s0, steps, j, m));
        }
    }
    return (v[0] - v[1]) / (s0 * tree.up - s0 * tree.down);
}

double lattice_value(const MarketParams& p, const LatticeSpec& spec) {
    if (spec.steps < 100)
        throw std::invalid_argument("lattice_value: need at least 100 steps");
    if (p.r_low != p.r_high || p.r_low != spec.rate)
        throw std::invalid_argument("lattice_value: linear-rate regime only (r_low = r_high = rate)");
    if (p.jump_cap >= 1 && p.eta == 0.0)
        throw std::invalid_argument("lattice_value: eta must be nonzero when k >= 1");

    const int k = p.jump_cap;
    const double dt = p.horizon / spec.steps;
    const double q_top = p.lambda;
    const double q_sub = k >= 1 ? spec.rate / p.eta : 0.0;
    if (q_top * dt >= 1.0 || q_sub * dt >= 1.0)
        throw std::invalid_argument("lattice_value: per-step arrival probability reaches 1");
    if (q_sub < 0.0)
        throw std::invalid_argument("lattice_value: rate/eta is negative; parameters out of theory");

    CrrTree tree(spec.rate, p.sigma, dt, spec.steps);
    auto node_s = [&](int j, int m) { return tree.node_s(p.s0, spec.steps, j, m); };

    std::vector<std::vector<double>> cur(k + 1), nxt(k + 1);
    for (int i = 0; i <= k; ++i) {
        nxt[i].resize(spec.steps + 1);
        for (int m = 0; m <= spec.steps; ++m)
            nxt[i][m] = payoff(i, node_s(spec.steps, m), p);
    }

    std::vector<double> exercise(spec.steps + 1);
    for (int j = spec.steps - 1; j >= 0; --j) {
        for (int i = 0; i <= k; ++i)
            cur[i].assign(j + 1, 0.0);
        for (int i = 0; i <= k; ++i) {
            const int i2 = std::min(i + 1, k);
            const double q = (i < k ? q_sub : q_top) * dt;
            for (int m = 0; m <= j + 1; ++m)
                exercise[m] = std::max(payoff(i2, node_s(j + 1, m), p), nxt[i2][m]);
            for (int m = 0; m <= j; ++m) {
                const double cont_same = tree.prob * nxt[i][m] + (1.0 - tree.prob) * nxt[i][m + 1];
                const double cont_jump =
                    tree.prob * exercise[m] + (1.0 - tree.prob) * exercise[m + 1];
                cur[i][m] = tree.disc * ((1.0 - q) * cont_same + q * cont_jump);
            }
        }
        cur.swap(nxt);
    }
    return nxt[0][0];
}

} // namespace pput
