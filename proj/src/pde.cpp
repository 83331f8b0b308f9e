#include "pput/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pput {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

// upwinded first derivative at interior node m for convection coefficient r*s
inline double d1_upwind(std::span<const double> v, int m, double ds, double r) {
    return r >= 0.0 ? (v[m + 1] - v[m]) / ds : (v[m] - v[m - 1]) / ds;
}

void thomas_solve(const std::vector<double>& lower, const std::vector<double>& diag,
                  const std::vector<double>& upper, const std::vector<double>& rhs,
                  std::vector<double>& cp, std::vector<double>& dp,
                  std::vector<double>& out) {
    const size_t n = diag.size();
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (size_t m = 1; m < n; ++m) {
        const double denom = diag[m] - lower[m] * cp[m - 1];
        cp[m] = upper[m] / denom;
        dp[m] = (rhs[m] - lower[m] * dp[m - 1]) / denom;
    }
    out[n - 1] = dp[n - 1];
    for (size_t m = n - 1; m-- > 0;)
        out[m] = dp[m] - cp[m] * out[m + 1];
}

struct LevelContext {
    const MarketParams* p;
    const GridSpec* grid;
    int level;             // payoff level of this surface
    bool top;              // top level carries the lambda penalty
    std::vector<double> s; // node prices
    std::vector<double> g; // payoff(level, s_m)
    std::vector<double> alpha; // 1/2 sigma^2 s^2 / ds^2
    double dt;

    LevelContext(const MarketParams& params, const GridSpec& gr, int lvl, bool is_top)
        : p(&params), grid(&gr), level(lvl), top(is_top) {
        const int ns = gr.ns;
        const double ds = gr.ds();
        dt = gr.dt(params.horizon);
        s.resize(ns + 1);
        g.resize(ns + 1);
        alpha.resize(ns + 1);
        for (int m = 0; m <= ns; ++m) {
            s[m] = gr.s(m);
            g[m] = payoff(lvl, s[m], params);
            alpha[m] = 0.5 * params.sigma * params.sigma * s[m] * s[m] / (ds * ds);
        }
    }
};

// -r * bracket for the two rate choices, with the derivative upwinded per rate
inline void rate_branches(const LevelContext& ctx, std::span<const double> v, int m,
                          const double* w, double& q_low, double& q_high) {
    const double ds = ctx.grid->ds();
    const MarketParams& p = *ctx.p;
    auto bracket = [&](double r) {
        const double vs = (m == 0 || m == ctx.grid->ns) ? 0.0 : d1_upwind(v, m, ds, r);
        if (w == nullptr) return v[m] - ctx.s[m] * vs; // top level: V - s V_s
        return (1.0 + 1.0 / p.eta) * v[m] - ctx.s[m] * vs - w[m] / p.eta;
    };
    q_low = -p.r_low * bracket(p.r_low);
    q_high = -p.r_high * bracket(p.r_high);
}

detail::StepSystem assemble_step(const LevelContext& ctx, std::span<const double> v_iter,
                                 std::span<const double> v_prev, const double* w) {
    const MarketParams& p = *ctx.p;
    const int ns = ctx.grid->ns;
    const double ds = ctx.grid->ds();
    const double dt = ctx.dt;

    detail::StepSystem sys;
    sys.lower.assign(ns + 1, 0.0);
    sys.diag.assign(ns + 1, 0.0);
    sys.upper.assign(ns + 1, 0.0);
    sys.rhs.assign(ns + 1, 0.0);
    sys.rate.assign(ns + 1, p.r_low);
    sys.penalty.assign(ns + 1, 0);

    for (int m = 0; m < ns; ++m) {
        double q_low, q_high;
        rate_branches(ctx, v_iter, m, w, q_low, q_high);
        const double r = q_low >= q_high ? p.r_low : p.r_high; // tie -> r_low
        sys.rate[m] = r;

        const double zeroth = (w == nullptr) ? r : r * (1.0 + 1.0 / p.eta);
        double source = (w == nullptr) ? 0.0 : (r / p.eta) * w[m];
        double pen_rate = 0.0;
        if (ctx.top && ctx.g[m] - v_iter[m] > 0.0) {
            sys.penalty[m] = 1;
            pen_rate = p.lambda;
            source += p.lambda * ctx.g[m];
        }

        if (m == 0) { // degenerate boundary row: no s-derivatives survive
            sys.diag[0] = 1.0 + dt * (zeroth + pen_rate);
            sys.rhs[0] = v_prev[0] + dt * source;
            continue;
        }
        const double a = r * ctx.s[m];
        const double ap = pos(a), am = pos(-a);
        sys.lower[m] = -dt * (ctx.alpha[m] + am / ds);
        sys.diag[m] = 1.0 + dt * (2.0 * ctx.alpha[m] + (ap + am) / ds + zeroth + pen_rate);
        sys.upper[m] = -dt * (ctx.alpha[m] + ap / ds);
        sys.rhs[m] = v_prev[m] + dt * source;
    }
    sys.diag[ns] = 1.0; // Dirichlet V(s_max) = 0
    sys.rhs[ns] = 0.0;
    return sys;
}

double step_residual(const LevelContext& ctx, std::span<const double> v,
                     std::span<const double> v_prev, const double* w) {
    const MarketParams& p = *ctx.p;
    const int ns = ctx.grid->ns;
    const double dt = ctx.dt;
    double worst = 0.0;
    for (int m = 0; m < ns; ++m) {
        double q_low, q_high;
        rate_branches(ctx, v, m, w, q_low, q_high);
        double op = std::max(q_low, q_high);
        if (m > 0)
            op += ctx.alpha[m] * (v[m + 1] - 2.0 * v[m] + v[m - 1]);
        if (ctx.top)
            op += p.lambda * pos(ctx.g[m] - v[m]);
        worst = std::max(worst, std::abs(v[m] - v_prev[m] - dt * op));
    }
    return worst;
}

Surface solve_backward(const MarketParams& p, const GridSpec& grid, int level, bool top,
                       const Surface* v_next, const SolveOptions& opts,
                       LevelDiagnostics& diag) {
    grid.check(p);
    const int ns = grid.ns;
    const int nt = grid.nt;
    LevelContext ctx(p, grid, level, top);

    Surface surf(nt, ns);
    for (int m = 0; m <= ns; ++m)
        surf.at(nt, m) = ctx.g[m]; // terminal condition, exact

    std::vector<double> v(ns + 1), v_prev(ns + 1), w(ns + 1), cp(ns + 1), dp(ns + 1),
        v_new(ns + 1);
    std::vector<double> g_next;
    if (!top) {
        g_next.resize(ns + 1);
        for (int m = 0; m <= ns; ++m)
            g_next[m] = payoff(level + 1, ctx.s[m], p);
    }

    diag = LevelDiagnostics{};
    diag.level = level;

    for (int j = nt - 1; j >= 0; --j) {
        auto prev_row = surf.row(j + 1);
        std::copy(prev_row.begin(), prev_row.end(), v_prev.begin());
        v = v_prev; // warm start
        const double* w_ptr = nullptr;
        if (!top) {
            auto next_row = v_next->row(j); // level i+1 at the same new time level
            for (int m = 0; m <= ns; ++m)
                w[m] = std::max(g_next[m], next_row[m]);
            w_ptr = w.data();
        }

        bool converged = false;
        int it = 0;
        double res = 0.0;
        for (; it < opts.max_policy_iterations; ++it) {
            auto sys = assemble_step(ctx, v, v_prev, w_ptr);
            thomas_solve(sys.lower, sys.diag, sys.upper, sys.rhs, cp, dp, v_new);
            for (int m = 0; m <= ns; ++m) {
                if (!std::isfinite(v_new[m])) {
                    std::ostringstream os;
                    os << "level " << level << ": non-finite value at t-step " << j
                       << ", node " << m;
                    throw SolverError(os.str(), std::numeric_limits<double>::infinity());
                }
            }
            v.swap(v_new);
            res = step_residual(ctx, v, v_prev, w_ptr);
            if (res <= opts.tolerance) {
                converged = true;
                ++it;
                break;
            }
        }
        if (!converged) {
            std::ostringstream os;
            os << "level " << level << ": policy iteration did not converge at t-step "
               << j << " (residual " << res << ")";
            throw SolverError(os.str(), res);
        }
        diag.policy_iterations += it;
        diag.worst_step_iterations = std::max(diag.worst_step_iterations, it);
        diag.worst_residual = std::max(diag.worst_residual, res);
        auto row = surf.row(j);
        std::copy(v.begin(), v.end(), row.begin());
    }
    return surf;
}

} // namespace

double ValueChain::value(int i, double t, double s) const {
    const Surface& surf = level(i);
    if (s >= grid.s_max) return 0.0;
    if (s < 0.0) s = 0.0;
    const double dtg = grid.dt(params.horizon);
    const double dsg = grid.ds();
    double tj = t / dtg;
    int j = std::clamp(static_cast<int>(tj), 0, grid.nt - 1);
    double ft = std::clamp(tj - j, 0.0, 1.0);
    double sm = s / dsg;
    int m = std::clamp(static_cast<int>(sm), 0, grid.ns - 1);
    double fs = std::clamp(sm - m, 0.0, 1.0);
    const double v00 = surf.at(j, m), v01 = surf.at(j, m + 1);
    const double v10 = surf.at(j + 1, m), v11 = surf.at(j + 1, m + 1);
    return (1.0 - ft) * ((1.0 - fs) * v00 + fs * v01) +
           ft * ((1.0 - fs) * v10 + fs * v11);
}

Surface solve_top_level(const MarketParams& p, const GridSpec& grid,
                        const SolveOptions& opts) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("solve_top_level: sigma must be positive");
    if (p.lambda < 0.0) throw std::invalid_argument("solve_top_level: lambda must be nonnegative");
    LevelDiagnostics diag;
    return solve_backward(p, grid, p.jump_cap, true, nullptr, opts, diag);
}

Surface solve_level(const MarketParams& p, const GridSpec& grid, int level,
                    const Surface& v_next, const SolveOptions& opts) {
    if (level < 0 || level >= p.jump_cap)
        throw std::invalid_argument("solve_level: level must lie in [0, jump_cap)");
    if (p.eta == 0.0)
        throw std::invalid_argument("solve_level: coupled levels require eta != 0");
    if (v_next.ns() != grid.ns || v_next.nt() != grid.nt)
        throw std::invalid_argument("solve_level: v_next was solved on a different grid");
    LevelDiagnostics diag;
    return solve_backward(p, grid, level, false, &v_next, opts, diag);
}

ValueChain solve_chain(const MarketParams& p, const GridSpec& grid,
                       const SolveOptions& opts) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("solve_chain: sigma must be positive");
    if (p.lambda < 0.0) throw std::invalid_argument("solve_chain: lambda must be nonnegative");
    if (p.jump_cap >= 1 && p.eta == 0.0)
        throw std::invalid_argument("solve_chain: eta must be nonzero when jump_cap >= 1");

    ValueChain chain;
    chain.params = p;
    chain.grid = grid;
    chain.levels.resize(p.jump_cap + 1);
    chain.diagnostics.resize(p.jump_cap + 1);

    try {
        chain.levels[p.jump_cap] =
            solve_backward(p, grid, p.jump_cap, true, nullptr, opts,
                           chain.diagnostics[p.jump_cap]);
        for (int i = p.jump_cap - 1; i >= 0; --i)
            chain.levels[i] = solve_backward(p, grid, i, false, &chain.levels[i + 1], opts,
                                             chain.diagnostics[i]);
    } catch (const SolverError& e) {
        throw SolverError(std::string("solve_chain: ") + e.what(), e.worst_residual());
    }
    return chain;
}

double max_chain_residual(const ValueChain& chain) {
    const MarketParams& p = chain.params;
    const GridSpec& grid = chain.grid;
    double worst = 0.0;
    for (int i = p.jump_cap; i >= 0; --i) {
        const bool top = i == p.jump_cap;
        LevelContext ctx(p, grid, i, top);
        std::vector<double> w(grid.ns + 1);
        for (int j = grid.nt - 1; j >= 0; --j) {
            const double* w_ptr = nullptr;
            if (!top) {
                auto next_row = chain.level(i + 1).row(j);
                for (int m = 0; m <= grid.ns; ++m)
                    w[m] = std::max(payoff(i + 1, ctx.s[m], p), next_row[m]);
                w_ptr = w.data();
            }
            worst = std::max(worst, step_residual(ctx, chain.level(i).row(j),
                                                  chain.level(i).row(j + 1), w_ptr));
        }
    }
    return worst;
}

namespace detail {

StepSystem assemble_top_step(const MarketParams& p, const GridSpec& grid,
                             std::span<const double> v_iter,
                             std::span<const double> v_prev) {
    LevelContext ctx(p, grid, p.jump_cap, true);
    return assemble_step(ctx, v_iter, v_prev, nullptr);
}

StepSystem assemble_coupled_step(const MarketParams& p, const GridSpec& grid,
                                 std::span<const double> v_iter,
                                 std::span<const double> v_prev,
                                 std::span<const double> w) {
    LevelContext ctx(p, grid, 0, false);
    return assemble_step(ctx, v_iter, v_prev, w.data());
}

double top_step_residual(const MarketParams& p, const GridSpec& grid,
                         std::span<const double> v, std::span<const double> v_prev) {
    LevelContext ctx(p, grid, p.jump_cap, true);
    return step_residual(ctx, v, v_prev, nullptr);
}

double coupled_step_residual(const MarketParams& p, const GridSpec& grid,
                             std::span<const double> v, std::span<const double> v_prev,
                             std::span<const double> w) {
    LevelContext ctx(p, grid, 0, false);
    return step_residual(ctx, v, v_prev, w.data());
}

} // namespace detail

} // namespace pput
