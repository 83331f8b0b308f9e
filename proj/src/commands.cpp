#include "pput/commands.hpp"

#include "pput/boundary.hpp"
#include "pput/lattice.hpp"
#include "pput/pde.hpp"
#include "pput/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <chrono>
#include <memory>
#include <random>
#include <sstream>

namespace pput {

namespace {

namespace fs = std::filesystem;

// wall time goes to stderr, not into any output file, so repeated runs stay
// byte-identical
struct WallClock {
    const char* name;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    ~WallClock() {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count();
        std::cerr << name << ": wall time " << s << " s\n";
    }
};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_out(const fs::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot open output file: " + path.string());
    return f;
}

void write_metadata(const RunConfig& cfg, const std::string& command,
                    const ValueChain* chain) {
    std::ofstream out(fs::path(cfg.output_dir) / "metadata.txt");
    out << serialize_config(cfg);
    out << "\n[run]\n";
    out << "version = " << tool_version() << "\n";
    out << "command = " << command << "\n";
    const auto rep = validate_assumptions(cfg.market);
    out << "validation = " << (rep.pass ? "pass" : "fail") << "\n";
    for (size_t i = 0; i < rep.violations.size(); ++i)
        out << "validation_violation_" << i << " = " << rep.violations[i] << "\n";
    if (chain) {
        for (const auto& d : chain->diagnostics) {
            out << "level" << d.level << "_policy_iterations = " << d.policy_iterations << "\n";
            out << "level" << d.level << "_worst_step_iterations = " << d.worst_step_iterations
                << "\n";
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", d.worst_residual);
            out << "level" << d.level << "_worst_residual = " << buf << "\n";
        }
    }
}

ValueChain solve_from_config(const RunConfig& cfg) {
    SolveOptions opts;
    opts.tolerance = cfg.tolerances.policy;
    return solve_chain(cfg.market, cfg.grid, opts);
}

void write_surfaces_csv(const fs::path& path, const ValueChain& chain) {
    auto f = open_out(path);
    std::fprintf(f.get(), "level,t,s,value\n");
    const GridSpec& g = chain.grid;
    for (int i = 0; i <= chain.params.jump_cap; ++i)
        for (int j = 0; j <= g.nt; ++j)
            for (int m = 0; m <= g.ns; ++m)
                std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g\n", i,
                             g.t(j, chain.params.horizon), g.s(m), chain.level(i).at(j, m));
}

void write_boundary_csv(const fs::path& path, const ValueChain& chain, double tol) {
    auto f = open_out(path);
    std::fprintf(f.get(), "level,t,boundary_s,defined_flag\n");
    for (int i = 0; i <= chain.params.jump_cap; ++i) {
        const auto bd = extract_boundary(chain, i, tol);
        for (size_t j = 0; j < bd.times.size(); ++j) {
            if (bd.b[j])
                std::fprintf(f.get(), "%d,%.17g,%.17g,1\n", i, bd.times[j], *bd.b[j]);
            else
                std::fprintf(f.get(), "%d,%.17g,nan,0\n", i, bd.times[j]);
        }
    }
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

void report_line(std::ostream& os, const Check& c) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

int cmd_solve(const RunConfig& cfg) {
    WallClock clock{"solve"};
    fs::create_directories(cfg.output_dir);
    const ValueChain chain = solve_from_config(cfg);
    write_surfaces_csv(fs::path(cfg.output_dir) / "surfaces.csv", chain);
    write_metadata(cfg, "solve", &chain);
    return 0;
}

int cmd_boundary(const RunConfig& cfg) {
    WallClock clock{"boundary"};
    fs::create_directories(cfg.output_dir);
    const ValueChain chain = solve_from_config(cfg);
    write_boundary_csv(fs::path(cfg.output_dir) / "boundary.csv", chain,
                       cfg.tolerances.boundary);
    write_metadata(cfg, "boundary", &chain);
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    WallClock clock{"simulate"};
    fs::create_directories(cfg.output_dir);
    const ValueChain chain = solve_from_config(cfg);
    const double discount = cfg.market.r_low; // linear regime recommended

    auto f = open_out(fs::path(cfg.output_dir) / "ensemble.csv");
    std::fprintf(f.get(), "path_id,tau,stop_level,payoff,discounted_payoff\n");

    constexpr int kTauBins = 20;
    std::vector<long> level_counts(cfg.market.jump_cap + 2, 0);
    std::vector<long> tau_hist(kTauBins, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < cfg.sim.n_paths; ++i) {
        const PathRecord rec = simulate_one_path(chain, cfg.sim, discount, i);
        // stop_level = -1 marks paths that matured without stopping
        std::fprintf(f.get(), "%ld,%.17g,%d,%.17g,%.17g\n", i, rec.tau,
                     rec.matured ? -1 : rec.stop_level, rec.payoff_value,
                     rec.discounted_payoff);
        sum += rec.discounted_payoff;
        sum_sq += rec.discounted_payoff * rec.discounted_payoff;
        tau_hist[std::min(static_cast<int>(rec.tau / cfg.market.horizon * kTauBins),
                          kTauBins - 1)] += 1;
        level_counts[rec.matured ? cfg.market.jump_cap + 1 : rec.stop_level] += 1;
    }
    const double mean = sum / cfg.sim.n_paths;
    const double var = std::max(sum_sq / cfg.sim.n_paths - mean * mean, 0.0);
    const double se = std::sqrt(var / cfg.sim.n_paths);

    std::ofstream sum_out(fs::path(cfg.output_dir) / "summary.txt");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", mean);
    sum_out << "mean = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", se);
    sum_out << "std_error = " << buf << "\n";
    sum_out << "n_paths = " << cfg.sim.n_paths << "\n";
    sum_out << "discount_rate = " << cfg.market.r_low << "\n";
    sum_out << "reliable = " << (cfg.sim.n_paths >= 30 ? "yes" : "no (n_paths < 30)") << "\n";
    for (size_t l = 0; l < level_counts.size(); ++l) {
        if (l + 1 == level_counts.size())
            sum_out << "matured = " << level_counts[l] << "\n";
        else
            sum_out << "stopped_at_level_" << l << " = " << level_counts[l] << "\n";
    }
    for (int b = 0; b < kTauBins; ++b)
        sum_out << "tau_bin_" << b << " = " << tau_hist[b] << "\n";

    write_metadata(cfg, "simulate", &chain);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    WallClock clock{"sweep"};
    if (cfg.sweep_lambdas.empty())
        throw ConfigError("sweep: no lambda list given (config [sweep] or --lambda)");
    fs::create_directories(cfg.output_dir);

    std::vector<double> lambdas = cfg.sweep_lambdas;
    std::sort(lambdas.begin(), lambdas.end());

    auto fv = open_out(fs::path(cfg.output_dir) / "sweep_values.csv");
    std::fprintf(fv.get(), "lambda,level,s,value_t0\n");
    auto fb = open_out(fs::path(cfg.output_dir) / "sweep_boundary.csv");
    std::fprintf(fb.get(), "lambda,t,boundary_s,defined_flag\n");

    for (double lam : lambdas) {
        RunConfig c = cfg;
        c.market.lambda = lam;
        const ValueChain chain = solve_from_config(c);
        const GridSpec& g = chain.grid;
        for (int i = 0; i <= c.market.jump_cap; ++i)
            for (int m = 0; m <= g.ns; ++m)
                std::fprintf(fv.get(), "%.17g,%d,%.17g,%.17g\n", lam, i, g.s(m),
                             chain.level(i).at(0, m));
        const auto bd = extract_boundary(chain, c.market.jump_cap, cfg.tolerances.boundary);
        for (size_t j = 0; j < bd.times.size(); ++j) {
            if (bd.b[j])
                std::fprintf(fb.get(), "%.17g,%.17g,%.17g,1\n", lam, bd.times[j], *bd.b[j]);
            else
                std::fprintf(fb.get(), "%.17g,%.17g,nan,0\n", lam, bd.times[j]);
        }
    }
    write_metadata(cfg, "sweep", nullptr);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    WallClock clock{"verify"};
    fs::create_directories(cfg.output_dir);
    std::vector<Check> checks;
    const MarketParams& m = cfg.market;

    // generator duality and the sampled jump-ratio condition on the config market
    if (m.eta != 0.0 && m.sigma > 0.0) {
        const auto set = dual_vertices(m);
        std::mt19937_64 rng(123456789u);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        double worst = 0.0;
        for (int n = 0; n < 10000; ++n) {
            const double y = u(rng), z = u(rng), c = u(rng);
            worst = std::max(worst, std::abs(generator_eval(y, z, c, JumpRegime::active, m) -
                                             generator_via_dual(y, z, c, set)));
        }
        checks.push_back({"generator duality identity (1e4 points)", worst <= 1e-12,
                          "max gap " + num(worst) + " (tol 1e-12)"});

        if (m.lambda > 0.0) {
            double worst_ratio = 1e300;
            for (int n = 0; n < 1000; ++n) {
                const double y = u(rng), z = u(rng);
                double c = u(rng), c2 = u(rng);
                if (c == c2) c2 += 1.0;
                const double r = (generator_eval(y, z, c, JumpRegime::active, m) -
                                  generator_eval(y, z, c2, JumpRegime::active, m)) /
                                 (m.lambda * (c - c2));
                worst_ratio = std::min(worst_ratio, r);
            }
            checks.push_back({"sampled jump-ratio bound (1e3 pairs)",
                              worst_ratio >= -1.0 - 1e-10,
                              "min ratio " + num(worst_ratio) + " (bound -1)"});
        }
    }

    // full assumption validation report on the config market
    {
        const auto rep = validate_assumptions(m);
        checks.push_back({"assumption validation", rep.pass, rep.summary()});
    }

    // lambda = 0 European consistency (fixed canonical setup)
    {
        MarketParams e;
        e.sigma = 0.2; e.eta = 0.1; e.r_low = e.r_high = 0.03;
        e.mu1_low = e.mu1_high = 0.03; e.lambda = 0.0; e.jump_cap = 0;
        e.horizon = 1.0; e.s0 = 1.0;
        const GridSpec g{4.0, 400, 400};
        ValueChain chain = solve_chain(e, g);
        const double v = chain.value(0, 0.0, 1.0);
        const double bs = black_scholes_put(1.0, 1.0, 0.03, 0.2, 1.0);
        const double rel = std::abs(v - bs) / bs;
        checks.push_back({"lambda=0 European consistency", rel <= 0.005,
                          "pde " + num(v) + " vs closed form " + num(bs) + ", rel gap " +
                              num(rel) + " (tol 0.5%)"});
    }

    // lattice agreement battery (linear-rate regime)
    {
        struct Setup { double sigma, eta, r, lam, T; int k; const char* name; };
        const Setup battery[] = {
            {0.2, 0.1, 0.03, 0.2, 5.0, 4, "reference-linear"},
            {0.2, 0.1, 0.03, 0.2, 1.0, 0, "cap-0"},
            {0.2, 0.1, 0.02, 1.0, 2.0, 2, "cap-2"},
            {0.3, 0.1, 0.05, 5.0, 3.0, 4, "cap-4-high-vol"},
            {0.2, -0.2, -0.01, 0.5, 2.0, 1, "negative-eta"},
        };
        for (const auto& b : battery) {
            MarketParams mp;
            mp.sigma = b.sigma; mp.eta = b.eta; mp.r_low = mp.r_high = b.r;
            mp.mu1_low = mp.mu1_high = b.r; mp.lambda = b.lam; mp.jump_cap = b.k;
            mp.horizon = b.T; mp.s0 = 1.0;
            const GridSpec g = GridSpec::default_for(mp);
            ValueChain chain = solve_chain(mp, g);
            const double v = chain.value(0, 0.0, mp.s0);
            const double lat = lattice_value(mp, LatticeSpec{2000, b.r});
            const double gap = std::abs(v - lat);
            checks.push_back({std::string("lattice agreement [") + b.name + "]", gap <= 1e-2,
                              "pde " + num(v) + " vs lattice " + num(lat) + ", gap " +
                                  num(gap) + " (tol 1e-2)"});
        }
    }

    // lambda-monotonicity, boundary shrinkage, level ordering on the config market
    if (m.jump_cap >= 0 && m.eta != 0.0) {
        std::vector<double> lams = cfg.sweep_lambdas;
        if (lams.empty()) lams = {0.2, 1.0, 5.0, 25.0};
        std::sort(lams.begin(), lams.end());
        std::vector<ValueChain> chains;
        for (double lam : lams) {
            MarketParams mp = m;
            mp.lambda = lam;
            chains.push_back(solve_chain(mp, cfg.grid));
        }
        const int k = m.jump_cap;

        double worst_mono = 0.0;
        for (size_t a = 0; a + 1 < chains.size(); ++a)
            for (int j = 0; j <= cfg.grid.nt; ++j)
                for (int mm = 0; mm <= cfg.grid.ns; ++mm)
                    worst_mono = std::max(worst_mono, chains[a].level(k).at(j, mm) -
                                                          chains[a + 1].level(k).at(j, mm));
        checks.push_back({"top-surface monotonicity in lambda", worst_mono <= 1e-6,
                          "worst decrease " + num(worst_mono) + " (tol 1e-6)"});

        double worst_bd = -1e300;
        bool marker_ok = true;
        const double cell = cfg.grid.ds();
        std::vector<ExerciseBoundary> bds;
        for (const auto& ch : chains)
            bds.push_back(extract_boundary(ch, k, cfg.tolerances.boundary));
        for (size_t a = 0; a + 1 < bds.size(); ++a)
            for (size_t j = 0; j < bds[a].b.size(); ++j) {
                if (bds[a].b[j] && bds[a + 1].b[j])
                    worst_bd = std::max(worst_bd, *bds[a + 1].b[j] - *bds[a].b[j]);
                else if (!bds[a].b[j] && bds[a + 1].b[j])
                    marker_ok = false; // the stop region grew with lambda
            }
        checks.push_back({"exercise boundary shrinks with lambda",
                          marker_ok && worst_bd <= cell,
                          "worst rise " + num(worst_bd) + " (tol one cell " + num(cell) + ")"});

        double worst_ord = 0.0;
        for (int i = 0; i + 1 <= k; ++i)
            for (int mm = 0; mm <= cfg.grid.ns; ++mm)
                worst_ord = std::max(worst_ord, chains[0].level(i).at(0, mm) -
                                                    chains[0].level(i + 1).at(0, mm));
        checks.push_back({"level ordering at t=0", worst_ord <= 1e-6,
                          "worst violation " + num(worst_ord) + " (tol 1e-6)"});
    }

    std::ofstream rep(fs::path(cfg.output_dir) / "report.txt");
    int fails = 0;
    for (const auto& c : checks) {
        report_line(rep, c);
        report_line(std::cerr, c);
        if (!c.pass) ++fails;
    }
    write_metadata(cfg, "verify", nullptr);
    return fails;
}

} // namespace pput
