#include "pput/market.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pput {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

} // namespace

double MarketParams::strike(int level) const {
    int l = std::min(level, jump_cap);
    return std::pow(1.0 + eta, static_cast<double>(l));
}

double payoff(int level, double s, const MarketParams& p) {
    if (level < 0) throw std::invalid_argument("payoff: level must be nonnegative");
    if (s < 0.0) throw std::invalid_argument("payoff: price must be nonnegative");
    return pos(p.strike(level) - s);
}

double generator_eval(double y, double z, double c, JumpRegime regime,
                      const MarketParams& p) {
    const bool active = regime == JumpRegime::active;
    if (active && p.eta == 0.0)
        throw std::invalid_argument("generator_eval: active jump regime requires eta != 0");

    const double jump_pos = active ? c / p.eta : 0.0;
    const double w = y - z / p.sigma - jump_pos;
    double f = -p.r_low * pos(w) + p.r_high * neg(w);
    f += -p.mu1_low * pos(z) / p.sigma + p.mu1_high * neg(z) / p.sigma;
    if (active) {
        const double m2 = p.mu2();
        f += -m2 * pos(jump_pos) + m2 * neg(jump_pos);
    }
    return f;
}

DualVertexSet dual_vertices(const MarketParams& p) {
    if (p.sigma <= 0.0) throw std::invalid_argument("dual_vertices: sigma must be positive");
    if (p.eta == 0.0) throw std::invalid_argument("dual_vertices: eta must be nonzero");

    const double a_bounds[2] = {-p.r_high, -p.r_low};
    const double b_bounds[2] = {-p.mu1_high, -p.mu1_low};
    const double m2 = p.mu2();
    const double g_bounds[2] = {-m2, -m2}; // the mu2 interval is a point

    DualVertexSet set;
    for (double a : a_bounds) {
        for (double b : b_bounds) {
            for (double g : g_bounds) {
                DualVertex v{a, (b - a) / p.sigma, (g - a) / p.eta};
                bool dup = false;
                for (const auto& u : set.vertices) {
                    if (u.alpha == v.alpha && u.beta == v.beta && u.gamma == v.gamma) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) set.vertices.push_back(v);
            }
        }
    }
    return set;
}

double generator_via_dual(double y, double z, double c, const DualVertexSet& set) {
    if (set.vertices.empty())
        throw std::invalid_argument("generator_via_dual: empty vertex set");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : set.vertices)
        best = std::max(best, v.alpha * y + v.beta * z + v.gamma * c);
    return best;
}

std::string ValidationReport::summary() const {
    if (pass) return "pass";
    std::ostringstream os;
    os << "fail (" << violations.size() << " condition(s)):";
    for (const auto& v : violations) os << "\n  - " << v;
    return os.str();
}

ValidationReport validate_assumptions(const MarketParams& p) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) {
        rep.pass = false;
        rep.violations.push_back(msg);
    };

    // structural invariants
    if (!(p.sigma > 0.0)) fail("sigma > 0");
    if (!(p.lambda > 0.0)) fail("lambda > 0");
    if (!(p.horizon > 0.0)) fail("T > 0");
    if (!(p.eta > -1.0)) fail("eta > -1");
    if (!(p.r_low <= p.r_high)) fail("r_low <= r_high");
    if (!(p.mu1_low <= p.mu1_high)) fail("mu1_low <= mu1_high");
    if (p.jump_cap < 0) fail("k >= 0");
    if (p.jump_cap >= 1 && p.eta == 0.0) fail("eta != 0 when k >= 1");
    if (!(p.s0 > 0.0)) fail("s0 > 0");

    // rate sign conditions tied to the jump direction
    if (p.eta > 0.0 && p.r_low < 0.0) fail("r_low >= 0 for eta > 0");
    if (p.eta < 0.0 && p.r_high > 0.0) fail("r_high <= 0 for eta < 0");

    // intensity bound on the dual domain: (mu2_high - r_low)/eta <= lambda for
    // eta > 0 and (mu2_low - r_high)/eta <= lambda for eta < 0
    const double m2 = p.mu2();
    if (p.eta > 0.0 && (m2 - p.r_low) / p.eta > p.lambda + 1e-12)
        fail("(mu2 - r_low)/eta <= lambda for eta > 0");
    if (p.eta < 0.0 && (m2 - p.r_high) / p.eta > p.lambda + 1e-12)
        fail("(mu2 - r_high)/eta <= lambda for eta < 0");

    if (p.sigma > 0.0 && p.eta != 0.0) {
        const auto set = dual_vertices(p);
        for (const auto& v : set.vertices) {
            if (v.gamma < -p.lambda - 1e-12) {
                fail("gamma >= -lambda over all dual vertices");
                break;
            }
        }

        // sampled jump-monotonicity ratio: (f(.,c) - f(.,c'))/(lambda (c-c')) >= -1
        if (p.lambda > 0.0) {
            std::mt19937_64 rng(20240817u);
            std::uniform_real_distribution<double> u(-5.0, 5.0);
            bool ok = true;
            for (int n = 0; n < 1000 && ok; ++n) {
                const double y = u(rng), z = u(rng);
                double c = u(rng), c2 = u(rng);
                if (c == c2) c2 += 1.0;
                const double fy = generator_eval(y, z, c, JumpRegime::active, p);
                const double fy2 = generator_eval(y, z, c2, JumpRegime::active, p);
                const double ratio = (fy - fy2) / (p.lambda * (c - c2));
                if (ratio < -1.0 - 1e-10) ok = false;
            }
            if (!ok) fail("sampled jump ratio (f(.,c)-f(.,c'))/(lambda(c-c')) >= -1");
        }
    }

    return rep;
}

} // namespace pput
