#include "pput/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pput {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not a number");
    }
}

long parse_integer(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not an integer");
    }
}

std::uint64_t parse_u64(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": '" + v +
                          "' is not an unsigned integer");
    }
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("line " + std::to_string(line) + ": empty list entry");
        out.push_back(parse_number(item, line));
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": empty list");
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

const char* tool_version() { return "pput 0.1.0"; }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool saw_sigma = false, saw_eta = false, saw_r_low = false, saw_r_high = false,
         saw_lambda = false, saw_k = false, saw_T = false;
    bool saw_mu1_low = false, saw_mu1_high = false, saw_s_max = false, saw_drift = false;

    std::istringstream is(text);
    std::string raw;
    std::string section = "market"; // sectionless keys default to [market]
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "market" && section != "grid" && section != "sim" &&
                section != "tolerances" && section != "sweep" && section != "output" &&
                section != "run")
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" +
                                  section + "]");
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");

        if (section == "run") continue; // informational echo in metadata; carries no state

        auto unknown = [&]() -> ConfigError {
            return ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                               "' in section [" + section + "]");
        };

        if (section == "market") {
            if (key == "sigma") { cfg.market.sigma = parse_number(value, line); saw_sigma = true; }
            else if (key == "eta") { cfg.market.eta = parse_number(value, line); saw_eta = true; }
            else if (key == "r_low") { cfg.market.r_low = parse_number(value, line); saw_r_low = true; }
            else if (key == "r_high") { cfg.market.r_high = parse_number(value, line); saw_r_high = true; }
            else if (key == "mu1_low") { cfg.market.mu1_low = parse_number(value, line); saw_mu1_low = true; }
            else if (key == "mu1_high") { cfg.market.mu1_high = parse_number(value, line); saw_mu1_high = true; }
            else if (key == "lambda") { cfg.market.lambda = parse_number(value, line); saw_lambda = true; }
            else if (key == "k") { cfg.market.jump_cap = static_cast<int>(parse_integer(value, line)); saw_k = true; }
            else if (key == "T") { cfg.market.horizon = parse_number(value, line); saw_T = true; }
            else if (key == "s0") cfg.market.s0 = parse_number(value, line);
            else throw unknown();
        } else if (section == "grid") {
            if (key == "s_max") { cfg.grid.s_max = parse_number(value, line); saw_s_max = true; }
            else if (key == "ns") cfg.grid.ns = static_cast<int>(parse_integer(value, line));
            else if (key == "nt") cfg.grid.nt = static_cast<int>(parse_integer(value, line));
            else throw unknown();
        } else if (section == "sim") {
            if (key == "n_paths") cfg.sim.n_paths = parse_integer(value, line);
            else if (key == "seed") cfg.sim.seed = parse_u64(value, line);
            else if (key == "dt_sim") cfg.sim.dt_sim = parse_number(value, line);
            else if (key == "drift") { cfg.sim.drift = parse_number(value, line); saw_drift = true; }
            else if (key == "arrivals") {
                if (value == "physical") cfg.sim.arrivals = ArrivalModel::physical;
                else if (value == "pricing") cfg.sim.arrivals = ArrivalModel::pricing;
                else throw ConfigError("line " + std::to_string(line) +
                                       ": arrivals must be 'physical' or 'pricing'");
            } else throw unknown();
        } else if (section == "tolerances") {
            if (key == "policy") cfg.tolerances.policy = parse_number(value, line);
            else if (key == "boundary") cfg.tolerances.boundary = parse_number(value, line);
            else throw unknown();
        } else if (section == "sweep") {
            if (key == "lambda") cfg.sweep_lambdas = parse_list(value, line);
            else throw unknown();
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = value;
            else throw unknown();
        }
    }

    // required market keys
    std::vector<std::string> problems;
    if (!saw_sigma) problems.push_back("missing market key: sigma");
    if (!saw_eta) problems.push_back("missing market key: eta");
    if (!saw_r_low) problems.push_back("missing market key: r_low");
    if (!saw_r_high) problems.push_back("missing market key: r_high");
    if (!saw_lambda) problems.push_back("missing market key: lambda");
    if (!saw_k) problems.push_back("missing market key: k");
    if (!saw_T) problems.push_back("missing market key: T");
    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }

    // documented defaults
    if (!saw_mu1_low) cfg.market.mu1_low = cfg.market.r_low;
    if (!saw_mu1_high) cfg.market.mu1_high = cfg.market.r_high;
    if (!saw_s_max) cfg.grid.s_max = 4.0 * cfg.market.max_strike();
    if (!saw_drift) cfg.sim.drift = cfg.market.r_low;

    // structural validation: collect every violation
    const MarketParams& m = cfg.market;
    if (!(m.sigma > 0.0)) problems.push_back("sigma > 0 violated");
    if (!(m.eta > -1.0)) problems.push_back("eta > -1 violated");
    if (!(m.lambda >= 0.0)) problems.push_back("lambda >= 0 violated");
    if (!(m.horizon > 0.0)) problems.push_back("T > 0 violated");
    if (!(m.s0 > 0.0)) problems.push_back("s0 > 0 violated");
    if (m.jump_cap < 0) problems.push_back("k >= 0 violated");
    if (m.jump_cap >= 1 && m.eta == 0.0) problems.push_back("eta != 0 required when k >= 1");
    if (!(m.r_low <= m.r_high)) problems.push_back("r_low <= r_high violated");
    if (!(m.mu1_low <= m.mu1_high)) problems.push_back("mu1_low <= mu1_high violated");
    if (cfg.grid.ns < 16) problems.push_back("grid.ns >= 16 violated");
    if (cfg.grid.nt < 16) problems.push_back("grid.nt >= 16 violated");
    if (m.eta > -1.0 && !(cfg.grid.s_max > m.max_strike()))
        problems.push_back("grid.s_max must exceed the largest strike");
    if (cfg.sim.n_paths < 1) problems.push_back("sim.n_paths >= 1 violated");
    if (!(cfg.sim.dt_sim > 0.0 && cfg.sim.dt_sim <= m.horizon))
        problems.push_back("0 < sim.dt_sim <= T violated");
    if (!(cfg.tolerances.policy > 0.0)) problems.push_back("tolerances.policy > 0 violated");
    for (double l : cfg.sweep_lambdas)
        if (!(l >= 0.0)) problems.push_back("sweep lambdas must be nonnegative");

    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[market]\n";
    os << "sigma = " << fmt(cfg.market.sigma) << "\n";
    os << "eta = " << fmt(cfg.market.eta) << "\n";
    os << "r_low = " << fmt(cfg.market.r_low) << "\n";
    os << "r_high = " << fmt(cfg.market.r_high) << "\n";
    os << "mu1_low = " << fmt(cfg.market.mu1_low) << "\n";
    os << "mu1_high = " << fmt(cfg.market.mu1_high) << "\n";
    os << "lambda = " << fmt(cfg.market.lambda) << "\n";
    os << "k = " << cfg.market.jump_cap << "\n";
    os << "T = " << fmt(cfg.market.horizon) << "\n";
    os << "s0 = " << fmt(cfg.market.s0) << "\n";
    os << "\n[grid]\n";
    os << "s_max = " << fmt(cfg.grid.s_max) << "\n";
    os << "ns = " << cfg.grid.ns << "\n";
    os << "nt = " << cfg.grid.nt << "\n";
    os << "\n[sim]\n";
    os << "n_paths = " << cfg.sim.n_paths << "\n";
    os << "seed = " << cfg.sim.seed << "\n";
    os << "dt_sim = " << fmt(cfg.sim.dt_sim) << "\n";
    os << "drift = " << fmt(cfg.sim.drift) << "\n";
    os << "arrivals = " << (cfg.sim.arrivals == ArrivalModel::physical ? "physical" : "pricing")
       << "\n";
    os << "\n[tolerances]\n";
    os << "policy = " << fmt(cfg.tolerances.policy) << "\n";
    os << "boundary = " << fmt(cfg.tolerances.boundary) << "\n";
    if (!cfg.sweep_lambdas.empty()) {
        os << "\n[sweep]\n";
        os << "lambda = ";
        for (size_t i = 0; i < cfg.sweep_lambdas.size(); ++i)
            os << (i ? ", " : "") << fmt(cfg.sweep_lambdas[i]);
        os << "\n";
    }
    os << "\n[output]\n";
    os << "dir = " << cfg.output_dir << "\n";
    return os.str();
}

} // namespace pput
