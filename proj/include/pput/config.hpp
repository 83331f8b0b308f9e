#pragma once

#include "pput/grid.hpp"
#include "pput/market.hpp"
#include "pput/simulate.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pput {

struct Tolerances {
    double policy = 1e-10;
    double boundary = 0.0; // <= 0 means the default 1e-6 * max strike
};

/// Fully resolved run configuration. Parsed from a sectioned key = value
/// document; see docs in README for the schema and defaults.
struct RunConfig {
    MarketParams market;
    GridSpec grid;
    SimConfig sim;
    Tolerances tolerances;
    std::vector<double> sweep_lambdas;
    std::string output_dir = "out";
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parses a config document. Unknown sections or keys are errors with line
/// numbers; all violated invariants are reported together.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Canonical full-precision rendering; parse_config(serialize_config(c))
/// reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

const char* tool_version();

} // namespace pput
