#ifndef RADOPT_CONFIG_HPP
#define RADOPT_CONFIG_HPP

#include "radopt/optimizer.hpp"
#include "radopt/solver.hpp"

#include <string>

namespace radopt {

// Parsed scenario file plus tool-level settings. Scenario files are JSON with
// fixed sections; unknown keys are rejected so typos fail loudly.
struct LoadedConfig {
    Grid grid;
    DiffusionModel diffusion;
    VelocityField velocity;
    ReactionModel reaction;
    SolverConfig solver;
    double mass_m = 0.0;
    OptConfig opt;
    std::string output_dir = "out";
    int snapshots = 0;
    std::string config_hash; // fnv1a-64 of the canonical form, for report stamps
};

LoadedConfig load_config(const std::string& path);
LoadedConfig parse_config_text(const std::string& text); // exposed for tests

Scenario scenario_from_config(const LoadedConfig& cfg);

std::string fnv1a_hex(const std::string& data);

} // namespace radopt

#endif
