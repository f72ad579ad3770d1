#pragma once

#include "periflow/diagnostics.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace periflow {

// Problem description as read from a JSON config file. All lengths are in
// units of the obstacle radius; `radius` sets the physical scale.
struct ProblemConfig {
    Complex omega1{4.0, 0.0};
    Complex omega2{0.0, 4.0};
    double radius = 1.0;
    double mean_speed = 1.0;
    int count = 64;
    double placement_ratio = 0.7;
    std::int64_t mc_samples = 1'000'000;
    std::uint64_t seed = 0;
    QuadratureInfo::Mode quadrature = QuadratureInfo::Mode::monte_carlo;
    std::optional<Complex> z0;  // anchor point, units of r; default obstacle center
    int grid_na = 1000;         // grid quadrature resolution
    int grid_nb = 1000;
};

// Parses and validates a config file. Unknown keys, malformed values, and
// parameter combinations that violate module preconditions (degenerate basis,
// overlapping obstacles, placement ratio out of (0,1), ...) raise ConfigError
// with a message naming the offending key.
ProblemConfig load_config(const std::string& path);

ProblemConfig parse_config_json(const std::string& text);

// The resolved configuration (defaults filled in) as a canonical JSON string,
// embedded into every output artifact.
std::string config_to_json(const ProblemConfig& config);

// Everything a solve produces, bundled for the CLI commands and diagnostics.
struct SolvedProblem {
    FlowModel model;
    SampleSet samples;
    double epsilon = 0.0;
};

// Builds lattice/region/charges from the config, runs the quadrature and the
// collocation solve, and measures the boundary defect.
SolvedProblem solve_problem(const ProblemConfig& config);

} // namespace periflow
