#pragma once

#include <stdexcept>
#include <string>

#include "broadwell/oracle.hpp"
#include "broadwell/problem.hpp"
#include "broadwell/solver.hpp"

namespace broadwell {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a run needs, parsed from a flat "section.key = value" file.
struct RunConfig {
    ProblemData problem;
    SolverConfig solver;
    FDGrid oracle;
    double oracle_rel_tol = 0.05;
    std::string output_dir = "out";
    int output_nx = 33, output_ny = 33;
    bool output_moments = false;
};

/// Parses and validates a config file. Errors carry "path:line:" anchors;
/// unknown keys are rejected.
RunConfig load_run_config(const std::string& path);

}  // namespace broadwell
