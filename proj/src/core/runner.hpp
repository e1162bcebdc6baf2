#pragma once

#include "core/json_io.hpp"

#include <optional>

namespace facetflow {

// Exit codes shared by the C API and the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitViolations = 2,
    kExitNonConvergence = 3,
};

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<bool> deterministic;
};

// Problem description expanded from a config's solve/ladder section
// (possibly via a named preset).
struct ProblemSetup {
    ModelParams params;
    MeshSpec mesh_spec;
    int components = 1;
    json load;      // {"kind":"constant"|"gaussian"|"csv", ...}
    json boundary;  // {"kind":"zero"|"linear", ...}
    ToleranceSpec tolerance;
    std::string preset;
};

ProblemSetup expand_problem(const json& section, const json& root);
Eigen::MatrixXd build_load(const ProblemSetup& setup, const Mesh& mesh);
DiscreteField build_initial_field(const ProblemSetup& setup, std::shared_ptr<const Mesh> mesh);

// verify: exit 0 when every suite passes, 2 on violations, 1 on config
// errors; the sweep report is written beside the config (or into --out).
int cmd_verify(const std::string& config_path, const RunOverrides& ov = {});

// solve/ladder: write manifest + mesh/field CSVs + reports into a run
// directory. Solver non-convergence maps to exit 3 with the report written.
int cmd_solve(const std::string& config_path, const RunOverrides& ov = {});
int cmd_ladder(const std::string& config_path, const RunOverrides& ov = {});

// regularity: post-processes a prior solve/ladder run directory.
int cmd_regularity(const std::string& run_dir, const RunOverrides& ov = {});

// Shared by cmd_solve and tests: runs the solve and writes the run dir.
// Returns the exit code.
int run_solve_into(const json& config, const std::filesystem::path& dir, const RunOverrides& ov);

}  // namespace facetflow
