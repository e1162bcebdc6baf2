#pragma once

#include "core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace facetflow {

struct SweepConfig {
    std::uint64_t seed = 42;
    std::int64_t samples = 100000;  // per (inequality, dims, params) combination
    std::vector<std::pair<int, int>> dims = {{1, 2}, {2, 2}, {3, 3}};
    std::vector<ModelParams> param_grid;  // empty = default_param_grid()
    std::pair<double, double> radius_range = {1e-4, 1e4};
    int workers = 0;  // 0 = hardware concurrency (capped by FACETFLOW_THREADS)

    void validate() const;
    static std::vector<ModelParams> default_param_grid();
};

// A replayable sample: the flattened matrices plus the indices selecting the
// parameter set and dimensions it was drawn for.
struct Witness {
    int param_index = 0;
    int dim_index = 0;
    int rows = 0, cols = 0;
    std::vector<double> xi0;
    std::vector<double> xi1;  // empty for single-point inequalities
    double aux = 0.0;         // mu for hessian_error, sigma pair for g1 bounds
    double aux2 = 0.0;
    double lhs = 0.0, rhs = 0.0;
    double margin = 0.0;
};

struct InequalityResult {
    std::string id;
    std::int64_t checked = 0;
    std::int64_t violations = 0;
    std::int64_t skipped = 0;  // degenerate-denominator samples
    double worst_margin = std::numeric_limits<double>::infinity();
    double empirical_constant = 0.0;
    std::vector<Witness> witnesses;  // violation witnesses (capped) + worst-margin sample
};

struct SweepReport {
    SweepConfig config;
    std::vector<InequalityResult> results;
    bool pass() const;
    std::int64_t total_violations() const;
};

// Inequality identifiers accepted by run_sweep / calibrate_constant.
// "selftest_violation" is intentionally false and exists so the witness
// machinery itself can be exercised.
const std::vector<std::string>& known_inequalities();
bool is_known_inequality(const std::string& id);

// Relative slack absorbed before a sample counts as a violation.
inline constexpr double kSweepSlack = 1e-9;

SweepReport run_sweep(const SweepConfig& config, const std::vector<std::string>& suite);

// The Appendix bounds on g1: |g1'| <= b sigma^{-1/2}, |g1''| <= (b/2) sigma^{-3/2},
// and the Lipschitz bound |g1''(s1)-g1''(s2)| <= 24 b mu^-5 |s1-s2| on [mu^2/4, 7 mu^2].
SweepReport check_g1_bounds(const SweepConfig& config);

// Empirical supremum of the inequality's LHS/RHS-shape ratio; deterministic
// given the seed. Degenerate-denominator samples are skipped and counted.
double calibrate_constant(const std::string& inequality_id, const SweepConfig& config,
                          std::int64_t* skipped = nullptr);

// Recomputes the margin of a stored witness through the same evaluation path.
double replay_witness(const std::string& inequality_id, const Witness& w, const SweepConfig& config);

}  // namespace facetflow
