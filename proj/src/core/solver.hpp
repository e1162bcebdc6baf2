#pragma once

#include "core/field.hpp"

#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace facetflow {

struct ToleranceSpec {
    double residual = 1e-10;        // max nodal-volume-scaled weak residual
    int max_iters = 500;
    double energy_decrease = 1e-14; // secondary stagnation criterion, relative
    double cg_rel_tol = 1e-12;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
};

struct SolveReport {
    std::vector<double> energy_trace;  // F_eps after each accepted step (front = initial)
    double residual_norm = 0.0;
    int newton_iters = 0;
    int linesearch_backtracks = 0;
    bool converged = false;
    ModelParams params;
    std::string error;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, SolveReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    SolveReport report;
};

class SingularLinearSolve : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// F_eps(u) = sum_T area * E_eps(Du|_T) - sum_v lumped_v <f_v, u_v>.
double assemble_energy(const DiscreteField& field, const Eigen::MatrixXd& f, const ModelParams& mp);

// Nodal gradient of the discrete energy; boundary rows are zeroed.
Eigen::VectorXd assemble_gradient(const DiscreteField& field, const Eigen::MatrixXd& f,
                                  const ModelParams& mp);

// Max over interior vertices of the gradient scaled by nodal volume; this is
// the discrete weak-form residual the stopping test uses.
double weak_residual(const DiscreteField& field, const Eigen::MatrixXd& f, const ModelParams& mp);

// Damped Newton on the B_eps-assembled stiffness with Armijo backtracking
// and a gradient-descent fallback. Requires epsilon > 0 (strict convexity).
std::pair<DiscreteField, SolveReport> minimize(const DiscreteField& initial,
                                               const Eigen::MatrixXd& f, const ModelParams& mp,
                                               const ToleranceSpec& tol = {});

struct LadderLevel {
    double epsilon = 0.0;
    SolveReport report;
    bool solved = false;
    std::string error;
    // Differences against the previous solved level (NaN on the first).
    double ddu_lp = std::numeric_limits<double>::quiet_NaN();
    double dg_sup = std::numeric_limits<double>::quiet_NaN();
};

struct LadderReport {
    double delta = 0.0;
    std::vector<LadderLevel> levels;
};

// Solves for each epsilon with warm starts, recording the discrete
// L^p differences of Du and the sup-differences of G_{2delta,eps}(Du_eps)
// between consecutive levels. Solver failures are recorded per level and the
// ladder continues.
std::pair<std::vector<DiscreteField>, LadderReport> solve_ladder(
    const DiscreteField& initial, const Eigen::MatrixXd& f, const ModelParams& params_base,
    const std::vector<double>& epsilons, double delta, const ToleranceSpec& tol = {});

}  // namespace facetflow
