#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <stdexcept>

namespace facetflow {

// An N-by-n gradient matrix (rows = components, cols = space directions).
// The norm used everywhere is the Frobenius norm, which coincides with the
// Euclidean norm of the column-major flattening.
using GradMat = Eigen::MatrixXd;

inline Eigen::VectorXd flatten(const GradMat& xi) {
    return Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size());
}

inline GradMat unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unflatten: size mismatch");
    return Eigen::Map<const GradMat>(v.data(), rows, cols);
}

// User-supplied p-growth density g_p given as a (g, g', g'') triple.
struct GpDensity {
    std::function<double(double)> g;
    std::function<double(double)> g1;  // first derivative
    std::function<double(double)> g2;  // second derivative
};

// Structure constants of the energy density b|xi| + (1/p)|xi|^p and its
// relaxation. gamma/Gamma bound the p-part's ellipticity, beta0 is the
// Hoelder exponent of g_p'', delta the truncation level, epsilon the
// relaxation parameter (0 means the unrelaxed limit maps).
struct ModelParams {
    double b = 1.0;
    double p = 2.0;
    double gamma = 1.0;
    double Gamma = 1.0;
    double beta0 = 1.0;
    double delta = 0.25;
    double epsilon = 0.0;

    std::shared_ptr<const GpDensity> gp_override;  // null = model density 2*sigma^{p/2}/p

    void validate() const;

    // Enforces the joint constraint 0 < epsilon < delta/4 required by every
    // Hessian-based solver/regularity context.
    void require_joint_context() const;

    // Structure constants of the model density: gamma = min{1, p-1},
    // Gamma = max{1, |p-2|/2}.
    static ModelParams model(double b, double p, double delta, double epsilon);
};

inline double model_gamma(double p) { return std::min(1.0, p - 1.0); }
inline double model_Gamma(double p) { return std::max(1.0, std::abs(p - 2.0) / 2.0); }

}  // namespace facetflow
