#pragma once

#include "core/types.hpp"

namespace facetflow {

// Scalar branches of the density algebra. g1(s) = 2b*sqrt(s) is the
// one-Laplacian part, gp the p-growth part (model: 2*s^{p/2}/p), and the
// *_eps branches shift the argument by epsilon^2. g_eps = g1_eps + gp_eps.
enum class GBranch { g1, gp, g1_eps, gp_eps, g_eps };

enum class HessPart { one, p, full };

// g(sigma), g'(sigma) or g''(sigma) for the selected branch.
// Throws std::domain_error for derivatives at sigma=0 without relaxation.
double eval_g(double sigma, GBranch which, int order, const ModelParams& mp);

// E_eps(xi) = (1/2) g_eps(|xi|^2); epsilon = 0 gives b|xi| + gp-part.
double energy_density(const GradMat& xi, const ModelParams& mp);

// A_eps(xi) = g_eps'(|xi|^2) xi, with the continuous extension A_0(0) = 0.
GradMat flux(const GradMat& xi, const ModelParams& mp);
GradMat flux_part(const GradMat& xi, const ModelParams& mp, HessPart part);

// B_eps(xi) = g_eps'(|xi|^2) id + 2 g_eps''(|xi|^2) xi (x) xi, as an
// (Nn)x(Nn) symmetric matrix in the column-major flattening.
// Throws std::domain_error at (epsilon=0, xi=0).
Eigen::MatrixXd hessian(const GradMat& xi, const ModelParams& mp, HessPart part = HessPart::full);

// Radial spectrum of B_{s,eps}(xi): lambda1 = g_s'(eps^2+|xi|^2) with
// multiplicity Nn-1, lambda2 = lambda1 + 2|xi|^2 g_s''(eps^2+|xi|^2) on
// span(xi). Exact; no general eigensolver involved.
struct RadialEigs {
    double tangential;  // multiplicity Nn-1
    double radial;      // on span(xi); equals tangential when xi = 0
    double min() const { return std::min(tangential, radial); }
    double max() const { return std::max(tangential, radial); }
};
RadialEigs hessian_eigs(const GradMat& xi, const ModelParams& mp, HessPart part = HessPart::full);

// n-by-n coefficient matrix C_eps(Du) = g_eps' id_n + 2 g_eps'' Du^T Du.
// Requires epsilon > 0.
Eigen::MatrixXd coefficient_matrix(const GradMat& Du, const ModelParams& mp);

// lambda_max/lambda_min of B_eps(xi). Throws std::domain_error when the
// smallest eigenvalue is not positive.
double ellipticity_ratio(const GradMat& xi, const ModelParams& mp);

// The bound R(delta) = (1 + b delta^{1-p})/(p-1) valid for |xi| > delta.
double ellipticity_ratio_bound(double delta, const ModelParams& mp);

}  // namespace facetflow
