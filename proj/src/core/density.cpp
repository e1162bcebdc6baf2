#include "core/density.hpp"

#include <cmath>

namespace facetflow {

namespace {

double g1_raw(double sigma, int order, double b) {
    switch (order) {
        case 0: return 2.0 * b * std::sqrt(sigma);
        case 1: return b / std::sqrt(sigma);
        case 2: return -0.5 * b / (sigma * std::sqrt(sigma));
        default: throw std::invalid_argument("eval_g: order must be 0, 1 or 2");
    }
}

double gp_raw(double sigma, int order, const ModelParams& mp) {
    if (mp.gp_override) {
        const auto& d = *mp.gp_override;
        switch (order) {
            case 0: return d.g(sigma);
            case 1: return d.g1(sigma);
            case 2: return d.g2(sigma);
            default: throw std::invalid_argument("eval_g: order must be 0, 1 or 2");
        }
    }
    const double e = mp.p / 2.0;
    switch (order) {
        case 0: return 2.0 * std::pow(sigma, e) / mp.p;
        case 1: return std::pow(sigma, e - 1.0);
        case 2: return (e - 1.0) * std::pow(sigma, e - 2.0);
        default: throw std::invalid_argument("eval_g: order must be 0, 1 or 2");
    }
}

}  // namespace

double eval_g(double sigma, GBranch which, int order, const ModelParams& mp) {
    if (!(sigma >= 0.0)) throw std::domain_error("eval_g: sigma must be >= 0");
    const bool relaxed = (which == GBranch::g1_eps || which == GBranch::gp_eps || which == GBranch::g_eps);
    const double shift = relaxed ? mp.epsilon * mp.epsilon : 0.0;
    if (order >= 1 && sigma + shift == 0.0)
        throw std::domain_error("eval_g: derivative at sigma=0 requires epsilon > 0");
    const double s = sigma + shift;
    switch (which) {
        case GBranch::g1:
        case GBranch::g1_eps: return g1_raw(s, order, mp.b);
        case GBranch::gp:
        case GBranch::gp_eps: return gp_raw(s, order, mp);
        case GBranch::g_eps: return g1_raw(s, order, mp.b) + gp_raw(s, order, mp);
    }
    throw std::invalid_argument("eval_g: unknown branch");
}

double energy_density(const GradMat& xi, const ModelParams& mp) {
    return 0.5 * eval_g(xi.squaredNorm(), GBranch::g_eps, 0, mp);
}

GradMat flux_part(const GradMat& xi, const ModelParams& mp, HessPart part) {
    const double sigma = xi.squaredNorm();
    if (mp.epsilon == 0.0 && sigma == 0.0) return GradMat::Zero(xi.rows(), xi.cols());
    double w = 0.0;
    if (part != HessPart::p) w += eval_g(sigma, GBranch::g1_eps, 1, mp);
    if (part != HessPart::one) w += eval_g(sigma, GBranch::gp_eps, 1, mp);
    return w * xi;
}

GradMat flux(const GradMat& xi, const ModelParams& mp) { return flux_part(xi, mp, HessPart::full); }

namespace {

// First and second derivative of the selected branch at eps^2 + |xi|^2.
void branch_derivs(double sigma, const ModelParams& mp, HessPart part, double& d1, double& d2) {
    d1 = 0.0;
    d2 = 0.0;
    if (part != HessPart::p) {
        d1 += eval_g(sigma, GBranch::g1_eps, 1, mp);
        d2 += eval_g(sigma, GBranch::g1_eps, 2, mp);
    }
    if (part != HessPart::one) {
        d1 += eval_g(sigma, GBranch::gp_eps, 1, mp);
        d2 += eval_g(sigma, GBranch::gp_eps, 2, mp);
    }
}

}  // namespace

Eigen::MatrixXd hessian(const GradMat& xi, const ModelParams& mp, HessPart part) {
    const double sigma = xi.squaredNorm();
    if (mp.epsilon == 0.0 && sigma == 0.0)
        throw std::domain_error("hessian: undefined at xi=0 with epsilon=0");
    double d1, d2;
    branch_derivs(sigma, mp, part, d1, d2);
    const Eigen::VectorXd v = flatten(xi);
    const Eigen::Index k = v.size();
    Eigen::MatrixXd B = d1 * Eigen::MatrixXd::Identity(k, k);
    B.noalias() += 2.0 * d2 * v * v.transpose();
    return B;
}

RadialEigs hessian_eigs(const GradMat& xi, const ModelParams& mp, HessPart part) {
    const double sigma = xi.squaredNorm();
    if (mp.epsilon == 0.0 && sigma == 0.0)
        throw std::domain_error("hessian_eigs: undefined at xi=0 with epsilon=0");
    double d1, d2;
    branch_derivs(sigma, mp, part, d1, d2);
    return RadialEigs{d1, d1 + 2.0 * sigma * d2};
}

Eigen::MatrixXd coefficient_matrix(const GradMat& Du, const ModelParams& mp) {
    if (!(mp.epsilon > 0.0)) throw std::invalid_argument("coefficient_matrix: requires epsilon > 0");
    const double sigma = Du.squaredNorm();
    const double d1 = eval_g(sigma, GBranch::g_eps, 1, mp);
    const double d2 = eval_g(sigma, GBranch::g_eps, 2, mp);
    const Eigen::Index n = Du.cols();
    Eigen::MatrixXd C = d1 * Eigen::MatrixXd::Identity(n, n);
    C.noalias() += 2.0 * d2 * Du.transpose() * Du;  // sum_i grad(u^i) (x) grad(u^i)
    return C;
}

double ellipticity_ratio(const GradMat& xi, const ModelParams& mp) {
    const RadialEigs eig = hessian_eigs(xi, mp, HessPart::full);
    const double lo = eig.min();
    const double hi = eig.max();
    if (!(lo > 0.0) || lo <= 1e-15 * hi)
        throw std::domain_error("ellipticity_ratio: Hessian not positive definite");
    return hi / lo;
}

double ellipticity_ratio_bound(double delta, const ModelParams& mp) {
    return (1.0 + mp.b * std::pow(delta, 1.0 - mp.p)) / (mp.p - 1.0);
}

}  // namespace facetflow
