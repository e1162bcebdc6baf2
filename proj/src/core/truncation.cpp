#include "core/truncation.hpp"

#include <cmath>
#include <string>

namespace facetflow {

GradMat truncate(const GradMat& xi, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("truncate: delta must be > 0");
    const double t = xi.norm();
    if (t <= delta) return GradMat::Zero(xi.rows(), xi.cols());
    return ((t - delta) / t) * xi;
}

GradMat truncate_relaxed(const GradMat& xi, double delta, double epsilon) {
    if (!(delta > 0.0)) throw std::invalid_argument("truncate_relaxed: delta must be > 0");
    if (!(epsilon >= 0.0 && epsilon < delta))
        throw std::invalid_argument("truncate_relaxed: requires 0 <= epsilon < delta");
    const double t = xi.norm();
    if (t == 0.0) return GradMat::Zero(xi.rows(), xi.cols());
    const double v = std::sqrt(epsilon * epsilon + t * t);
    if (v <= delta) return GradMat::Zero(xi.rows(), xi.cols());
    return ((v - delta) / t) * xi;
}

GradMat gp_eps_map(const GradMat& xi, const ModelParams& mp) {
    const double sigma = mp.epsilon * mp.epsilon + xi.squaredNorm();
    if (sigma == 0.0) return GradMat::Zero(xi.rows(), xi.cols());
    return std::pow(sigma, (mp.p - 1.0) / 2.0) * xi;
}

namespace {

// phi(s) = s (eps^2 + s^2)^{(p-1)/2}, strictly increasing on [0, inf).
double radial_forward(double s, double p, double eps) {
    return s * std::pow(eps * eps + s * s, (p - 1.0) / 2.0);
}

double radial_inverse(double r, double p, double eps) {
    if (r == 0.0) return 0.0;
    // phi(s) >= s^p, so the root lies in [0, r^{1/p}]; also phi(s) >= s eps^{p-1}.
    double hi = std::pow(r, 1.0 / p);
    if (eps > 0.0 && p > 1.0) hi = std::min(hi, r / std::pow(eps, p - 1.0));
    hi = std::max(hi, 1e-300);
    while (radial_forward(hi, p, eps) < r) hi *= 2.0;
    double lo = 0.0;
    double s = hi;
    for (int it = 0; it < 200; ++it) {
        const double val = radial_forward(s, p, eps) - r;
        if (val > 0.0)
            hi = s;
        else
            lo = s;
        const double sig = eps * eps + s * s;
        const double dphi = std::pow(sig, (p - 1.0) / 2.0) * (1.0 + (p - 1.0) * s * s / sig);
        double next = s - val / dphi;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        if (std::abs(next - s) <= 1e-12 * std::max(next, s)) return next;
        s = next;
    }
    throw std::runtime_error("gp_eps_inverse: radial solve did not converge in 200 iterations");
}

}  // namespace

GradMat gp_eps_inverse(const GradMat& y, const ModelParams& mp) {
    const double r = y.norm();
    if (r == 0.0) return GradMat::Zero(y.rows(), y.cols());
    const double s = radial_inverse(r, mp.p, mp.epsilon);
    return (s / r) * y;
}

bool subdifferential_contains(const GradMat& xi0, const GradMat& zeta) {
    const double t = xi0.norm();
    if (t == 0.0) return zeta.norm() <= 1.0;
    return (zeta - xi0 / t).norm() <= 1e-12;
}

}  // namespace facetflow
