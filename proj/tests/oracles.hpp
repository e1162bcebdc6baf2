#pragma once

// Independent oracles used by the test and acceptance suites. Everything in
// here recomputes quantities through a different route than the library
// (finite differences, dense eigensolvers, 1-D quadrature) so the two sides
// stay honest.

#include "core/density.hpp"
#include "core/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>

namespace oracles {

using facetflow::GradMat;
using facetflow::ModelParams;

// Central-difference gradient of a scalar function of an N-by-n matrix.
inline GradMat fd_gradient(const std::function<double(const GradMat&)>& fn, const GradMat& xi,
                           double step) {
    GradMat g(xi.rows(), xi.cols());
    for (Eigen::Index j = 0; j < xi.cols(); ++j)
        for (Eigen::Index i = 0; i < xi.rows(); ++i) {
            GradMat hi = xi, lo = xi;
            hi(i, j) += step;
            lo(i, j) -= step;
            g(i, j) = (fn(hi) - fn(lo)) / (2.0 * step);
        }
    return g;
}

// Central-difference Jacobian of a matrix-valued map, as an (Nn)x(Nn) matrix
// in the column-major flattening.
inline Eigen::MatrixXd fd_jacobian(const std::function<GradMat(const GradMat&)>& fn,
                                   const GradMat& xi, double step) {
    const Eigen::Index k = xi.size();
    Eigen::MatrixXd J(k, k);
    for (Eigen::Index col = 0; col < k; ++col) {
        GradMat hi = xi, lo = xi;
        hi.data()[col] += step;
        lo.data()[col] -= step;
        J.col(col) = facetflow::flatten(fn(hi) - fn(lo)) / (2.0 * step);
    }
    return J;
}

inline double fd_step(const GradMat& xi, double epsilon) {
    return 1e-5 * std::max({xi.norm(), epsilon, 1e-6});
}

inline Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    return es.eigenvalues();
}

// Radial profile of the regularized scalar pipe-flow problem on the unit
// disk with constant load: |u'(r)| solves w (1 + b/sqrt(eps^2+w^2)) = f r/2,
// and u(r) = int_r^1 w. For eps = 0 the classical plug profile with
// r0 = 2b/f and center velocity f (1-r0)^2 / 4 is recovered.
class BinghamRadialOracle {
public:
    BinghamRadialOracle(double b, double f, double eps) : b_(b), f_(f), eps_(eps) {}

    double gradient_magnitude(double r) const {
        const double rhs = f_ * r / 2.0;
        if (rhs == 0.0) return 0.0;
        if (eps_ == 0.0) return std::max(rhs - b_, 0.0);
        double lo = 0.0, hi = rhs;
        double w = 0.5 * rhs;
        for (int it = 0; it < 200; ++it) {
            const double v = std::sqrt(eps_ * eps_ + w * w);
            const double val = w * (1.0 + b_ / v) - rhs;
            if (val > 0.0)
                hi = w;
            else
                lo = w;
            const double dv = 1.0 + b_ * eps_ * eps_ / (v * v * v);
            double next = w - val / dv;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - w) <= 1e-14 * std::max(1e-30, next)) return next;
            w = next;
        }
        return w;
    }

    // u(r) by adaptive Simpson quadrature of the gradient magnitude.
    double velocity(double r) const { return integrate(r, 1.0, 1e-12); }

    double center_velocity() const { return velocity(0.0); }

    double plug_radius_exact() const { return 2.0 * b_ / f_; }
    double center_velocity_exact() const {
        const double r0 = plug_radius_exact();
        return f_ * (1.0 - r0) * (1.0 - r0) / 4.0;
    }

    // radius at which |u'| crosses the given threshold (bisection)
    double radius_at_gradient(double threshold) const {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (gradient_magnitude(mid) < threshold)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    double simpson(double a, double b) const {
        const double c = 0.5 * (a + b);
        return (b - a) / 6.0 *
               (gradient_magnitude(a) + 4.0 * gradient_magnitude(c) + gradient_magnitude(b));
    }
    double adaptive(double a, double b, double whole, double tol, int depth) const {
        const double c = 0.5 * (a + b);
        const double left = simpson(a, c), right = simpson(c, b);
        if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return adaptive(a, c, left, tol / 2.0, depth + 1) +
               adaptive(c, b, right, tol / 2.0, depth + 1);
    }
    double integrate(double a, double b, double tol) const {
        if (a >= b) return 0.0;
        return adaptive(a, b, simpson(a, b), tol, 0);
    }

    double b_, f_, eps_;
};

}  // namespace oracles
