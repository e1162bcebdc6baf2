#pragma once

#include "core/types.hpp"

namespace facetflow {

// G_delta(xi) = (|xi| - delta)_+ xi/|xi|, with G_delta(0) = 0.
GradMat truncate(const GradMat& xi, double delta);

// G_{delta,eps}(xi) = (sqrt(eps^2 + |xi|^2) - delta)_+ xi/|xi|.
// Requires 0 <= eps < delta; satisfies |G_{delta,eps} - G_delta| <= eps.
GradMat truncate_relaxed(const GradMat& xi, double delta, double epsilon);

// G_{p,eps}(xi) = (eps^2 + |xi|^2)^{(p-1)/2} xi and its inverse. The inverse
// reduces to one strictly increasing radial equation, solved by safeguarded
// Newton/bisection to 1e-12 relative tolerance.
GradMat gp_eps_map(const GradMat& xi, const ModelParams& mp);
GradMat gp_eps_inverse(const GradMat& y, const ModelParams& mp);

// Membership test for the subdifferential of the Frobenius norm at xi0:
// the closed unit ball at xi0 = 0, the singleton {xi0/|xi0|} otherwise
// (matched to 1e-12).
bool subdifferential_contains(const GradMat& xi0, const GradMat& zeta);

}  // namespace facetflow
