#include "core/types.hpp"

#include <cmath>
#include <string>

namespace facetflow {

void ModelParams::validate() const {
    if (!(b >= 0.0)) throw std::invalid_argument("ModelParams: b must be >= 0");
    if (!(p > 1.0)) throw std::invalid_argument("ModelParams: p must be > 1");
    if (!(gamma > 0.0 && gamma <= Gamma))
        throw std::invalid_argument("ModelParams: need 0 < gamma <= Gamma");
    if (!(beta0 > 0.0 && beta0 <= 1.0))
        throw std::invalid_argument("ModelParams: beta0 must be in (0,1]");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("ModelParams: delta must be in (0,1)");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("ModelParams: epsilon must be >= 0");
}

void ModelParams::require_joint_context() const {
    validate();
    if (!(epsilon > 0.0 && epsilon < delta / 4.0))
        throw std::invalid_argument("ModelParams: joint context requires 0 < epsilon < delta/4, got epsilon=" +
                                    std::to_string(epsilon) + " delta=" + std::to_string(delta));
}

ModelParams ModelParams::model(double b, double p, double delta, double epsilon) {
    ModelParams mp;
    mp.b = b;
    mp.p = p;
    mp.gamma = model_gamma(p);
    mp.Gamma = model_Gamma(p);
    mp.beta0 = 1.0;
    mp.delta = delta;
    mp.epsilon = epsilon;
    mp.validate();
    return mp;
}

}  // namespace facetflow
