#pragma once

#include "core/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facetflow {

class EmptyBall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-element V_eps = sqrt(eps^2 + |Du|^2) and U_{delta,eps} = (V_eps - delta)_+^2.
std::vector<double> v_eps_field(const DiscreteField& field, const ModelParams& mp);
std::vector<double> u_delta_eps_field(const DiscreteField& field, const ModelParams& mp);

// Triangles with |Du| <= threshold; fraction is flagged area / total area.
std::vector<char> facet_mask(const DiscreteField& field, double threshold, double* fraction = nullptr);

// Area fraction of {V_eps - delta > (1-nu) mu} among triangles whose
// centroid lies in B_rho(x0). Throws EmptyBall when no centroid does.
double superlevel_measure(const DiscreteField& field, const Vec2& x0, double rho, double mu,
                          double nu, const ModelParams& mp);

enum class ExcessVariant { Phi, Psi2DeltaEps };

// Area-weighted mean of |W - mean(W)|^2 over centroids in B_r(x0), with
// W = Du (Phi) or W = G_{2delta,eps}(Du) (Psi).
double excess(const DiscreteField& field, const Vec2& x0, double r, ExcessVariant variant,
              const ModelParams& mp);

struct HolderFit {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double constant = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    int bins_used = 0;
    std::int64_t pairs_used = 0;
    std::string status = "ok";  // "ok" | "constant field"
};

// Envelope fit of log|Delta G_{2delta,eps}| against log|Delta x| over sampled
// element-centroid pairs: 32 logarithmic bins anchored to the domain
// diameter, binned maxima, least-squares line. Half the budget is spent on
// scale-stratified pairs so every bin is populated independently of h.
HolderFit holder_seminorm(const DiscreteField& field, double delta, const ModelParams& mp,
                          std::int64_t pair_budget, std::uint64_t seed = 2024,
                          std::vector<std::array<double, 2>>* pair_cloud = nullptr);

struct DeGiorgiSchedule {
    double rho0 = 0.0, mu0 = 0.0, kappa = 0.0, beta = 0.0, alpha = 0.0;
    struct Row {
        int k;
        double rho;
        double mu;
    };
    std::vector<Row> rows;

    // sqrt(C* rho_k^beta) <= mu_{k+1} for every row, the induction step the
    // oscillation alternative feeds on.
    bool induction_feasible(double c_star) const;
};

// rho_k = 4^{-k} rho0, mu_k = kappa^k mu0, alpha with 4^{-alpha} = kappa.
// Requires kappa in (2^{-beta}, 1).
DeGiorgiSchedule de_giorgi_schedule(double rho0, double mu0, double kappa, double beta, int levels);

struct BallSpec {
    Vec2 x0;
    double rho = 0.0;
    double theta = 0.5;
};

struct LipschitzRow {
    BallSpec ball;
    double sup_v_inner = 0.0;  // sup of V_eps over B_{theta rho}
    double f_lq = 0.0;         // ||f||_{L^q(B_rho)}
    double v_lp = 0.0;         // ||V_eps||_{L^p(B_rho)}
    double gap = 0.0;          // (1-theta) rho
};

// The measured pieces of the local Lipschitz bound, so the constant and
// exponent can be fitted offline.
std::vector<LipschitzRow> lipschitz_diagnostic(const DiscreteField& field,
                                               const std::vector<BallSpec>& balls,
                                               const Eigen::MatrixXd& f, double q,
                                               const ModelParams& mp);

struct RegularityReport {
    double facet_threshold = 0.0;
    double facet_fraction = 0.0;
    struct SuperlevelRow {
        Vec2 x0;
        double rho, mu, nu, fraction;
    };
    std::vector<SuperlevelRow> superlevels;
    struct ExcessRow {
        Vec2 x0;
        double r, phi, psi;
    };
    std::vector<ExcessRow> excess_table;
    HolderFit holder;
    std::vector<LipschitzRow> lipschitz;
    double sup_v = 0.0;  // elementwise max of V_eps
};

}  // namespace facetflow
