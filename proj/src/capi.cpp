#include "facetflow/facetflow.h"

#include "core/density.hpp"
#include "core/regularity.hpp"
#include "core/runner.hpp"
#include "core/truncation.hpp"

#include <cstring>
#include <string>

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

ff_status classify(const std::exception& e) {
    set_error(e.what());
    if (dynamic_cast<const std::domain_error*>(&e)) return FF_ERR_DOMAIN;
    if (dynamic_cast<const facetflow::NonConvergence*>(&e)) return FF_ERR_NON_CONVERGENCE;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return FF_ERR_INVALID_ARGUMENT;
    return FF_ERR_INTERNAL;
}

template <typename Fn>
ff_status guarded(Fn&& fn) {
    try {
        fn();
        return FF_OK;
    } catch (const std::exception& e) {
        return classify(e);
    } catch (...) {
        set_error("unknown error");
        return FF_ERR_INTERNAL;
    }
}

facetflow::GradMat wrap(const double* data, int N, int n) {
    if (!data || N < 1 || n < 2) throw std::invalid_argument("matrix buffer: need N >= 1, n >= 2");
    return Eigen::Map<const facetflow::GradMat>(data, N, n);
}

void unwrap(const facetflow::GradMat& m, double* out) {
    std::memcpy(out, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
}

facetflow::RunOverrides overrides_from(const char* out_dir, int64_t seed, int deterministic) {
    facetflow::RunOverrides ov;
    if (out_dir) ov.out_dir = out_dir;
    if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
    if (deterministic >= 0) ov.deterministic = deterministic != 0;
    return ov;
}

template <typename Fn>
int run_cmd(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return facetflow::kExitConfigError;
    }
}

}  // namespace

struct ff_params {
    facetflow::ModelParams mp;
};

extern "C" {

const char* ff_status_name(ff_status status) {
    switch (status) {
        case FF_OK: return "ok";
        case FF_ERR_INVALID_ARGUMENT: return "invalid argument";
        case FF_ERR_DOMAIN: return "domain error";
        case FF_ERR_NON_CONVERGENCE: return "non-convergence";
        case FF_ERR_IO: return "io error";
        case FF_ERR_VIOLATIONS: return "violations";
        case FF_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* ff_last_error(void) { return g_last_error.c_str(); }

const char* ff_version(void) { return "facetflow 1.0.0"; }

ff_status ff_params_create(double b, double p, double gamma_lo, double gamma_hi, double beta0,
                           double delta, double epsilon, ff_params** out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        facetflow::ModelParams mp;
        mp.b = b;
        mp.p = p;
        mp.gamma = gamma_lo;
        mp.Gamma = gamma_hi;
        mp.beta0 = beta0;
        mp.delta = delta;
        mp.epsilon = epsilon;
        mp.validate();
        *out = new ff_params{mp};
    });
}

ff_status ff_params_create_model(double b, double p, double delta, double epsilon, ff_params** out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        *out = new ff_params{facetflow::ModelParams::model(b, p, delta, epsilon)};
    });
}

void ff_params_destroy(ff_params* params) { delete params; }

ff_status ff_params_set_epsilon(ff_params* params, double epsilon) {
    return guarded([&] {
        if (!params) throw std::invalid_argument("params must not be null");
        facetflow::ModelParams mp = params->mp;
        mp.epsilon = epsilon;
        mp.validate();
        params->mp = mp;
    });
}

ff_status ff_eval_g(const ff_params* params, double sigma, int branch, int order, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        if (branch < 0 || branch > 4) throw std::invalid_argument("branch must be in 0..4");
        *out = facetflow::eval_g(sigma, static_cast<facetflow::GBranch>(branch), order, params->mp);
    });
}

ff_status ff_energy_density(const ff_params* params, const double* xi, int N, int n, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        *out = facetflow::energy_density(wrap(xi, N, n), params->mp);
    });
}

ff_status ff_flux(const ff_params* params, const double* xi, int N, int n, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        unwrap(facetflow::flux(wrap(xi, N, n), params->mp), out);
    });
}

ff_status ff_hessian(const ff_params* params, const double* xi, int N, int n, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        const Eigen::MatrixXd B = facetflow::hessian(wrap(xi, N, n), params->mp);
        std::memcpy(out, B.data(), sizeof(double) * static_cast<size_t>(B.size()));
    });
}

ff_status ff_hessian_eigs(const ff_params* params, const double* xi, int N, int n, char part,
                          double* tangential, double* radial) {
    return guarded([&] {
        if (!params || !tangential || !radial) throw std::invalid_argument("null argument");
        facetflow::HessPart hp;
        if (part == '1') hp = facetflow::HessPart::one;
        else if (part == 'p') hp = facetflow::HessPart::p;
        else if (part == 'f') hp = facetflow::HessPart::full;
        else throw std::invalid_argument("part must be '1', 'p' or 'f'");
        const auto eig = facetflow::hessian_eigs(wrap(xi, N, n), params->mp, hp);
        *tangential = eig.tangential;
        *radial = eig.radial;
    });
}

ff_status ff_coefficient_matrix(const ff_params* params, const double* du, int N, int n,
                                double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        const Eigen::MatrixXd C = facetflow::coefficient_matrix(wrap(du, N, n), params->mp);
        std::memcpy(out, C.data(), sizeof(double) * static_cast<size_t>(C.size()));
    });
}

ff_status ff_ellipticity_ratio(const ff_params* params, const double* xi, int N, int n,
                               double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        *out = facetflow::ellipticity_ratio(wrap(xi, N, n), params->mp);
    });
}

ff_status ff_ellipticity_ratio_bound(const ff_params* params, double delta, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        *out = facetflow::ellipticity_ratio_bound(delta, params->mp);
    });
}

ff_status ff_truncate(const double* xi, int N, int n, double delta, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null argument");
        unwrap(facetflow::truncate(wrap(xi, N, n), delta), out);
    });
}

ff_status ff_truncate_relaxed(const double* xi, int N, int n, double delta, double epsilon,
                              double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null argument");
        unwrap(facetflow::truncate_relaxed(wrap(xi, N, n), delta, epsilon), out);
    });
}

ff_status ff_gp_eps_map(const ff_params* params, const double* xi, int N, int n, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        unwrap(facetflow::gp_eps_map(wrap(xi, N, n), params->mp), out);
    });
}

ff_status ff_gp_eps_inverse(const ff_params* params, const double* y, int N, int n, double* out) {
    return guarded([&] {
        if (!params || !out) throw std::invalid_argument("null argument");
        unwrap(facetflow::gp_eps_inverse(wrap(y, N, n), params->mp), out);
    });
}

ff_status ff_subdifferential_contains(const double* xi0, const double* zeta, int N, int n,
                                      int* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null argument");
        *out = facetflow::subdifferential_contains(wrap(xi0, N, n), wrap(zeta, N, n)) ? 1 : 0;
    });
}

ff_status ff_de_giorgi_schedule(double rho0, double mu0, double kappa, double beta, int levels,
                                double* rho, double* mu, double* alpha) {
    return guarded([&] {
        if (!rho || !mu || !alpha) throw std::invalid_argument("null argument");
        const auto s = facetflow::de_giorgi_schedule(rho0, mu0, kappa, beta, levels);
        for (const auto& row : s.rows) {
            rho[row.k] = row.rho;
            mu[row.k] = row.mu;
        }
        *alpha = s.alpha;
    });
}

int ff_cmd_verify(const char* config_path, const char* out_dir, int64_t seed, int deterministic) {
    return run_cmd([&] {
        if (!config_path) throw std::invalid_argument("config path must not be null");
        return facetflow::cmd_verify(config_path, overrides_from(out_dir, seed, deterministic));
    });
}

int ff_cmd_solve(const char* config_path, const char* out_dir, int64_t seed, int deterministic) {
    return run_cmd([&] {
        if (!config_path) throw std::invalid_argument("config path must not be null");
        return facetflow::cmd_solve(config_path, overrides_from(out_dir, seed, deterministic));
    });
}

int ff_cmd_ladder(const char* config_path, const char* out_dir, int64_t seed, int deterministic) {
    return run_cmd([&] {
        if (!config_path) throw std::invalid_argument("config path must not be null");
        return facetflow::cmd_ladder(config_path, overrides_from(out_dir, seed, deterministic));
    });
}

int ff_cmd_regularity(const char* run_dir, int64_t seed, int deterministic) {
    return run_cmd([&] {
        if (!run_dir) throw std::invalid_argument("run dir must not be null");
        return facetflow::cmd_regularity(run_dir, overrides_from(nullptr, seed, deterministic));
    });
}

}  // extern "C"
