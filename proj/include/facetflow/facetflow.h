/* facetflow — public C API.
 *
 * A shared library wrapping the density/flux/Hessian algebra of the
 * b|Du| + |Du|^p/p energy, the relaxed truncation maps, the randomized
 * inequality verifier, the 2-D convex minimizer, and the regularity
 * diagnostics. All functions return ff_status; ff_last_error() carries a
 * thread-local message for the most recent failure on the calling thread.
 *
 * Matrix arguments are passed as column-major buffers of an N-by-n matrix
 * (the flattening used throughout is column-major). Hessians are
 * (N*n)x(N*n), also column-major.
 */
#ifndef FACETFLOW_H
#define FACETFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FF_API __declspec(dllexport)
#else
#define FF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ff_status {
    FF_OK = 0,
    FF_ERR_INVALID_ARGUMENT = 1,
    FF_ERR_DOMAIN = 2,
    FF_ERR_NON_CONVERGENCE = 3,
    FF_ERR_IO = 4,
    FF_ERR_VIOLATIONS = 5,
    FF_ERR_INTERNAL = 6
} ff_status;

FF_API const char* ff_status_name(ff_status status);
FF_API const char* ff_last_error(void);
FF_API const char* ff_version(void);

/* ---- model parameters ------------------------------------------------- */

typedef struct ff_params ff_params;

/* Explicit structure constants. */
FF_API ff_status ff_params_create(double b, double p, double gamma_lo, double gamma_hi,
                                  double beta0, double delta, double epsilon, ff_params** out);
/* Model density: gamma = min{1,p-1}, Gamma = max{1,|p-2|/2}, beta0 = 1. */
FF_API ff_status ff_params_create_model(double b, double p, double delta, double epsilon,
                                        ff_params** out);
FF_API void ff_params_destroy(ff_params* params);
FF_API ff_status ff_params_set_epsilon(ff_params* params, double epsilon);

/* ---- pointwise density algebra ----------------------------------------- */

/* branch: 0=g1, 1=gp, 2=g1_eps, 3=gp_eps, 4=g_eps; order: 0,1,2 */
FF_API ff_status ff_eval_g(const ff_params* params, double sigma, int branch, int order,
                           double* out);
FF_API ff_status ff_energy_density(const ff_params* params, const double* xi, int N, int n,
                                   double* out);
FF_API ff_status ff_flux(const ff_params* params, const double* xi, int N, int n, double* out);
FF_API ff_status ff_hessian(const ff_params* params, const double* xi, int N, int n, double* out);
/* Analytic spectrum of the part ('1', 'p' or 'f' for the full Hessian). */
FF_API ff_status ff_hessian_eigs(const ff_params* params, const double* xi, int N, int n,
                                 char part, double* tangential, double* radial);
FF_API ff_status ff_coefficient_matrix(const ff_params* params, const double* du, int N, int n,
                                       double* out /* n*n */);
FF_API ff_status ff_ellipticity_ratio(const ff_params* params, const double* xi, int N, int n,
                                      double* out);
FF_API ff_status ff_ellipticity_ratio_bound(const ff_params* params, double delta, double* out);

/* ---- truncation maps ---------------------------------------------------- */

FF_API ff_status ff_truncate(const double* xi, int N, int n, double delta, double* out);
FF_API ff_status ff_truncate_relaxed(const double* xi, int N, int n, double delta, double epsilon,
                                     double* out);
FF_API ff_status ff_gp_eps_map(const ff_params* params, const double* xi, int N, int n,
                               double* out);
FF_API ff_status ff_gp_eps_inverse(const ff_params* params, const double* y, int N, int n,
                                   double* out);
FF_API ff_status ff_subdifferential_contains(const double* xi0, const double* zeta, int N, int n,
                                             int* out);

/* ---- de giorgi schedule -------------------------------------------------- */

/* Fills rho[k], mu[k] for k = 0..levels and writes alpha with 4^-alpha = kappa. */
FF_API ff_status ff_de_giorgi_schedule(double rho0, double mu0, double kappa, double beta,
                                       int levels, double* rho, double* mu, double* alpha);

/* ---- batch commands (config-driven; what the CLI calls) ------------------ */

/* Any of out_dir may be NULL (defaults beside the config). seed < 0 keeps the
 * config's seed; deterministic < 0 keeps the config's flag. Each returns the
 * process exit code the CLI should use (0 ok, 1 config error, 2 violations,
 * 3 non-convergence). */
FF_API int ff_cmd_verify(const char* config_path, const char* out_dir, int64_t seed,
                         int deterministic);
FF_API int ff_cmd_solve(const char* config_path, const char* out_dir, int64_t seed,
                        int deterministic);
FF_API int ff_cmd_ladder(const char* config_path, const char* out_dir, int64_t seed,
                         int deterministic);
FF_API int ff_cmd_regularity(const char* run_dir, int64_t seed, int deterministic);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FACETFLOW_H */
