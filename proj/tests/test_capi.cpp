#include <facetflow/facetflow.h>

#include "core/density.hpp"
#include "core/truncation.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

TEST_CASE("c api: params lifecycle and validation") {
    ff_params* p = nullptr;
    REQUIRE(ff_params_create_model(1.0, 2.0, 0.25, 0.05, &p) == FF_OK);
    REQUIRE(p != nullptr);
    CHECK(ff_params_set_epsilon(p, 0.1) == FF_OK);
    CHECK(ff_params_set_epsilon(p, -1.0) == FF_ERR_INVALID_ARGUMENT);
    ff_params_destroy(p);

    ff_params* bad = nullptr;
    CHECK(ff_params_create(1.0, 0.5, 1.0, 1.0, 1.0, 0.25, 0.0, &bad) ==
          FF_ERR_INVALID_ARGUMENT);  // p <= 1
    CHECK(bad == nullptr);
    CHECK(std::strlen(ff_last_error()) > 0);
}

TEST_CASE("c api: pointwise algebra matches the core") {
    ff_params* p = nullptr;
    REQUIRE(ff_params_create_model(2.0, 2.0, 0.25, 0.5, &p) == FF_OK);
    const double xi[2] = {std::sqrt(3.0) / 2.0, 0.0};

    double e = 0.0;
    CHECK(ff_energy_density(p, xi, 1, 2, &e) == FF_OK);
    facetflow::GradMat m(1, 2);
    m << xi[0], xi[1];
    CHECK(e == facetflow::energy_density(m, facetflow::ModelParams::model(2.0, 2.0, 0.25, 0.5)));

    double a[2] = {0, 0};
    CHECK(ff_flux(p, xi, 1, 2, a) == FF_OK);
    CHECK(a[0] == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));

    double B[4] = {0, 0, 0, 0};
    CHECK(ff_hessian(p, xi, 1, 2, B) == FF_OK);
    CHECK(B[1] == doctest::Approx(B[2]).epsilon(1e-15));  // symmetric

    double t = 0, r = 0;
    CHECK(ff_hessian_eigs(p, xi, 1, 2, '1', &t, &r) == FF_OK);
    CHECK(t == doctest::Approx(2.0).epsilon(1e-14));  // b/sqrt(eps^2+|xi|^2) = 2/1
    CHECK(ff_hessian_eigs(p, xi, 1, 2, 'x', &t, &r) == FF_ERR_INVALID_ARGUMENT);

    double ratio = 0.0;
    CHECK(ff_ellipticity_ratio(p, xi, 1, 2, &ratio) == FF_OK);
    CHECK(ratio >= 1.0);
    double bound = 0.0;
    CHECK(ff_ellipticity_ratio_bound(p, 0.1, &bound) == FF_OK);

    double c[4];
    CHECK(ff_coefficient_matrix(p, xi, 1, 2, c) == FF_OK);

    ff_params_destroy(p);
}

TEST_CASE("c api: truncations, inverse map, subdifferential") {
    const double xi[2] = {0.4, 0.0};
    double out[2];
    REQUIRE(ff_truncate_relaxed(xi, 1, 2, 0.25, 0.05, out) == FF_OK);
    CHECK(out[0] == doctest::Approx(0.15311288741492746).epsilon(1e-14));
    CHECK(ff_truncate_relaxed(xi, 1, 2, 0.25, 0.3, out) == FF_ERR_INVALID_ARGUMENT);
    CHECK(ff_truncate(xi, 1, 2, 0.0, out) == FF_ERR_INVALID_ARGUMENT);

    ff_params* p = nullptr;
    REQUIRE(ff_params_create_model(1.0, 3.0, 0.25, 0.0, &p) == FF_OK);
    const double two[2] = {2.0, 0.0};
    double fwd[2], back[2];
    REQUIRE(ff_gp_eps_map(p, two, 1, 2, fwd) == FF_OK);
    CHECK(fwd[0] == doctest::Approx(8.0).epsilon(1e-14));
    REQUIRE(ff_gp_eps_inverse(p, fwd, 1, 2, back) == FF_OK);
    CHECK(back[0] == doctest::Approx(2.0).epsilon(1e-12));
    ff_params_destroy(p);

    const double zero[2] = {0.0, 0.0};
    const double zeta[2] = {0.3, 0.4};
    int member = 0;
    CHECK(ff_subdifferential_contains(zero, zeta, 1, 2, &member) == FF_OK);
    CHECK(member == 1);
}

TEST_CASE("c api: domain errors surface as FF_ERR_DOMAIN") {
    ff_params* p = nullptr;
    REQUIRE(ff_params_create_model(1.0, 2.0, 0.25, 0.0, &p) == FF_OK);
    double out = 0.0;
    CHECK(ff_eval_g(p, 0.0, /*g1*/ 0, 1, &out) == FF_ERR_DOMAIN);
    const double zero[2] = {0.0, 0.0};
    double B[4];
    CHECK(ff_hessian(p, zero, 1, 2, B) == FF_ERR_DOMAIN);
    ff_params_destroy(p);
}

TEST_CASE("c api: de giorgi schedule") {
    double rho[4], mu[4], alpha = 0.0;
    REQUIRE(ff_de_giorgi_schedule(0.8, 1.0, 0.6, 0.9, 3, rho, mu, &alpha) == FF_OK);
    CHECK(alpha == doctest::Approx(-std::log(0.6) / std::log(4.0)).epsilon(1e-15));
    CHECK(rho[3] == doctest::Approx(0.0125).epsilon(1e-15));
    CHECK(mu[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(ff_de_giorgi_schedule(0.8, 1.0, 0.5, 0.9, 3, rho, mu, &alpha) ==
          FF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: command entry points reject bad paths") {
    CHECK(ff_cmd_verify("/nonexistent/config.json", nullptr, -1, -1) == 1);
    CHECK(ff_cmd_solve("/nonexistent/config.json", nullptr, -1, -1) == 1);
    CHECK(ff_cmd_regularity("/nonexistent/run", -1, -1) == 1);
    CHECK(ff_status_name(FF_OK) == std::string("ok"));
    CHECK(std::string(ff_version()).find("facetflow") == 0);
}
