#include "core/solver.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace facetflow;

namespace {

Eigen::MatrixXd constant_load(const Mesh& m, double value) {
    return Eigen::MatrixXd::Constant(m.num_vertices(), 1, value);
}

DiscreteField linear_boundary_field(std::shared_ptr<const Mesh> mesh, const GradMat& xi) {
    return DiscreteField::from_function(std::move(mesh), 1, [&](const Vec2& x) {
        return Eigen::VectorXd::Constant(1, xi.row(0).dot(x));
    });
}

}  // namespace

TEST_CASE("energy assembly closed forms") {
    auto mesh = std::make_shared<const Mesh>(make_rectangle(0, 0, 1, 1, 8, 8));
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.5);

    DiscreteField zero(mesh, 1);
    const Eigen::MatrixXd f0 = constant_load(*mesh, 0.0);
    CHECK(assemble_energy(zero, f0, mp) ==
          doctest::Approx(mesh->total_area() * energy_density(GradMat::Zero(1, 2), mp))
              .epsilon(1e-14));

    GradMat xi(1, 2);
    xi << 0.3, -0.9;
    const DiscreteField lin = linear_boundary_field(mesh, xi);
    CHECK(assemble_energy(lin, f0, mp) ==
          doctest::Approx(mesh->total_area() * energy_density(xi, mp)).epsilon(1e-12));

    // unit square, u(x,y) = x, b=1, p=2, eps=0: b|xi| + |xi|^2/2 = 1.5
    ModelParams mp0 = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    GradMat ex(1, 2);
    ex << 1.0, 0.0;
    const DiscreteField ramp = linear_boundary_field(mesh, ex);
    CHECK(assemble_energy(ramp, f0, mp0) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("constant-gradient fields are flux-divergence-free") {
    auto mesh = std::make_shared<const Mesh>(make_rectangle(0, 0, 1, 1, 16, 16));
    GradMat xi(1, 2);
    xi << 0.7, 0.4;
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.05);
    const Eigen::MatrixXd f0 = constant_load(*mesh, 0.0);

    // start from zero interior values, keep the linear boundary data
    DiscreteField init = linear_boundary_field(mesh, xi);
    for (int v = 0; v < mesh->num_vertices(); ++v)
        if (!mesh->boundary[v]) init.values()(v, 0) = 0.0;
    init.update_gradients();

    auto [u, rep] = minimize(init, f0, mp);
    CHECK(rep.converged);
    CHECK(rep.residual_norm <= 1e-10);
    for (int t = 0; t < mesh->num_triangles(); ++t)
        CHECK((u.gradient(t) - xi).norm() <= 1e-8);
}

TEST_CASE("solver requires relaxation") {
    auto mesh = std::make_shared<const Mesh>(make_rectangle(0, 0, 1, 1, 4, 4));
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    DiscreteField init(mesh, 1);
    CHECK_THROWS_AS(minimize(init, constant_load(*mesh, 0.0), mp), std::invalid_argument);
}

TEST_CASE("bingham disk: energy trace, uniqueness, bump optimality, galilean shift") {
    auto mesh = std::make_shared<const Mesh>(make_disk(1.0, 48));
    ModelParams mp = ModelParams::model(0.25, 2.0, 0.3, 0.05);
    const Eigen::MatrixXd f = constant_load(*mesh, 1.0);
    DiscreteField init(mesh, 1);

    auto [u, rep] = minimize(init, f, mp);
    CHECK(rep.converged);
    for (size_t i = 1; i < rep.energy_trace.size(); ++i)
        CHECK(rep.energy_trace[i] <= rep.energy_trace[i - 1] + 1e-15);

    SUBCASE("uniqueness across initial guesses") {
        DiscreteField init2(mesh, 1);
        Rng rng(99);
        for (int v = 0; v < mesh->num_vertices(); ++v)
            if (!mesh->boundary[v]) init2.values()(v, 0) = 0.01 * rng.normal();
        init2.update_gradients();
        auto [u2, rep2] = minimize(init2, f, mp);
        CHECK(rep2.converged);
        double l2 = 0.0;
        for (int t = 0; t < mesh->num_triangles(); ++t)
            l2 += mesh->area[t] * (u.gradient(t) - u2.gradient(t)).squaredNorm();
        CHECK(std::sqrt(l2) <= 10.0 * 1e-10);
    }

    SUBCASE("single-node bumps strictly increase the energy") {
        const double e0 = assemble_energy(u, f, mp);
        Rng rng(7);
        int tested = 0;
        while (tested < 50) {
            const int v = static_cast<int>(rng.uniform_index(mesh->num_vertices()));
            if (mesh->boundary[v]) continue;
            ++tested;
            DiscreteField bumped = u;
            bumped.values()(v, 0) += (rng.uniform01() < 0.5 ? 1.0 : -1.0) * 1e-4;
            bumped.update_gradients();
            CHECK(assemble_energy(bumped, f, mp) > e0);
        }
    }

    SUBCASE("load shift re-solves consistently") {
        const Eigen::MatrixXd f2 = constant_load(*mesh, 1.5);
        auto [u3, rep3] = minimize(u, f2, mp);
        CHECK(rep3.converged);
        CHECK(weak_residual(u3, f2, mp) <= 1e-10);
    }
}

TEST_CASE("bingham disk approaches the radial oracle under refinement") {
    const double b = 0.25, eps = 0.05;
    oracles::BinghamRadialOracle oracle(b, 1.0, eps);
    ModelParams mp = ModelParams::model(b, 2.0, 0.3, eps);
    double linf_coarse = 0.0, linf_fine = 0.0;
    for (int ncell : {32, 64}) {
        auto mesh = std::make_shared<const Mesh>(make_disk(1.0, ncell));
        DiscreteField init(mesh, 1);
        auto [u, rep] = minimize(init, constant_load(*mesh, 1.0), mp);
        REQUIRE(rep.converged);
        double linf = 0.0;
        for (int v = 0; v < mesh->num_vertices(); ++v)
            linf = std::max(linf,
                            std::abs(u.values()(v, 0) - oracle.velocity(mesh->vertices[v].norm())));
        (ncell == 32 ? linf_coarse : linf_fine) = linf;
    }
    CHECK(linf_coarse / linf_fine >= 1.5);
}

TEST_CASE("non-convergence carries the report") {
    auto mesh = std::make_shared<const Mesh>(make_disk(1.0, 24));
    ModelParams mp = ModelParams::model(0.25, 2.0, 0.3, 0.05);
    DiscreteField init(mesh, 1);
    ToleranceSpec tol;
    tol.max_iters = 1;
    try {
        minimize(init, constant_load(*mesh, 1.0), mp, tol);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.report.newton_iters <= 1);
        CHECK_FALSE(e.report.converged);
        CHECK_FALSE(e.report.error.empty());
    }
}

TEST_CASE("ladder on linear boundary data is constant across levels") {
    auto mesh = std::make_shared<const Mesh>(make_rectangle(0, 0, 1, 1, 12, 12));
    GradMat xi(1, 2);
    xi << 0.9, 0.2;
    const DiscreteField init = linear_boundary_field(mesh, xi);
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.3, 0.05);
    const Eigen::MatrixXd f0 = constant_load(*mesh, 0.0);
    auto [fields, ladder] = solve_ladder(init, f0, mp, {0.05, 0.025, 0.0125}, 0.3);
    REQUIRE(fields.size() == 3);
    for (size_t j = 1; j < ladder.levels.size(); ++j) {
        CHECK(ladder.levels[j].ddu_lp <= 1e-8);
        CHECK(ladder.levels[j].dg_sup <= 1e-8);
    }
    CHECK_THROWS_AS(solve_ladder(init, f0, mp, {0.05, 0.06}, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(solve_ladder(init, f0, mp, {0.1}, 0.3), std::invalid_argument);
}
