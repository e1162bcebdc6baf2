#include "core/density.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace facetflow;

namespace {
GradMat row2(double a, double b) {
    GradMat m(1, 2);
    m << a, b;
    return m;
}
}  // namespace

TEST_CASE("eval_g scalar branches") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    CHECK(eval_g(4.0, GBranch::g1, 0, mp) == doctest::Approx(4.0).epsilon(1e-15));

    ModelParams mp3 = ModelParams::model(1.0, 3.0, 0.25, 0.0);
    CHECK(eval_g(1.0, GBranch::gp, 1, mp3) == doctest::Approx(1.0).epsilon(1e-15));

    ModelParams mpe = ModelParams::model(1.0, 2.0, 0.25, 0.5);
    // 2*b*sqrt(eps^2) + gp(eps^2) = 1.0 + 0.25
    CHECK(eval_g(0.0, GBranch::g_eps, 0, mpe) == doctest::Approx(1.25).epsilon(1e-15));

    // g_eps = g1_eps + gp_eps identically
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double sigma = rng.log_uniform(1e-6, 1e6);
        for (int order = 0; order <= 2; ++order) {
            const double total = eval_g(sigma, GBranch::g_eps, order, mpe);
            const double split = eval_g(sigma, GBranch::g1_eps, order, mpe) +
                                 eval_g(sigma, GBranch::gp_eps, order, mpe);
            CHECK(total == doctest::Approx(split).epsilon(1e-14));
        }
    }
}

TEST_CASE("eval_g domain errors at the unrelaxed origin") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    CHECK_THROWS_AS(eval_g(0.0, GBranch::g1, 1, mp), std::domain_error);
    CHECK_THROWS_AS(eval_g(0.0, GBranch::g_eps, 2, mp), std::domain_error);
    CHECK_THROWS_AS(eval_g(-1.0, GBranch::g1, 0, mp), std::domain_error);
    ModelParams mpe = ModelParams::model(1.0, 2.0, 0.25, 0.5);
    CHECK_NOTHROW(eval_g(0.0, GBranch::g_eps, 2, mpe));
}

TEST_CASE("energy density examples") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    CHECK(energy_density(GradMat::Zero(1, 2), mp) == 0.0);

    ModelParams mpe = ModelParams::model(1.0, 2.0, 0.25, 0.5);
    CHECK(energy_density(GradMat::Zero(1, 2), mpe) == doctest::Approx(0.625).epsilon(1e-15));

    ModelParams mp23 = ModelParams::model(2.0, 3.0, 0.25, 0.0);
    CHECK(energy_density(row2(1.0, 0.0), mp23) ==
          doctest::Approx(2.0 + 1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("flux examples and limit map") {
    ModelParams mpe = ModelParams::model(2.0, 2.0, 0.25, 0.5);
    CHECK(flux(GradMat::Zero(2, 3), mpe).norm() == 0.0);

    const GradMat xi = row2(std::sqrt(3.0) / 2.0, 0.0);
    const GradMat a = flux(xi, mpe);
    CHECK(a(0, 0) == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(a(0, 1) == 0.0);

    ModelParams mp0 = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    const GradMat a0 = flux(row2(3.0, 4.0), mp0);
    CHECK(a0(0, 0) == doctest::Approx(3.6).epsilon(1e-14));
    CHECK(a0(0, 1) == doctest::Approx(4.8).epsilon(1e-14));
    CHECK(flux(GradMat::Zero(1, 2), mp0).norm() == 0.0);  // A_0(0) := 0
}

TEST_CASE("hessian: radial eigenvalues against a dense eigensolver") {
    Rng rng(11);
    for (double p : {1.5, 2.0, 3.0}) {
        ModelParams mp = ModelParams::model(1.0, p, 0.25, 0.1);
        for (int i = 0; i < 50; ++i) {
            const GradMat xi = rng.sample_matrix(2, 2, 1e-2, 1e2);
            const Eigen::VectorXd dense = oracles::dense_eigenvalues(hessian(xi, mp));
            const RadialEigs analytic = hessian_eigs(xi, mp);
            CHECK(dense.minCoeff() == doctest::Approx(analytic.min()).epsilon(1e-10));
            CHECK(dense.maxCoeff() == doctest::Approx(analytic.max()).epsilon(1e-10));
            int tangential_count = 0;
            for (Eigen::Index k = 0; k < dense.size(); ++k)
                if (std::abs(dense[k] - analytic.tangential) <=
                    1e-9 * std::abs(analytic.tangential))
                    ++tangential_count;
            CHECK(tangential_count >= static_cast<int>(dense.size()) - 1);
        }
    }
}

TEST_CASE("hessian: p=2 p-part is the identity") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.1);
    Rng rng(3);
    const GradMat xi = rng.sample_matrix(2, 2, 1e-1, 1e1);
    const Eigen::MatrixXd bp = hessian(xi, mp, HessPart::p);
    CHECK((bp - Eigen::MatrixXd::Identity(4, 4)).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("hessian: one-part sandwich and value at the origin") {
    ModelParams mp = ModelParams::model(0.7, 2.0, 0.25, 0.05);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const GradMat xi = rng.sample_matrix(1, 2, 1e-4, 1e4);
        const RadialEigs e = hessian_eigs(xi, mp, HessPart::one);
        const double bound = mp.b / std::sqrt(mp.epsilon * mp.epsilon + xi.squaredNorm());
        CHECK(e.min() >= -1e-15);
        CHECK(e.max() <= bound * (1.0 + 1e-12));
    }
    const RadialEigs at0 = hessian_eigs(GradMat::Zero(1, 2), mp, HessPart::one);
    CHECK(at0.tangential == doctest::Approx(mp.b / mp.epsilon).epsilon(1e-14));
    CHECK(at0.radial == doctest::Approx(mp.b / mp.epsilon).epsilon(1e-14));

    ModelParams mp0 = ModelParams::model(1.0, 2.0, 0.25, 0.0);
    CHECK_THROWS_AS(hessian(GradMat::Zero(1, 2), mp0), std::domain_error);
}

TEST_CASE("calculus consistency: flux is the gradient of the energy") {
    Rng rng(23);
    for (double eps : {0.01, 0.1, 0.5}) {
        for (double p : {1.5, 2.0, 3.0}) {
            ModelParams mp = ModelParams::model(1.0, p, 0.25, eps);
            for (int i = 0; i < 40; ++i) {
                const GradMat xi = rng.sample_matrix(2, 2, 1e-3, 1e3);
                const double step = oracles::fd_step(xi, eps);
                const GradMat fd = oracles::fd_gradient(
                    [&](const GradMat& z) { return energy_density(z, mp); }, xi, step);
                const GradMat a = flux(xi, mp);
                CHECK((fd - a).norm() <= 1e-6 * std::max(a.norm(), 1e-12));
            }
        }
    }
}

TEST_CASE("calculus consistency: hessian is the Jacobian of the flux") {
    Rng rng(29);
    for (double eps : {0.01, 0.1, 0.5}) {
        ModelParams mp = ModelParams::model(1.0, 3.0, 0.25, eps);
        for (int i = 0; i < 30; ++i) {
            const GradMat xi = rng.sample_matrix(1, 2, 1e-3, 1e3);
            const double step = oracles::fd_step(xi, eps);
            const Eigen::MatrixXd fd =
                oracles::fd_jacobian([&](const GradMat& z) { return flux(z, mp); }, xi, step);
            const Eigen::MatrixXd B = hessian(xi, mp);
            CHECK((fd - B).norm() <= 1e-5 * std::max(B.norm(), 1e-12));
        }
    }
}

TEST_CASE("coefficient matrix") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.25, 0.1);
    SUBCASE("tensor term vanishes at Du = 0") {
        const Eigen::MatrixXd c = coefficient_matrix(GradMat::Zero(2, 2), mp);
        const double gp = eval_g(0.0, GBranch::g_eps, 1, mp);
        CHECK((c - gp * Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-14 * gp);
    }
    SUBCASE("N=1 rank-one spectral decomposition") {
        const GradMat du = row2(0.8, -0.3);
        const Eigen::VectorXd eigs = oracles::dense_eigenvalues(coefficient_matrix(du, mp));
        const double sigma = du.squaredNorm();
        const double d1 = eval_g(sigma, GBranch::g_eps, 1, mp);
        const double d2 = eval_g(sigma, GBranch::g_eps, 2, mp);
        const double along = d1 + 2.0 * sigma * d2;
        CHECK(eigs.minCoeff() == doctest::Approx(std::min(d1, along)).epsilon(1e-12));
        CHECK(eigs.maxCoeff() == doctest::Approx(std::max(d1, along)).epsilon(1e-12));
    }
    SUBCASE("spectrum inside the stated sandwich") {
        Rng rng(31);
        for (int i = 0; i < 200; ++i) {
            const GradMat du = rng.sample_matrix(2, 2, 1e-3, 1e3);
            const Eigen::VectorXd eigs = oracles::dense_eigenvalues(coefficient_matrix(du, mp));
            const double v = std::sqrt(mp.epsilon * mp.epsilon + du.squaredNorm());
            const double lo = mp.gamma * std::pow(v, mp.p - 2.0);
            const double hi = mp.b / v + 3.0 * mp.Gamma * std::pow(v, mp.p - 2.0);
            CHECK(eigs.minCoeff() >= lo * (1.0 - 1e-9));
            CHECK(eigs.maxCoeff() <= hi * (1.0 + 1e-9));
        }
    }
    SUBCASE("requires relaxation") {
        ModelParams mp0 = ModelParams::model(1.0, 2.0, 0.25, 0.0);
        CHECK_THROWS_AS(coefficient_matrix(row2(1.0, 0.0), mp0), std::invalid_argument);
    }
}

TEST_CASE("ellipticity ratio") {
    ModelParams mp = ModelParams::model(1.0, 2.0, 0.1, 0.0);
    CHECK(ellipticity_ratio_bound(0.1, mp) == doctest::Approx(11.0).epsilon(1e-14));

    for (double t : {0.1, 0.2, 1.0, 10.0}) {
        const double ratio = ellipticity_ratio(row2(t, 0.0), mp);
        CHECK(ratio <= ellipticity_ratio_bound(0.1, mp) * (1.0 + 1e-12));
    }
    CHECK(ellipticity_ratio(row2(0.1, 0.0), mp) ==
          doctest::Approx(ellipticity_ratio_bound(0.1, mp)).epsilon(1e-12));

    SUBCASE("b = 0, p = 2 is perfectly conditioned") {
        ModelParams flat = ModelParams::model(0.0, 2.0, 0.25, 0.0);
        Rng rng(37);
        for (int i = 0; i < 20; ++i)
            CHECK(ellipticity_ratio(rng.sample_matrix(1, 2, 1e-3, 1e3), flat) ==
                  doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("ratio diverges monotonically towards the facet") {
        double prev = 0.0;
        for (int k = 0; k <= 6; ++k) {
            const double ratio = ellipticity_ratio(row2(std::pow(10.0, -k), 0.0), mp);
            CHECK(ratio > prev);
            prev = ratio;
        }
        CHECK(prev > 1e5);
    }
    SUBCASE("degenerate Hessian is a domain error") {
        ModelParams mp0 = ModelParams::model(1.0, 2.0, 0.1, 0.0);
        CHECK_THROWS_AS(ellipticity_ratio(GradMat::Zero(1, 2), mp0), std::domain_error);
    }
}

TEST_CASE("pluggable density hook validated against the growth bounds") {
    const double p = 2.5;
    auto custom = std::make_shared<GpDensity>();
    custom->g = [p](double s) { return 2.0 * std::pow(s, p / 2.0) / p; };
    custom->g1 = [p](double s) { return std::pow(s, p / 2.0 - 1.0); };
    custom->g2 = [p](double s) { return (p / 2.0 - 1.0) * std::pow(s, p / 2.0 - 2.0); };
    ModelParams mp = ModelParams::model(1.0, p, 0.25, 0.1);
    mp.gp_override = custom;
    Rng rng(41);
    for (int i = 0; i < 500; ++i) {
        const double s = rng.log_uniform(1e-6, 1e6);
        CHECK(std::abs(eval_g(s, GBranch::gp, 1, mp)) <=
              mp.Gamma * std::pow(s, p / 2.0 - 1.0) * (1.0 + 1e-12));
        CHECK(std::abs(eval_g(s, GBranch::gp, 2, mp)) <=
              mp.Gamma * std::pow(s, p / 2.0 - 2.0) * (1.0 + 1e-12));
    }
    ModelParams plain = ModelParams::model(1.0, p, 0.25, 0.1);
    const GradMat xi = row2(0.7, -0.2);
    CHECK((flux(xi, mp) - flux(xi, plain)).norm() <= 1e-14);
}
