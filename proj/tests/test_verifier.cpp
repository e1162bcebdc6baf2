#include "core/json_io.hpp"
#include "core/verifier.hpp"

#include <doctest.h>

using namespace facetflow;

namespace {

SweepConfig small_config(std::uint64_t seed = 42, std::int64_t samples = 20000) {
    SweepConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.dims = {{1, 2}, {2, 2}};
    cfg.param_grid = {ModelParams::model(1.0, 2.0, 0.5, 0.1),
                      ModelParams::model(0.25, 3.0, 0.2, 0.04)};
    return cfg;
}

}  // namespace

TEST_CASE("sweep is deterministic and worker-count independent") {
    SweepConfig a = small_config();
    a.workers = 1;
    SweepConfig b = small_config();
    b.workers = 4;
    const SweepReport ra = run_sweep(a, {"g2delta_lipschitz", "monotonicity"});
    const SweepReport rb = run_sweep(b, {"g2delta_lipschitz", "monotonicity"});
    const SweepReport ra2 = run_sweep(a, {"g2delta_lipschitz", "monotonicity"});
    CHECK(to_json(ra)["inequalities"].dump() == to_json(ra2)["inequalities"].dump());
    CHECK(to_json(ra)["inequalities"].dump() == to_json(rb)["inequalities"].dump());
}

TEST_CASE("correctness suite passes for five distinct seeds") {
    for (std::uint64_t seed : {1ULL, 77ULL, 1234ULL, 999983ULL, 0xDEADBEEFULL}) {
        SweepConfig cfg = small_config(seed, 8000);
        const SweepReport rep = run_sweep(cfg, {"all"});
        CHECK(rep.pass());
        for (const auto& r : rep.results) {
            INFO(r.id);
            CHECK(r.violations == 0);
            CHECK(r.checked > 0);
        }
    }
}

TEST_CASE("lipschitz constant calibration stays in (0.9, c-dagger]") {
    SweepConfig cfg = small_config(7, 200000);
    cfg.param_grid = {ModelParams::model(1.0, 2.0, 0.5, 0.1)};
    const double c = calibrate_constant("g2delta_lipschitz", cfg);
    const double c_dagger = 1.0 + 32.0 / (3.0 * std::sqrt(7.0));
    CHECK(c > 0.9);
    CHECK(c <= c_dagger);
}

TEST_CASE("monotonicity ratio is exactly one for p=2, b=0") {
    SweepConfig cfg = small_config(11, 50000);
    cfg.param_grid = {ModelParams::model(0.0, 2.0, 0.5, 0.1)};
    std::int64_t skipped = 0;
    const double ratio = calibrate_constant("monotonicity", cfg, &skipped);
    CHECK(ratio == 1.0);
}

TEST_CASE("coincident pair gives an exactly zero monotonicity margin") {
    SweepConfig cfg = small_config();
    Witness w;
    w.param_index = 0;
    w.dim_index = 0;
    w.rows = 1;
    w.cols = 2;
    w.xi0 = {0.3, -0.7};
    w.xi1 = {0.3, -0.7};
    CHECK(replay_witness("monotonicity", w, cfg) == 0.0);
}

TEST_CASE("selftest inequality produces violations with replayable witnesses") {
    SweepConfig cfg = small_config(5, 4000);
    const SweepReport rep = run_sweep(cfg, {"selftest_violation"});
    CHECK_FALSE(rep.pass());
    const auto& r = rep.results.at(0);
    CHECK(r.violations > 0);
    REQUIRE_FALSE(r.witnesses.empty());
    for (const auto& w : r.witnesses) {
        const double replayed = replay_witness("selftest_violation", w, rep.config);
        CHECK(replayed == w.margin);  // exact replay
    }
}

TEST_CASE("g1 bounds hold and are tight at sigma = 1") {
    SweepConfig cfg = small_config(3, 30000);
    const SweepReport rep = check_g1_bounds(cfg);
    CHECK(rep.pass());
    // |g1'(1)| = b exactly: margin zero at the witness sigma=1
    Witness w;
    w.param_index = 0;
    w.xi0 = {1.0, 1.0, 1.0};
    w.aux = 1.0;
    CHECK(replay_witness("g1_bounds", w, cfg) == 0.0);
}

TEST_CASE("hessian-error constant is reproducible across disjoint seeds") {
    SweepConfig a = small_config(100, 60000);
    a.param_grid = {ModelParams::model(1.0, 2.0, 0.25, 0.05)};
    SweepConfig b = a;
    b.seed = 200;
    const double ca = calibrate_constant("hessian_error", a);
    const double cb = calibrate_constant("hessian_error", b);
    CHECK(ca > 0.0);
    CHECK(std::abs(ca - cb) <= 0.05 * std::max(ca, cb));
}

TEST_CASE("joint-context constraints are enforced") {
    SweepConfig cfg = small_config();
    cfg.param_grid = {ModelParams::model(1.0, 2.0, 0.2, 0.1)};  // eps >= delta/4
    CHECK_THROWS_WITH_AS(run_sweep(cfg, {"g2delta_lipschitz"}),
                         doctest::Contains("0<epsilon<delta/4"), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(cfg, {}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(cfg, {"no_such_suite"}), std::invalid_argument);
}

TEST_CASE("sweep config validation") {
    SweepConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.radius_range = {2.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.dims = {{0, 2}};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
