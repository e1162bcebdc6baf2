#include "core/runner.hpp"

#include "core/density.hpp"

#include <cmath>
#include <iostream>

namespace facetflow {

namespace fs = std::filesystem;

namespace {

json preset_config(const std::string& name) {
    if (name == "bingham_disk") {
        return json{{"params", {{"b", 0.25}, {"p", 2.0}, {"delta", 0.3}, {"epsilon", 0.00625}}},
                    {"mesh", {{"kind", "disk"}, {"radius", 1.0}, {"ncell", 128}}},
                    {"components", 1},
                    {"load", {{"kind", "constant"}, {"value", json::array({1.0})}}},
                    {"boundary", {{"kind", "zero"}}}};
    }
    if (name == "crystal_p3") {
        return json{{"params", {{"b", 1.0}, {"p", 3.0}, {"delta", 0.25}, {"epsilon", 0.01}}},
                    {"mesh",
                     {{"kind", "rectangle"}, {"x0", -1.0}, {"y0", -1.0}, {"x1", 1.0}, {"y1", 1.0},
                      {"nx", 64}, {"ny", 64}}},
                    {"components", 1},
                    {"load", {{"kind", "harmonic_poly"}, {"amplitude", 4.0}}},
                    {"boundary", {{"kind", "zero"}}}};
    }
    if (name == "linear_boundary") {
        return json{{"params", {{"b", 1.0}, {"p", 2.0}, {"delta", 0.25}, {"epsilon", 0.05}}},
                    {"mesh",
                     {{"kind", "rectangle"}, {"x0", 0.0}, {"y0", 0.0}, {"x1", 1.0}, {"y1", 1.0},
                      {"nx", 32}, {"ny", 32}}},
                    {"components", 1},
                    {"load", {{"kind", "constant"}, {"value", json::array({0.0})}}},
                    {"boundary", {{"kind", "linear"}, {"xi0", json::array({json::array({0.7, 0.4})})}}}};
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

json merged_section(const json& section, const json& root) {
    json out = section;
    if (section.contains("preset") && !section["preset"].is_null()) {
        json base = preset_config(section["preset"].get<std::string>());
        for (auto& [key, value] : base.items())
            if (!out.contains(key)) out[key] = value;
        out["preset"] = section["preset"];
    }
    if (!out.contains("params") && root.contains("params")) out["params"] = root["params"];
    return out;
}

}  // namespace

ProblemSetup expand_problem(const json& section, const json& root) {
    const json merged = merged_section(section, root);
    ProblemSetup setup;
    if (!merged.contains("params")) throw std::invalid_argument("config: missing params");
    setup.params = params_from_json(merged["params"]);
    if (!merged.contains("mesh")) throw std::invalid_argument("config: missing mesh");
    setup.mesh_spec = mesh_spec_from_json(merged["mesh"]);
    setup.components = merged.value("components", 1);
    setup.load = merged.value("load", json{{"kind", "constant"}, {"value", json::array({0.0})}});
    setup.boundary = merged.value("boundary", json{{"kind", "zero"}});
    if (merged.contains("tolerance")) setup.tolerance = tolerance_from_json(merged["tolerance"]);
    setup.preset = merged.value("preset", std::string());
    return setup;
}

Eigen::MatrixXd build_load(const ProblemSetup& setup, const Mesh& mesh) {
    const int N = setup.components;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(mesh.num_vertices(), N);
    const std::string kind = setup.load.value("kind", std::string("constant"));
    if (kind == "constant") {
        const auto vals = setup.load.at("value");
        for (int v = 0; v < mesh.num_vertices(); ++v)
            for (int i = 0; i < N; ++i) f(v, i) = vals.at(static_cast<size_t>(i)).get<double>();
    } else if (kind == "gaussian") {
        const double cx = setup.load.value("cx", 0.0), cy = setup.load.value("cy", 0.0);
        const double width = setup.load.value("width", 0.25);
        const auto amp = setup.load.at("amplitude");
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double r2 = (mesh.vertices[v] - Vec2(cx, cy)).squaredNorm();
            const double g = std::exp(-r2 / (2.0 * width * width));
            for (int i = 0; i < N; ++i) f(v, i) = amp.at(static_cast<size_t>(i)).get<double>() * g;
        }
    } else if (kind == "harmonic_poly") {
        const double a = setup.load.value("amplitude", 1.0);
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Vec2& x = mesh.vertices[v];
            for (int i = 0; i < N; ++i) f(v, i) = a * (x.x() * x.x() - x.y() * x.y());
        }
    } else if (kind == "csv") {
        const auto rows = read_csv(setup.load.at("path").get<std::string>());
        if (static_cast<int>(rows.size()) != mesh.num_vertices())
            throw std::invalid_argument("load csv: row count does not match the mesh");
        for (int v = 0; v < mesh.num_vertices(); ++v)
            for (int i = 0; i < N; ++i) f(v, i) = rows[static_cast<size_t>(v)].at(static_cast<size_t>(i));
    } else {
        throw std::invalid_argument("unknown load kind '" + kind + "'");
    }
    return f;
}

DiscreteField build_initial_field(const ProblemSetup& setup, std::shared_ptr<const Mesh> mesh) {
    DiscreteField field(std::move(mesh), setup.components);
    const std::string kind = setup.boundary.value("kind", std::string("zero"));
    if (kind == "zero") {
        field.apply_dirichlet([&](const Vec2&) { return Eigen::VectorXd::Zero(setup.components); });
    } else if (kind == "linear") {
        const auto xi0 = setup.boundary.at("xi0");
        GradMat g(setup.components, 2);
        for (int i = 0; i < setup.components; ++i)
            for (int c = 0; c < 2; ++c)
                g(i, c) = xi0.at(static_cast<size_t>(i)).at(static_cast<size_t>(c)).get<double>();
        // interpolate the linear function everywhere so the initial field is
        // already the minimizer candidate
        for (int v = 0; v < field.mesh().num_vertices(); ++v)
            field.values().row(v) = (g * field.mesh().vertices[v]).transpose();
        field.update_gradients();
    } else {
        throw std::invalid_argument("unknown boundary kind '" + kind + "'");
    }
    return field;
}

namespace {

json make_manifest(const std::string& command, const json& config, const ProblemSetup* setup,
                   std::uint64_t seed, bool deterministic,
                   const std::vector<std::string>& outputs) {
    json m{{"command", command},
           {"config_hash", config_hash(config)},
           {"seed", seed},
           {"deterministic", deterministic},
           {"outputs", outputs},
           {"timestamp", utc_timestamp()}};
    if (setup) {
        m["params"] = to_json(setup->params);
        m["mesh_spec"] = to_json(setup->mesh_spec);
        m["components"] = setup->components;
        if (!setup->preset.empty()) m["preset"] = setup->preset;
    }
    return m;
}

struct CommonOpts {
    std::uint64_t seed;
    bool deterministic;
    fs::path out_dir;
};

CommonOpts common_opts(const json& config, const RunOverrides& ov, const fs::path& fallback_dir) {
    CommonOpts c;
    c.seed = ov.seed ? *ov.seed : config.value("seed", std::uint64_t{42});
    c.deterministic = ov.deterministic ? *ov.deterministic : config.value("deterministic", true);
    c.out_dir = ov.out_dir ? fs::path(*ov.out_dir) : fallback_dir;
    return c;
}

// Facet summary attached to every solve: the generic relative-threshold
// fraction plus a plug estimate at the gradient scale (b eps^2/2)^{1/3} of
// the regularized profile's transition layer.
json facet_summary(const DiscreteField& field, const ModelParams& mp) {
    double max_du = 0.0;
    for (int t = 0; t < field.mesh().num_triangles(); ++t)
        max_du = std::max(max_du, field.gradient(t).norm());
    const double th_rel = 1e-3 * max_du;
    double frac_rel = 0.0;
    facet_mask(field, th_rel, &frac_rel);
    const double th_plug = std::cbrt(mp.b * mp.epsilon * mp.epsilon / 2.0);
    double frac_plug = 0.0;
    facet_mask(field, th_plug, &frac_plug);
    const double flagged_area = frac_plug * field.mesh().total_area();
    return json{{"max_du", max_du},
                {"threshold_rel_max", th_rel},
                {"facet_fraction_rel_max", frac_rel},
                {"threshold_plug_scale", th_plug},
                {"facet_fraction_plug_scale", frac_plug},
                {"plug_radius_estimate", std::sqrt(flagged_area / M_PI)}};
}

void write_facet_mask_csv(const fs::path& dir, const DiscreteField& field, double threshold) {
    std::vector<std::vector<double>> rows;
    const auto mask = facet_mask(field, threshold);
    for (size_t t = 0; t < mask.size(); ++t)
        rows.push_back({static_cast<double>(t), static_cast<double>(mask[t])});
    write_csv(dir / "facet_mask.csv", {"triangle", "flagged"}, rows);
}

}  // namespace

int run_solve_into(const json& config, const fs::path& dir, const RunOverrides& ov) {
    const CommonOpts opts = common_opts(config, ov, dir);
    if (!config.contains("solve")) throw std::invalid_argument("config: missing solve section");
    const ProblemSetup setup = expand_problem(config["solve"], config);
    auto mesh = std::make_shared<const Mesh>(build_mesh(setup.mesh_spec));
    validate_mesh(*mesh);
    const Eigen::MatrixXd f = build_load(setup, *mesh);
    const DiscreteField init = build_initial_field(setup, mesh);

    fs::create_directories(dir);
    write_json_file(dir / "config.json", config);

    int exit_code = kExitOk;
    SolveReport report;
    std::optional<DiscreteField> solution;
    try {
        auto [u, rep] = minimize(init, f, setup.params, setup.tolerance);
        report = rep;
        solution = std::move(u);
    } catch (const NonConvergence& e) {
        report = e.report;
        report.error = e.what();
        exit_code = kExitNonConvergence;
    }

    std::vector<std::string> outputs = {"config.json", "mesh_vertices.csv", "mesh_triangles.csv",
                                        "u.csv", "du.csv", "solve_report.json"};
    write_mesh_csv(dir, *mesh);
    const DiscreteField& out_field = solution ? *solution : init;
    write_field_csv(dir, out_field);
    json rep_json = to_json(report);
    if (solution) {
        rep_json["facets"] = facet_summary(*solution, setup.params);
        write_facet_mask_csv(dir, *solution,
                             rep_json["facets"]["threshold_plug_scale"].get<double>());
        outputs.push_back("facet_mask.csv");
    }
    write_json_file(dir / "solve_report.json", rep_json);
    write_json_file(dir / "manifest.json",
                    make_manifest("solve", config, &setup, opts.seed, opts.deterministic, outputs));
    return exit_code;
}

int cmd_verify(const std::string& config_path, const RunOverrides& ov) {
    json config;
    SweepConfig sweep;
    std::vector<std::string> suites;
    fs::path out;
    try {
        config = load_json_file(config_path);
        const json section = config.value("verify", json::object());
        sweep = sweep_config_from_json(section);
        if (!section.contains("suites") || section["suites"].empty())
            throw std::invalid_argument("verify config: no suites selected");
        for (const auto& s : section["suites"]) {
            const std::string id = s.get<std::string>();
            if (id != "all" && !is_known_inequality(id))
                throw std::invalid_argument("verify config: unknown suite '" + id + "'");
            suites.push_back(id);
        }
        if (ov.seed) sweep.seed = *ov.seed;
        out = ov.out_dir ? fs::path(*ov.out_dir) : fs::path(config_path).parent_path();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    SweepReport report;
    try {
        report = run_sweep(sweep, suites);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    fs::create_directories(out);
    write_json_file(out / "sweep_report.json", to_json(report));
    for (const auto& r : report.results)
        std::cout << r.id << ": checked=" << r.checked << " violations=" << r.violations
                  << " worst_margin=" << format_double(r.worst_margin)
                  << " empirical_constant=" << format_double(r.empirical_constant) << "\n";
    if (!report.pass()) {
        std::cerr << "verify: " << report.total_violations() << " violation(s)\n";
        return kExitViolations;
    }
    return kExitOk;
}

int cmd_solve(const std::string& config_path, const RunOverrides& ov) {
    try {
        const json config = load_json_file(config_path);
        const fs::path fallback = fs::path(config_path).parent_path() / "solve_run";
        const CommonOpts opts = common_opts(config, ov, fallback);
        return run_solve_into(config, opts.out_dir, ov);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_ladder(const std::string& config_path, const RunOverrides& ov) {
    json config;
    try {
        config = load_json_file(config_path);
        if (!config.contains("ladder")) throw std::invalid_argument("config: missing ladder section");
        const json& section = config["ladder"];
        const ProblemSetup setup = expand_problem(section, config);
        std::vector<double> epsilons;
        for (const auto& e : section.at("epsilons")) epsilons.push_back(e.get<double>());
        const double delta = section.value("delta", setup.params.delta);

        const fs::path fallback = fs::path(config_path).parent_path() / "ladder_run";
        const CommonOpts opts = common_opts(config, ov, fallback);
        auto mesh = std::make_shared<const Mesh>(build_mesh(setup.mesh_spec));
        validate_mesh(*mesh);
        const Eigen::MatrixXd f = build_load(setup, *mesh);
        const DiscreteField init = build_initial_field(setup, mesh);

        auto [fields, ladder] = solve_ladder(init, f, setup.params, epsilons, delta, setup.tolerance);

        fs::create_directories(opts.out_dir);
        write_json_file(opts.out_dir / "config.json", config);
        write_mesh_csv(opts.out_dir, *mesh);
        std::vector<std::string> outputs = {"config.json", "mesh_vertices.csv",
                                            "mesh_triangles.csv", "ladder_report.json"};
        size_t field_idx = 0;
        for (size_t j = 0; j < ladder.levels.size(); ++j) {
            if (!ladder.levels[j].solved) continue;
            char sub[32];
            std::snprintf(sub, sizeof(sub), "level_%02zu", j);
            const fs::path lvl = opts.out_dir / sub;
            fs::create_directories(lvl);
            write_field_csv(lvl, fields.at(field_idx));
            write_json_file(lvl / "solve_report.json", to_json(ladder.levels[j].report));
            outputs.push_back(std::string(sub) + "/u.csv");
            outputs.push_back(std::string(sub) + "/du.csv");
            outputs.push_back(std::string(sub) + "/solve_report.json");
            ++field_idx;
        }
        write_json_file(opts.out_dir / "ladder_report.json", to_json(ladder));
        write_json_file(opts.out_dir / "manifest.json",
                        make_manifest("ladder", config, &setup, opts.seed, opts.deterministic, outputs));
        for (const auto& level : ladder.levels)
            if (!level.solved) return kExitNonConvergence;
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_regularity(const std::string& run_dir, const RunOverrides& ov) {
    try {
        const fs::path dir(run_dir);
        if (!fs::exists(dir / "manifest.json"))
            throw std::invalid_argument("regularity: '" + run_dir + "' is not a run directory");
        const json manifest = load_json_file(dir / "manifest.json");
        const json config = load_json_file(dir / "config.json");
        const std::string command = manifest.value("command", std::string());

        // the field to analyze: the solve output, or the final ladder level
        fs::path field_dir = dir;
        if (command == "ladder") {
            fs::path last;
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_directory() && entry.path().filename().string().rfind("level_", 0) == 0)
                    if (last.empty() || entry.path().filename().string() > last.filename().string())
                        last = entry.path();
            if (last.empty()) throw std::invalid_argument("regularity: ladder run has no solved level");
            field_dir = last;
        }

        auto mesh = std::make_shared<const Mesh>(read_mesh_csv(dir));
        DiscreteField field = read_field_csv(field_dir, mesh);
        ModelParams mp = params_from_json(manifest.at("params"));
        if (command == "ladder") {
            const json ladder_rep = load_json_file(dir / "ladder_report.json");
            for (const auto& lvl : ladder_rep.at("levels"))
                if (lvl.value("solved", false)) mp.epsilon = lvl.at("epsilon").get<double>();
        }

        const json section = config.value("regularity", json::object());
        const CommonOpts opts = common_opts(config, ov, dir);
        const std::uint64_t seed = opts.seed;

        RegularityReport report;
        const auto v = v_eps_field(field, mp);
        for (double x : v) report.sup_v = std::max(report.sup_v, x);

        double max_du = 0.0;
        for (int t = 0; t < field.mesh().num_triangles(); ++t)
            max_du = std::max(max_du, field.gradient(t).norm());
        json th = section.value("facet_threshold", json{{"kind", "rel_max"}, {"value", 1e-3}});
        const std::string th_kind = th.value("kind", std::string("rel_max"));
        if (th_kind == "rel_max")
            report.facet_threshold = th.value("value", 1e-3) * max_du;
        else if (th_kind == "plug_scale")
            report.facet_threshold = std::cbrt(mp.b * mp.epsilon * mp.epsilon / 2.0);
        else
            report.facet_threshold = th.value("value", 0.0);
        facet_mask(field, report.facet_threshold, &report.facet_fraction);

        if (section.contains("superlevel"))
            for (const auto& s : section["superlevel"]) {
                RegularityReport::SuperlevelRow row;
                row.x0 = Vec2(s.at("x0").at(0).get<double>(), s.at("x0").at(1).get<double>());
                row.rho = s.at("rho").get<double>();
                row.mu = s.at("mu").get<double>();
                row.nu = s.at("nu").get<double>();
                row.fraction = superlevel_measure(field, row.x0, row.rho, row.mu, row.nu, mp);
                report.superlevels.push_back(row);
            }

        const double reg_delta = section.value("delta", mp.delta);
        ModelParams reg_mp = mp;
        reg_mp.delta = reg_delta;
        if (section.contains("excess_balls"))
            for (const auto& e : section["excess_balls"]) {
                RegularityReport::ExcessRow row;
                row.x0 = Vec2(e.at("x0").at(0).get<double>(), e.at("x0").at(1).get<double>());
                row.r = e.at("r").get<double>();
                row.phi = excess(field, row.x0, row.r, ExcessVariant::Phi, reg_mp);
                row.psi = excess(field, row.x0, row.r, ExcessVariant::Psi2DeltaEps, reg_mp);
                report.excess_table.push_back(row);
            }

        const std::int64_t budget = section.value("pair_budget", std::int64_t{200000});
        std::vector<std::array<double, 2>> cloud;
        report.holder = holder_seminorm(field, reg_delta, mp, budget, seed, &cloud);

        if (section.contains("lipschitz_balls")) {
            std::vector<BallSpec> balls;
            for (const auto& b : section["lipschitz_balls"]) {
                BallSpec spec;
                spec.x0 = Vec2(b.at("x0").at(0).get<double>(), b.at("x0").at(1).get<double>());
                spec.rho = b.at("rho").get<double>();
                spec.theta = b.value("theta", 0.5);
                balls.push_back(spec);
            }
            const ProblemSetup setup = expand_problem(
                config.contains("solve") ? config["solve"] : config["ladder"], config);
            const Eigen::MatrixXd f = build_load(setup, *mesh);
            const double q = section.value("q", std::numeric_limits<double>::infinity());
            report.lipschitz = lipschitz_diagnostic(field, balls, f, q, mp);
        }

        write_json_file(dir / "regularity_report.json", to_json(report));
        std::vector<std::vector<double>> excess_rows;
        for (const auto& e : report.excess_table)
            excess_rows.push_back({e.x0.x(), e.x0.y(), e.r, e.phi, e.psi});
        write_csv(dir / "excess_table.csv", {"x", "y", "r", "phi", "psi"}, excess_rows);
        std::vector<std::vector<double>> cloud_rows;
        cloud_rows.reserve(cloud.size());
        for (const auto& p : cloud) cloud_rows.push_back({p[0], p[1]});
        write_csv(dir / "holder_pairs.csv", {"dx", "dG"}, cloud_rows);

        // record the new outputs in the manifest
        json updated = manifest;
        auto outs = updated.value("outputs", json::array());
        for (const char* name : {"regularity_report.json", "excess_table.csv", "holder_pairs.csv"}) {
            bool present = false;
            for (const auto& o : outs)
                if (o == name) present = true;
            if (!present) outs.push_back(name);
        }
        updated["outputs"] = outs;
        write_json_file(dir / "manifest.json", updated);
        return kExitOk;
    } catch (const EmptyBall& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace facetflow
