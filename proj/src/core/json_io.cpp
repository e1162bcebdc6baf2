#include "core/json_io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace facetflow {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json to_json(const ModelParams& mp) {
    return json{{"b", mp.b},         {"p", mp.p},         {"gamma", mp.gamma},
                {"Gamma", mp.Gamma}, {"beta0", mp.beta0}, {"delta", mp.delta},
                {"epsilon", mp.epsilon}};
}

ModelParams params_from_json(const json& j) {
    ModelParams mp;
    mp.b = j.at("b").get<double>();
    mp.p = j.at("p").get<double>();
    mp.delta = j.value("delta", 0.25);
    mp.epsilon = j.value("epsilon", 0.0);
    mp.gamma = j.contains("gamma") && !j["gamma"].is_null() ? j["gamma"].get<double>()
                                                            : model_gamma(mp.p);
    mp.Gamma = j.contains("Gamma") && !j["Gamma"].is_null() ? j["Gamma"].get<double>()
                                                            : model_Gamma(mp.p);
    mp.beta0 = j.value("beta0", 1.0);
    mp.validate();
    return mp;
}

json to_json(const SweepConfig& cfg) {
    json dims = json::array();
    for (const auto& [N, n] : cfg.dims) dims.push_back(json::array({N, n}));
    json grid = json::array();
    for (const auto& mp : cfg.param_grid) grid.push_back(to_json(mp));
    return json{{"seed", cfg.seed},
                {"samples", cfg.samples},
                {"dims", dims},
                {"radius_range", json::array({cfg.radius_range.first, cfg.radius_range.second})},
                {"param_grid", grid},
                {"workers", cfg.workers}};
}

SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.samples = j.value("samples", std::int64_t{100000});
    if (j.contains("dims")) {
        cfg.dims.clear();
        for (const auto& d : j["dims"]) cfg.dims.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
    }
    if (j.contains("radius_range"))
        cfg.radius_range = {j["radius_range"].at(0).get<double>(),
                            j["radius_range"].at(1).get<double>()};
    if (j.contains("param_grid"))
        for (const auto& p : j["param_grid"]) cfg.param_grid.push_back(params_from_json(p));
    cfg.workers = j.value("workers", 0);
    cfg.validate();
    return cfg;
}

namespace {

json to_json(const Witness& w) {
    return json{{"param_index", w.param_index},
                {"dim_index", w.dim_index},
                {"rows", w.rows},
                {"cols", w.cols},
                {"xi0", w.xi0},
                {"xi1", w.xi1},
                {"aux", w.aux},
                {"lhs", w.lhs},
                {"rhs", w.rhs},
                {"margin", w.margin}};
}

}  // namespace

json to_json(const SweepReport& report) {
    json res = json::array();
    for (const auto& r : report.results) {
        json wit = json::array();
        for (const auto& w : r.witnesses) wit.push_back(to_json(w));
        res.push_back(json{{"id", r.id},
                           {"checked", r.checked},
                           {"violations", r.violations},
                           {"skipped", r.skipped},
                           {"worst_margin", r.worst_margin},
                           {"empirical_constant", r.empirical_constant},
                           {"witnesses", wit}});
    }
    return json{{"schema", "facetflow/sweep-report/v1"},
                {"pass", report.pass()},
                {"config", to_json(report.config)},
                {"inequalities", res}};
}

json to_json(const SolveReport& report) {
    return json{{"converged", report.converged},
                {"newton_iters", report.newton_iters},
                {"linesearch_backtracks", report.linesearch_backtracks},
                {"residual_norm", report.residual_norm},
                {"energy_trace", report.energy_trace},
                {"params", to_json(report.params)},
                {"error", report.error}};
}

json to_json(const LadderReport& report) {
    json levels = json::array();
    for (const auto& l : report.levels) {
        levels.push_back(json{{"epsilon", l.epsilon},
                              {"solved", l.solved},
                              {"error", l.error},
                              {"ddu_lp", l.ddu_lp},
                              {"dg_sup", l.dg_sup},
                              {"report", to_json(l.report)}});
    }
    return json{{"schema", "facetflow/ladder-report/v1"}, {"delta", report.delta}, {"levels", levels}};
}

json to_json(const HolderFit& fit) {
    return json{{"alpha", fit.alpha},       {"constant", fit.constant},
                {"residual", fit.residual}, {"bins_used", fit.bins_used},
                {"pairs_used", fit.pairs_used}, {"status", fit.status}};
}

json to_json(const MeshSpec& spec) {
    return json{{"kind", spec.kind}, {"x0", spec.x0},        {"y0", spec.y0}, {"x1", spec.x1},
                {"y1", spec.y1},     {"radius", spec.radius}, {"nx", spec.nx}, {"ny", spec.ny}};
}

MeshSpec mesh_spec_from_json(const json& j) {
    MeshSpec s;
    s.kind = j.value("kind", std::string("rectangle"));
    s.x0 = j.value("x0", 0.0);
    s.y0 = j.value("y0", 0.0);
    s.x1 = j.value("x1", 1.0);
    s.y1 = j.value("y1", 1.0);
    s.radius = j.value("radius", 1.0);
    s.nx = j.value("nx", j.value("ncell", 32));
    s.ny = j.value("ny", j.value("ncell", s.nx));
    return s;
}

json to_json(const ToleranceSpec& tol) {
    return json{{"residual", tol.residual},
                {"max_iters", tol.max_iters},
                {"energy_decrease", tol.energy_decrease},
                {"cg_rel_tol", tol.cg_rel_tol}};
}

ToleranceSpec tolerance_from_json(const json& j) {
    ToleranceSpec tol;
    tol.residual = j.value("residual", tol.residual);
    tol.max_iters = j.value("max_iters", tol.max_iters);
    tol.energy_decrease = j.value("energy_decrease", tol.energy_decrease);
    tol.cg_rel_tol = j.value("cg_rel_tol", tol.cg_rel_tol);
    return tol;
}

json to_json(const RegularityReport& report) {
    json superlevels = json::array();
    for (const auto& s : report.superlevels)
        superlevels.push_back(json{{"x0", json::array({s.x0.x(), s.x0.y()})},
                                   {"rho", s.rho},
                                   {"mu", s.mu},
                                   {"nu", s.nu},
                                   {"fraction", s.fraction}});
    json excess_rows = json::array();
    for (const auto& e : report.excess_table)
        excess_rows.push_back(json{{"x0", json::array({e.x0.x(), e.x0.y()})},
                                   {"r", e.r},
                                   {"phi", e.phi},
                                   {"psi", e.psi}});
    json lip = json::array();
    for (const auto& l : report.lipschitz)
        lip.push_back(json{{"x0", json::array({l.ball.x0.x(), l.ball.x0.y()})},
                           {"rho", l.ball.rho},
                           {"theta", l.ball.theta},
                           {"sup_v_inner", l.sup_v_inner},
                           {"f_lq", l.f_lq},
                           {"v_lp", l.v_lp},
                           {"gap", l.gap}});
    return json{{"schema", "facetflow/regularity-report/v1"},
                {"facet_threshold", report.facet_threshold},
                {"facet_fraction", report.facet_fraction},
                {"sup_v", report.sup_v},
                {"superlevels", superlevels},
                {"excess_table", excess_rows},
                {"holder_fit", to_json(report.holder)},
                {"lipschitz", lip}};
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string config_hash(const json& j) {
    const std::string dump = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            first = false;
            if (header) {
                while (std::getline(ss, cell, ',')) header->push_back(cell);
            }
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_mesh_csv(const std::filesystem::path& dir, const Mesh& mesh) {
    std::vector<std::vector<double>> vrows;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        vrows.push_back({mesh.vertices[v].x(), mesh.vertices[v].y(),
                         mesh.boundary[v] ? 1.0 : 0.0});
    write_csv(dir / "mesh_vertices.csv", {"x", "y", "boundary"}, vrows);
    std::vector<std::vector<double>> trows;
    for (const auto& t : mesh.triangles)
        trows.push_back({static_cast<double>(t[0]), static_cast<double>(t[1]),
                         static_cast<double>(t[2])});
    write_csv(dir / "mesh_triangles.csv", {"v0", "v1", "v2"}, trows);
}

void write_field_csv(const std::filesystem::path& dir, const DiscreteField& field) {
    std::vector<std::string> uh;
    for (int i = 0; i < field.components(); ++i) uh.push_back("u" + std::to_string(i));
    std::vector<std::vector<double>> urows;
    for (int v = 0; v < field.mesh().num_vertices(); ++v) {
        std::vector<double> row;
        for (int i = 0; i < field.components(); ++i) row.push_back(field.values()(v, i));
        urows.push_back(std::move(row));
    }
    write_csv(dir / "u.csv", uh, urows);
    std::vector<std::string> dh;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < field.components(); ++i)
            dh.push_back("du" + std::to_string(i) + std::to_string(c));
    std::vector<std::vector<double>> drows;
    for (int t = 0; t < field.mesh().num_triangles(); ++t) {
        std::vector<double> row;
        for (int k = 0; k < field.gradients().cols(); ++k) row.push_back(field.gradients()(t, k));
        drows.push_back(std::move(row));
    }
    write_csv(dir / "du.csv", dh, drows);
}

Mesh read_mesh_csv(const std::filesystem::path& dir) {
    Mesh mesh;
    const auto vrows = read_csv(dir / "mesh_vertices.csv");
    for (const auto& r : vrows) {
        mesh.vertices.emplace_back(r.at(0), r.at(1));
        mesh.boundary.push_back(r.at(2) != 0.0);
    }
    const auto trows = read_csv(dir / "mesh_triangles.csv");
    for (const auto& r : trows)
        mesh.triangles.push_back({static_cast<int>(r.at(0)), static_cast<int>(r.at(1)),
                                  static_cast<int>(r.at(2))});
    // rebuild derived per-element data
    const int nt = mesh.num_triangles();
    mesh.area.resize(nt);
    mesh.basis_grad.resize(nt);
    mesh.centroid.resize(nt);
    mesh.lumped.assign(mesh.vertices.size(), 0.0);
    double hmin = 0.0;
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const Vec2 d1 = b - a, d2 = c - a;
        const double det = d1.x() * d2.y() - d1.y() * d2.x();
        if (!(det > 0.0)) throw std::runtime_error("read_mesh_csv: degenerate triangle");
        mesh.area[t] = 0.5 * det;
        mesh.basis_grad[t][0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
        mesh.basis_grad[t][1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
        mesh.basis_grad[t][2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
        mesh.centroid[t] = (a + b + c) / 3.0;
        for (int k = 0; k < 3; ++k) mesh.lumped[tri[k]] += mesh.area[t] / 3.0;
        hmin = std::max(hmin, std::max(d1.norm(), d2.norm()));
    }
    mesh.h = hmin;
    return mesh;
}

DiscreteField read_field_csv(const std::filesystem::path& dir, std::shared_ptr<const Mesh> mesh) {
    const auto urows = read_csv(dir / "u.csv");
    if (urows.empty()) throw std::runtime_error("read_field_csv: empty field");
    DiscreteField field(std::move(mesh), static_cast<int>(urows.front().size()));
    for (size_t v = 0; v < urows.size(); ++v)
        for (size_t i = 0; i < urows[v].size(); ++i)
            field.values()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(i)) = urows[v][i];
    field.update_gradients();
    return field;
}

}  // namespace facetflow
