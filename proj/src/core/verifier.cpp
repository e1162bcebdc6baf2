#include "core/verifier.hpp"

#include "core/density.hpp"
#include "core/rng.hpp"
#include "core/truncation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace facetflow {

namespace {

constexpr double kCDagger = 1.0 + 32.0 / (3.0 * 2.6457513110645905905016157536392604257);  // 1 + 32/(3 sqrt 7)
constexpr std::int64_t kChunk = 8192;

enum class Req { none, eps_positive, eps_below_delta, eps_below_quarter_delta };

struct IneqSpec {
    const char* id;
    bool pair;
    bool uses_dims;
    Req req;
    double slack;
};

const IneqSpec kSpecs[] = {
    {"g2delta_lipschitz", true, true, Req::eps_below_quarter_delta, kSweepSlack},
    {"bp_sandwich", false, true, Req::eps_positive, kSweepSlack},
    {"b1_sandwich", false, true, Req::eps_positive, kSweepSlack},
    {"monotonicity", true, true, Req::none, 1e-12},
    {"a1_growth", true, true, Req::none, kSweepSlack},
    {"truncation_proximity", false, true, Req::eps_below_delta, kSweepSlack},
    {"chain_bound", false, true, Req::eps_below_delta, kSweepSlack},
    {"convexity", true, true, Req::none, kSweepSlack},
    {"hessian_error", true, true, Req::eps_below_quarter_delta, kSweepSlack},
    {"g1_bounds", false, false, Req::none, kSweepSlack},
    {"selftest_violation", false, true, Req::none, kSweepSlack},
};

const IneqSpec& spec_for(const std::string& id) {
    for (const auto& s : kSpecs)
        if (id == s.id) return s;
    throw std::invalid_argument("unknown inequality id: " + id);
}

void check_param_for(const IneqSpec& s, const ModelParams& mp) {
    mp.validate();
    switch (s.req) {
        case Req::none: return;
        case Req::eps_positive:
            if (!(mp.epsilon > 0.0))
                throw std::invalid_argument(std::string(s.id) + ": requires epsilon > 0");
            return;
        case Req::eps_below_delta:
            if (!(mp.epsilon > 0.0 && mp.epsilon < mp.delta))
                throw std::invalid_argument(std::string(s.id) + ": requires 0 < epsilon < delta");
            return;
        case Req::eps_below_quarter_delta:
            if (!(mp.epsilon > 0.0 && mp.epsilon < mp.delta / 4.0))
                throw std::invalid_argument(std::string(s.id) +
                                            ": violates the constraint \"0<epsilon<delta/4\"");
            return;
    }
}

struct EvalOut {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    double ratio = 0.0;
    bool skipped = false;
};

double norm_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

GradMat to_mat(const std::vector<double>& v, int rows, int cols) {
    return unflatten(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                     rows, cols);
}

double rel_margin(double lhs, double rhs) {
    return (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

// Single evaluation path shared by the sweep and by witness replay.
EvalOut eval_core(const std::string& id, const ModelParams& mp, const Witness& w) {
    EvalOut out;
    if (id == "g1_bounds") {
        const double sigma = w.xi0.at(0), s1 = w.xi0.at(1), s2 = w.xi0.at(2);
        const double mu = w.aux;
        const double d1 = eval_g(sigma, GBranch::g1, 1, mp);
        const double d2 = eval_g(sigma, GBranch::g1, 2, mp);
        const double bound1 = mp.b / std::sqrt(sigma);
        const double bound2 = 0.5 * mp.b / (sigma * std::sqrt(sigma));
        double m = std::min(rel_margin(std::abs(d1), bound1), rel_margin(std::abs(d2), bound2));
        double ratio = std::max(std::abs(d1) / bound1, std::abs(d2) / bound2);
        const double dsig = std::abs(s1 - s2);
        if (dsig > 0.0) {
            const double lhs = std::abs(eval_g(s1, GBranch::g1, 2, mp) - eval_g(s2, GBranch::g1, 2, mp));
            const double rhs = 24.0 * mp.b * std::pow(mu, -5.0) * dsig;
            m = std::min(m, rel_margin(lhs, rhs));
            ratio = std::max(ratio, lhs / rhs);
        } else {
            out.skipped = true;
        }
        out.lhs = ratio;
        out.rhs = 1.0;
        out.margin = m;
        out.ratio = ratio;
        return out;
    }

    const GradMat xi0 = to_mat(w.xi0, w.rows, w.cols);
    const bool has_pair = !w.xi1.empty();
    GradMat xi1;
    if (has_pair) xi1 = to_mat(w.xi1, w.rows, w.cols);

    if (id == "g2delta_lipschitz") {
        const GradMat d = truncate_relaxed(xi1, 2.0 * mp.delta, mp.epsilon) -
                          truncate_relaxed(xi0, 2.0 * mp.delta, mp.epsilon);
        const double step = (xi1 - xi0).norm();
        out.lhs = d.norm();
        out.rhs = kCDagger * step;
        if (step == 0.0) {
            out.skipped = true;
            out.margin = rel_margin(out.lhs, 0.0);
        } else {
            out.ratio = out.lhs / step;
            out.margin = rel_margin(out.ratio, kCDagger);
        }
    } else if (id == "bp_sandwich") {
        const RadialEigs e = hessian_eigs(xi0, mp, HessPart::p);
        const double shape = std::pow(mp.epsilon * mp.epsilon + xi0.squaredNorm(), mp.p / 2.0 - 1.0);
        out.lhs = e.max();
        out.rhs = 3.0 * mp.Gamma * shape;
        out.margin = std::min(rel_margin(out.lhs, out.rhs), rel_margin(mp.gamma * shape, e.min()));
        out.ratio = e.max() / shape;
    } else if (id == "b1_sandwich") {
        const RadialEigs e = hessian_eigs(xi0, mp, HessPart::one);
        const double shape = 1.0 / std::sqrt(mp.epsilon * mp.epsilon + xi0.squaredNorm());
        out.lhs = e.max();
        out.rhs = mp.b * shape;
        out.margin = std::min(rel_margin(out.lhs, out.rhs), rel_margin(0.0, e.min()));
        out.ratio = e.max() / shape;
    } else if (id == "monotonicity") {
        const GradMat da = flux(xi1, mp) - flux(xi0, mp);
        const GradMat dx = xi1 - xi0;
        const double inner = (da.array() * dx.array()).sum();
        const double scale = std::pow(1.0 + xi0.norm() + xi1.norm(), 2.0 * mp.p);
        out.lhs = -inner;
        out.rhs = 0.0;
        out.margin = inner / scale;
        const double d2 = dx.squaredNorm();
        if (d2 > 0.0)
            out.ratio = inner / d2;
        else
            out.skipped = true;
    } else if (id == "a1_growth") {
        const double big = std::max(xi0.norm(), xi1.norm());
        if (big == 0.0) {
            out.skipped = true;
            return out;
        }
        const GradMat da = flux_part(xi1, mp, HessPart::one) - flux_part(xi0, mp, HessPart::one);
        const double step = (xi1 - xi0).norm();
        out.lhs = da.norm();
        out.rhs = 2.0 * mp.b * step / big;
        out.margin = rel_margin(out.lhs, out.rhs);
        if (step > 0.0) out.ratio = da.norm() * big / (mp.b * step);
        else out.skipped = true;
    } else if (id == "truncation_proximity") {
        const GradMat d =
            truncate_relaxed(xi0, mp.delta, mp.epsilon) - truncate(xi0, mp.delta);
        out.lhs = d.norm();
        out.rhs = mp.epsilon;
        out.margin = rel_margin(out.lhs, out.rhs);
        out.ratio = out.lhs / mp.epsilon;
    } else if (id == "chain_bound") {
        out.lhs = truncate_relaxed(xi0, 2.0 * mp.delta, mp.epsilon).norm();
        const double inner = truncate_relaxed(xi0, mp.delta, mp.epsilon).norm();
        out.rhs = std::max(inner - mp.delta, 0.0);
        out.margin = rel_margin(out.lhs, out.rhs);
        if (out.rhs > 0.0)
            out.ratio = out.lhs / out.rhs;
        else
            out.skipped = true;
    } else if (id == "convexity") {
        const double mid = energy_density(0.5 * (xi0 + xi1), mp);
        const double avg = 0.5 * (energy_density(xi0, mp) + energy_density(xi1, mp));
        out.lhs = mid;
        out.rhs = avg;
        out.margin = rel_margin(mid, avg);
        if (avg > 0.0)
            out.ratio = mid / avg;
        else
            out.skipped = true;
    } else if (id == "hessian_error") {
        const double mu = w.aux;
        const Eigen::VectorXd step = flatten(xi1) - flatten(xi0);
        const Eigen::VectorXd lin = hessian(xi0, mp) * step;
        const GradMat da = flux(xi1, mp) - flux(xi0, mp);
        const double err = (lin - flatten(da)).norm();
        const double shape =
            std::pow(mu, mp.p - 2.0 - mp.beta0) * std::pow(step.norm(), 1.0 + mp.beta0);
        out.lhs = err;
        out.rhs = shape;
        if (shape > 0.0) {
            out.ratio = err / shape;
            out.margin = std::isfinite(out.ratio) ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
        } else {
            out.skipped = true;
        }
    } else if (id == "selftest_violation") {
        out.lhs = xi0.norm();
        out.rhs = 0.5 * xi0.norm();
        out.margin = rel_margin(out.lhs, out.rhs);
        out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
    } else {
        throw std::invalid_argument("unknown inequality id: " + id);
    }
    return out;
}

Witness draw_witness(const IneqSpec& s, Rng& rng, int rows, int cols, const SweepConfig& cfg,
                     const ModelParams& mp, std::int64_t sample_index) {
    Witness w;
    w.rows = rows;
    w.cols = cols;
    const double rmin = cfg.radius_range.first, rmax = cfg.radius_range.second;
    const std::string id = s.id;

    if (id == "g1_bounds") {
        const double sigma = rng.log_uniform(rmin, rmax);
        const double mu = rng.log_uniform(std::sqrt(rmin), std::sqrt(rmax));
        const double lo = mu * mu / 4.0, hi = 7.0 * mu * mu;
        w.xi0 = {sigma, rng.uniform(lo, hi), rng.uniform(lo, hi)};
        w.aux = mu;
        return w;
    }
    if (id == "hessian_error") {
        const double mu = mp.delta * rng.log_uniform(1.05, 1e4);
        const GradMat x0 = rng.uniform(mp.delta + mu / 4.0, mp.delta + mu) * rng.direction(rows, cols);
        GradMat x1;
        if (sample_index % 5 == 4) {
            const double step = rng.log_uniform(1e-13, 1e-6) * std::max(x0.norm(), 1.0);
            x1 = x0 + step * rng.direction(rows, cols);
        } else {
            x1 = rng.uniform(0.0, mp.delta + mu) * rng.direction(rows, cols);
        }
        if (x1.norm() > mp.delta + mu) x1 *= (mp.delta + mu) / x1.norm();
        w.aux = mu;
        const Eigen::VectorXd f0 = flatten(x0);
        const Eigen::VectorXd f1 = flatten(x1);
        w.xi0.assign(f0.data(), f0.data() + f0.size());
        w.xi1.assign(f1.data(), f1.data() + f1.size());
        return w;
    }

    // The first draw of the whole sweep pins xi = 0 so the degenerate corner
    // is always covered.
    GradMat x0 = (sample_index == 0 && !s.pair) ? GradMat::Zero(rows, cols)
                                                : rng.sample_matrix(rows, cols, rmin, rmax);
    const Eigen::VectorXd f0 = flatten(x0);
    w.xi0.assign(f0.data(), f0.data() + f0.size());
    if (s.pair) {
        GradMat x1;
        if (sample_index % 5 == 4) {  // near-degenerate pairs stress difference quotients
            const double step = rng.log_uniform(1e-13, 1e-6) * std::max(x0.norm(), 1.0);
            x1 = x0 + step * rng.direction(rows, cols);
        } else if (sample_index % 17 == 3) {
            x1 = GradMat::Zero(rows, cols);
        } else {
            x1 = rng.sample_matrix(rows, cols, rmin, rmax);
        }
        const Eigen::VectorXd f1 = flatten(x1);
        w.xi1.assign(f1.data(), f1.data() + f1.size());
    }
    return w;
}

struct ChunkAccum {
    std::int64_t checked = 0;
    std::int64_t violations = 0;
    std::int64_t skipped = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double empirical_constant = 0.0;
    std::optional<Witness> worst;
    std::vector<Witness> violators;
};

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

int resolve_workers(int requested) {
    int w = requested;
    if (w <= 0) {
        w = static_cast<int>(std::thread::hardware_concurrency());
        if (w <= 0) w = 1;
    }
    if (const char* cap = std::getenv("FACETFLOW_THREADS")) {
        const int c = std::atoi(cap);
        if (c > 0) w = std::min(w, c);
    }
    return std::max(1, w);
}

ChunkAccum run_chunk(const IneqSpec& s, const SweepConfig& cfg, const ModelParams& mp,
                     int param_idx, int dim_idx, int rows, int cols, std::int64_t chunk_idx,
                     std::int64_t begin, std::int64_t end) {
    const std::uint64_t key = fnv64(s.id) ^ (0x9E3779B97F4A7C15ULL * (param_idx + 1)) ^
                              (0xC2B2AE3D27D4EB4FULL * (dim_idx + 1)) ^
                              (0x165667B19E3779F9ULL * static_cast<std::uint64_t>(chunk_idx));
    Rng rng = Rng::substream(cfg.seed, key);
    ChunkAccum acc;
    for (std::int64_t i = begin; i < end; ++i) {
        Witness w = draw_witness(s, rng, rows, cols, cfg, mp, i);
        w.param_index = param_idx;
        w.dim_index = dim_idx;
        EvalOut out = eval_core(s.id, mp, w);
        ++acc.checked;
        if (out.skipped) ++acc.skipped;
        acc.empirical_constant = std::max(acc.empirical_constant, out.ratio);
        if (out.margin < acc.worst_margin) {
            acc.worst_margin = out.margin;
            w.lhs = out.lhs;
            w.rhs = out.rhs;
            w.margin = out.margin;
            acc.worst = w;
        }
        if (out.margin < -s.slack) {
            ++acc.violations;
            if (acc.violators.size() < 2) {
                w.lhs = out.lhs;
                w.rhs = out.rhs;
                w.margin = out.margin;
                acc.violators.push_back(w);
            }
        }
    }
    return acc;
}

InequalityResult sweep_one(const IneqSpec& s, const SweepConfig& cfg,
                           const std::vector<ModelParams>& grid) {
    InequalityResult res;
    res.id = s.id;
    const std::vector<std::pair<int, int>> dims =
        s.uses_dims ? cfg.dims : std::vector<std::pair<int, int>>{{1, 2}};
    const int workers = resolve_workers(cfg.workers);

    std::optional<Witness> global_worst;
    for (int pi = 0; pi < static_cast<int>(grid.size()); ++pi) {
        check_param_for(s, grid[pi]);
        for (int di = 0; di < static_cast<int>(dims.size()); ++di) {
            const auto [N, n] = dims[di];
            const std::int64_t nchunks = (cfg.samples + kChunk - 1) / kChunk;
            std::vector<ChunkAccum> accs(static_cast<size_t>(nchunks));
            std::atomic<std::int64_t> next{0};
            auto body = [&] {
                for (;;) {
                    const std::int64_t c = next.fetch_add(1);
                    if (c >= nchunks) return;
                    const std::int64_t b = c * kChunk;
                    const std::int64_t e = std::min(cfg.samples, b + kChunk);
                    accs[static_cast<size_t>(c)] =
                        run_chunk(s, cfg, grid[pi], pi, di, N, n, c, b, e);
                }
            };
            if (workers == 1 || nchunks == 1) {
                body();
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < std::min<std::int64_t>(workers, nchunks); ++t)
                    pool.emplace_back(body);
                for (auto& t : pool) t.join();
            }
            // merge is serial and in chunk order, so it does not depend on
            // how chunks were scheduled across workers
            for (const auto& a : accs) {
                res.checked += a.checked;
                res.violations += a.violations;
                res.skipped += a.skipped;
                res.empirical_constant = std::max(res.empirical_constant, a.empirical_constant);
                if (a.worst_margin < res.worst_margin) {
                    res.worst_margin = a.worst_margin;
                    global_worst = a.worst;
                }
                for (const auto& v : a.violators)
                    if (res.witnesses.size() < 8) res.witnesses.push_back(v);
            }
        }
    }
    if (global_worst && res.witnesses.empty()) res.witnesses.push_back(*global_worst);
    return res;
}

}  // namespace

void SweepConfig::validate() const {
    if (samples < 1) throw std::invalid_argument("SweepConfig: samples must be >= 1");
    if (dims.empty()) throw std::invalid_argument("SweepConfig: dims must be non-empty");
    for (const auto& [N, n] : dims)
        if (N < 1 || n < 2) throw std::invalid_argument("SweepConfig: need N >= 1, n >= 2");
    if (!(radius_range.first > 0.0 && radius_range.first <= radius_range.second))
        throw std::invalid_argument("SweepConfig: radius_range must be positive and ordered");
}

std::vector<ModelParams> SweepConfig::default_param_grid() {
    std::vector<ModelParams> grid;
    for (double p : {1.5, 2.0, 3.0})
        for (double b : {0.25, 1.0, 2.0})
            for (auto [d, e] : {std::pair{0.5, 0.1}, std::pair{0.2, 0.04}})
                grid.push_back(ModelParams::model(b, p, d, e));
    return grid;
}

bool SweepReport::pass() const { return total_violations() == 0; }

std::int64_t SweepReport::total_violations() const {
    std::int64_t v = 0;
    for (const auto& r : results) v += r.violations;
    return v;
}

const std::vector<std::string>& known_inequalities() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& s : kSpecs) v.emplace_back(s.id);
        return v;
    }();
    return ids;
}

bool is_known_inequality(const std::string& id) {
    for (const auto& s : kSpecs)
        if (id == s.id) return true;
    return false;
}

SweepReport run_sweep(const SweepConfig& config, const std::vector<std::string>& suite) {
    config.validate();
    if (suite.empty()) throw std::invalid_argument("run_sweep: no suites selected");
    std::vector<std::string> ids;
    for (const auto& s : suite) {
        if (s == "all") {
            for (const auto& k : kSpecs)
                if (std::string(k.id) != "selftest_violation") ids.emplace_back(k.id);
        } else {
            ids.push_back(s);
        }
    }
    const auto grid = config.param_grid.empty() ? SweepConfig::default_param_grid() : config.param_grid;
    SweepReport report;
    report.config = config;
    report.config.param_grid = grid;
    for (const auto& id : ids) report.results.push_back(sweep_one(spec_for(id), config, grid));
    return report;
}

SweepReport check_g1_bounds(const SweepConfig& config) {
    return run_sweep(config, {"g1_bounds"});
}

double calibrate_constant(const std::string& inequality_id, const SweepConfig& config,
                          std::int64_t* skipped) {
    SweepReport rep = run_sweep(config, {inequality_id});
    if (skipped) *skipped = rep.results.at(0).skipped;
    return rep.results.at(0).empirical_constant;
}

double replay_witness(const std::string& inequality_id, const Witness& w,
                      const SweepConfig& config) {
    const auto grid = config.param_grid.empty() ? SweepConfig::default_param_grid() : config.param_grid;
    const ModelParams& mp = grid.at(static_cast<size_t>(w.param_index));
    return eval_core(inequality_id, mp, w).margin;
}

}  // namespace facetflow
