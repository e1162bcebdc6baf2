#include "core/regularity.hpp"

#include "core/rng.hpp"
#include "core/truncation.hpp"

#include <cmath>

namespace facetflow {

std::vector<double> v_eps_field(const DiscreteField& field, const ModelParams& mp) {
    std::vector<double> v(static_cast<size_t>(field.mesh().num_triangles()));
    for (int t = 0; t < field.mesh().num_triangles(); ++t)
        v[static_cast<size_t>(t)] =
            std::sqrt(mp.epsilon * mp.epsilon + field.gradient(t).squaredNorm());
    return v;
}

std::vector<double> u_delta_eps_field(const DiscreteField& field, const ModelParams& mp) {
    std::vector<double> u = v_eps_field(field, mp);
    for (double& x : u) {
        const double s = std::max(x - mp.delta, 0.0);
        x = s * s;
    }
    return u;
}

std::vector<char> facet_mask(const DiscreteField& field, double threshold, double* fraction) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("facet_mask: threshold must be >= 0");
    const Mesh& m = field.mesh();
    std::vector<char> mask(static_cast<size_t>(m.num_triangles()), 0);
    double flagged = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        if (field.gradient(t).norm() <= threshold) {
            mask[static_cast<size_t>(t)] = 1;
            flagged += m.area[t];
        }
    }
    if (fraction) *fraction = flagged / m.total_area();
    return mask;
}

namespace {

std::vector<int> triangles_in_ball(const Mesh& m, const Vec2& x0, double rho) {
    std::vector<int> in;
    for (int t = 0; t < m.num_triangles(); ++t)
        if ((m.centroid[t] - x0).norm() <= rho) in.push_back(t);
    if (in.empty())
        throw EmptyBall("no triangle centroid inside the requested ball");
    return in;
}

}  // namespace

double superlevel_measure(const DiscreteField& field, const Vec2& x0, double rho, double mu,
                          double nu, const ModelParams& mp) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("superlevel_measure: nu must be in (0,1)");
    const Mesh& m = field.mesh();
    const auto in = triangles_in_ball(m, x0, rho);
    const auto v = v_eps_field(field, mp);
    double total = 0.0, above = 0.0;
    for (int t : in) {
        total += m.area[t];
        if (v[static_cast<size_t>(t)] - mp.delta > (1.0 - nu) * mu) above += m.area[t];
    }
    return above / total;
}

double excess(const DiscreteField& field, const Vec2& x0, double r, ExcessVariant variant,
              const ModelParams& mp) {
    const Mesh& m = field.mesh();
    const auto in = triangles_in_ball(m, x0, r);
    const int N = field.components();
    auto w_of = [&](int t) -> GradMat {
        const GradMat du = field.gradient(t);
        if (variant == ExcessVariant::Phi) return du;
        return truncate_relaxed(du, 2.0 * mp.delta, mp.epsilon);
    };
    // mean anchored at the first element so an exactly constant field gives
    // an exact zero
    const GradMat anchor = w_of(in.front());
    GradMat shift = GradMat::Zero(N, 2);
    double total = 0.0;
    for (int t : in) {
        shift += m.area[t] * (w_of(t) - anchor);
        total += m.area[t];
    }
    const GradMat mean = anchor + shift / total;
    double acc = 0.0;
    for (int t : in) acc += m.area[t] * (w_of(t) - mean).squaredNorm();
    return acc / total;
}

HolderFit holder_seminorm(const DiscreteField& field, double delta, const ModelParams& mp,
                          std::int64_t pair_budget, std::uint64_t seed,
                          std::vector<std::array<double, 2>>* pair_cloud) {
    if (pair_budget < 100)
        throw std::invalid_argument("holder_seminorm: pair budget must be at least 100");
    if (!(delta > 4.0 * mp.epsilon))
        throw std::invalid_argument("holder_seminorm: requires delta > 4*epsilon");
    const Mesh& m = field.mesh();
    const int T = m.num_triangles();
    if (T < 2) throw std::invalid_argument("holder_seminorm: not enough triangles");

    std::vector<GradMat> g(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t)
        g[static_cast<size_t>(t)] = truncate_relaxed(field.gradient(t), 2.0 * delta, mp.epsilon);

    const double diam = m.diameter();
    const double lo = std::log(1e-2 * diam), hi = std::log(diam);
    constexpr int kBins = 32;

    // one representative triangle per cell of a uniform grid, for the
    // stratified half of the pair budget
    const double cell = 1e-2 * diam;
    Vec2 mn = m.centroid[0];
    for (const auto& c : m.centroid) mn = mn.cwiseMin(c);
    int nx = 0, ny = 0;
    std::vector<int> rep;
    {
        for (const auto& c : m.centroid) {
            nx = std::max(nx, static_cast<int>((c.x() - mn.x()) / cell) + 1);
            ny = std::max(ny, static_cast<int>((c.y() - mn.y()) / cell) + 1);
        }
        rep.assign(static_cast<size_t>(nx) * ny, -1);
        for (int t = 0; t < T; ++t) {
            const int i = static_cast<int>((m.centroid[t].x() - mn.x()) / cell);
            const int j = static_cast<int>((m.centroid[t].y() - mn.y()) / cell);
            rep[static_cast<size_t>(j) * nx + i] = t;
        }
    }

    Rng rng(seed);
    std::array<double, kBins> env{};
    env.fill(0.0);
    std::int64_t used = 0;
    double sup_dg = 0.0;
    auto feed = [&](int a, int b) {
        if (a == b) return;
        const double dx = (m.centroid[a] - m.centroid[b]).norm();
        const double dg = (g[static_cast<size_t>(a)] - g[static_cast<size_t>(b)]).norm();
        ++used;
        sup_dg = std::max(sup_dg, dg);
        if (pair_cloud) pair_cloud->push_back({dx, dg});
        if (dx <= 0.0 || dg <= 0.0) return;
        const double pos = (std::log(dx) - lo) / (hi - lo) * kBins;
        if (pos < 0.0 || pos >= kBins) return;
        const int bin = static_cast<int>(pos);
        env[static_cast<size_t>(bin)] = std::max(env[static_cast<size_t>(bin)], dg);
    };
    const std::int64_t half = pair_budget / 2;
    for (std::int64_t k = 0; k < half; ++k)
        feed(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(T))),
             static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(T))));
    for (std::int64_t k = half; k < pair_budget; ++k) {
        const int a = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(T)));
        const double s = std::exp(rng.uniform(lo, hi));
        const double th = rng.uniform(0.0, 6.283185307179586476925286766559);
        const Vec2 target = m.centroid[a] + s * Vec2(std::cos(th), std::sin(th));
        const int i = static_cast<int>(std::floor((target.x() - mn.x()) / cell));
        const int j = static_cast<int>(std::floor((target.y() - mn.y()) / cell));
        if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
        const int b = rep[static_cast<size_t>(j) * nx + i];
        if (b >= 0) feed(a, b);
    }

    HolderFit fit;
    fit.pairs_used = used;
    if (sup_dg == 0.0) {
        fit.status = "constant field";
        fit.constant = 0.0;
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int nb = 0;
    for (int kbin = 0; kbin < kBins; ++kbin) {
        if (env[static_cast<size_t>(kbin)] <= 0.0) continue;
        const double x = lo + (kbin + 0.5) * (hi - lo) / kBins;
        const double y = std::log(env[static_cast<size_t>(kbin)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++nb;
    }
    if (nb < 2) {
        fit.status = "constant field";
        fit.constant = sup_dg;
        return fit;
    }
    const double det = nb * sxx - sx * sx;
    fit.alpha = (nb * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    fit.constant = std::exp(intercept);
    double rss = 0.0;
    for (int kbin = 0; kbin < kBins; ++kbin) {
        if (env[static_cast<size_t>(kbin)] <= 0.0) continue;
        const double x = lo + (kbin + 0.5) * (hi - lo) / kBins;
        const double y = std::log(env[static_cast<size_t>(kbin)]);
        const double e = y - (intercept + fit.alpha * x);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / nb);
    fit.bins_used = nb;
    return fit;
}

bool DeGiorgiSchedule::induction_feasible(double c_star) const {
    if (!(c_star > 0.0)) return false;
    if (!(c_star * std::pow(rho0, beta) <= kappa * kappa * mu0 * mu0)) return false;
    for (size_t k = 0; k + 1 < rows.size(); ++k)
        if (!(std::sqrt(c_star * std::pow(rows[k].rho, beta)) <= rows[k + 1].mu)) return false;
    return true;
}

DeGiorgiSchedule de_giorgi_schedule(double rho0, double mu0, double kappa, double beta, int levels) {
    if (!(rho0 > 0.0 && mu0 > 0.0))
        throw std::invalid_argument("de_giorgi_schedule: rho0 and mu0 must be positive");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("de_giorgi_schedule: beta must be in (0,1)");
    if (!(kappa > std::pow(2.0, -beta) && kappa < 1.0))
        throw std::invalid_argument("de_giorgi_schedule: kappa must lie in (2^-beta, 1)");
    if (levels < 0) throw std::invalid_argument("de_giorgi_schedule: levels must be >= 0");
    DeGiorgiSchedule s;
    s.rho0 = rho0;
    s.mu0 = mu0;
    s.kappa = kappa;
    s.beta = beta;
    s.alpha = -std::log(kappa) / std::log(4.0);
    for (int k = 0; k <= levels; ++k)
        s.rows.push_back({k, rho0 * std::pow(4.0, -k), mu0 * std::pow(kappa, k)});
    return s;
}

std::vector<LipschitzRow> lipschitz_diagnostic(const DiscreteField& field,
                                               const std::vector<BallSpec>& balls,
                                               const Eigen::MatrixXd& f, double q,
                                               const ModelParams& mp) {
    const Mesh& m = field.mesh();
    const auto v = v_eps_field(field, mp);
    std::vector<LipschitzRow> rows;
    rows.reserve(balls.size());
    for (const auto& ball : balls) {
        if (!(ball.theta > 0.0 && ball.theta < 1.0))
            throw std::invalid_argument("lipschitz_diagnostic: theta must be in (0,1)");
        const auto outer = triangles_in_ball(m, ball.x0, ball.rho);
        LipschitzRow row;
        row.ball = ball;
        row.gap = (1.0 - ball.theta) * ball.rho;
        double f_acc = 0.0, v_acc = 0.0, f_max = 0.0;
        for (int t : outer) {
            // triangle-average load from the vertex values
            Eigen::VectorXd favg = Eigen::VectorXd::Zero(field.components());
            for (int k = 0; k < 3; ++k) favg += f.row(m.triangles[t][k]).transpose();
            favg /= 3.0;
            const double fn = favg.norm();
            f_max = std::max(f_max, fn);
            if (std::isfinite(q)) f_acc += m.area[t] * std::pow(fn, q);
            v_acc += m.area[t] * std::pow(v[static_cast<size_t>(t)], mp.p);
            if ((m.centroid[t] - ball.x0).norm() <= ball.theta * ball.rho)
                row.sup_v_inner = std::max(row.sup_v_inner, v[static_cast<size_t>(t)]);
        }
        row.f_lq = std::isfinite(q) ? std::pow(f_acc, 1.0 / q) : f_max;
        row.v_lp = std::pow(v_acc, 1.0 / mp.p);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace facetflow
