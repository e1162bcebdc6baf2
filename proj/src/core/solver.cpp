#include "core/solver.hpp"

#include "core/density.hpp"
#include "core/truncation.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>

namespace facetflow {

namespace {

void check_load(const DiscreteField& field, const Eigen::MatrixXd& f) {
    if (f.rows() != field.mesh().num_vertices() || f.cols() != field.components())
        throw std::invalid_argument("load vector shape does not match the field");
}

}  // namespace

double assemble_energy(const DiscreteField& field, const Eigen::MatrixXd& f, const ModelParams& mp) {
    check_load(field, f);
    const Mesh& m = field.mesh();
    double e = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) e += m.area[t] * energy_density(field.gradient(t), mp);
    double load = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) load += m.lumped[v] * f.row(v).dot(field.values().row(v));
    return e - load;
}

Eigen::VectorXd assemble_gradient(const DiscreteField& field, const Eigen::MatrixXd& f,
                                  const ModelParams& mp) {
    check_load(field, f);
    const Mesh& m = field.mesh();
    const int N = field.components();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_vertices()) * N);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const GradMat a = m.area[t] * flux(field.gradient(t), mp);  // N x 2
        for (int k = 0; k < 3; ++k) {
            const int v = m.triangles[t][k];
            const Eigen::VectorXd contrib = a * m.basis_grad[t][k];  // N
            for (int i = 0; i < N; ++i) g[static_cast<Eigen::Index>(v) * N + i] += contrib[i];
        }
    }
    for (int v = 0; v < m.num_vertices(); ++v)
        for (int i = 0; i < N; ++i) {
            const Eigen::Index dof = static_cast<Eigen::Index>(v) * N + i;
            if (m.boundary[v])
                g[dof] = 0.0;
            else
                g[dof] -= m.lumped[v] * f(v, i);
        }
    return g;
}

double weak_residual(const DiscreteField& field, const Eigen::MatrixXd& f, const ModelParams& mp) {
    const Eigen::VectorXd g = assemble_gradient(field, f, mp);
    const Mesh& m = field.mesh();
    const int N = field.components();
    double res = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (m.boundary[v] || m.lumped[v] == 0.0) continue;
        for (int i = 0; i < N; ++i)
            res = std::max(res, std::abs(g[static_cast<Eigen::Index>(v) * N + i]) / m.lumped[v]);
    }
    return res;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Stiffness on interior dofs only; dof order is (vertex, component).
SpMat assemble_hessian_interior(const DiscreteField& field, const ModelParams& mp,
                                const std::vector<Eigen::Index>& compact) {
    const Mesh& m = field.mesh();
    const int N = field.components();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(m.num_triangles()) * 9 * N * N);
    Eigen::Index ndof = 0;
    for (Eigen::Index c : compact) ndof = std::max(ndof, c + 1);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const GradMat xi = field.gradient(t);
        const double sigma = xi.squaredNorm();
        const double d1 = eval_g(sigma, GBranch::g_eps, 1, mp);
        const double d2 = eval_g(sigma, GBranch::g_eps, 2, mp);
        // local 3x3 blocks of B_eps contracted with basis gradients:
        // K[(a,i),(c,j)] = area * ( d1 (ga.gc) delta_ij + 2 d2 (xi ga)_i (xi gc)_j )
        std::array<Eigen::VectorXd, 3> xg;
        for (int k = 0; k < 3; ++k) xg[k] = xi * m.basis_grad[t][k];
        for (int a = 0; a < 3; ++a) {
            const int va = m.triangles[t][a];
            if (m.boundary[va]) continue;
            for (int c = 0; c < 3; ++c) {
                const int vc = m.triangles[t][c];
                if (m.boundary[vc]) continue;
                const double gdot = m.basis_grad[t][a].dot(m.basis_grad[t][c]);
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) {
                        double val = 2.0 * d2 * xg[a][i] * xg[c][j];
                        if (i == j) val += d1 * gdot;
                        trip.emplace_back(
                            static_cast<int>(compact[static_cast<Eigen::Index>(va) * N + i]),
                            static_cast<int>(compact[static_cast<Eigen::Index>(vc) * N + j]),
                            m.area[t] * val);
                    }
            }
        }
    }
    SpMat H(ndof, ndof);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

}  // namespace

std::pair<DiscreteField, SolveReport> minimize(const DiscreteField& initial,
                                               const Eigen::MatrixXd& f, const ModelParams& mp,
                                               const ToleranceSpec& tol) {
    mp.validate();
    if (!(mp.epsilon > 0.0)) throw std::invalid_argument("minimize: requires epsilon > 0");
    check_load(initial, f);

    DiscreteField u = initial;
    const Mesh& m = u.mesh();
    const int N = u.components();
    const Eigen::Index total_dofs = static_cast<Eigen::Index>(m.num_vertices()) * N;

    std::vector<Eigen::Index> compact(total_dofs, -1);
    std::vector<Eigen::Index> interior;
    for (int v = 0; v < m.num_vertices(); ++v)
        if (!m.boundary[v])
            for (int i = 0; i < N; ++i) {
                compact[static_cast<Eigen::Index>(v) * N + i] = static_cast<Eigen::Index>(interior.size());
                interior.push_back(static_cast<Eigen::Index>(v) * N + i);
            }

    SolveReport rep;
    rep.params = mp;
    rep.energy_trace.push_back(assemble_energy(u, f, mp));

    auto with_step = [&](const Eigen::VectorXd& dir, double t) {
        DiscreteField trial = u;
        for (size_t k = 0; k < interior.size(); ++k) {
            const Eigen::Index dof = interior[k];
            trial.values()(dof / N, dof % N) += t * dir[static_cast<Eigen::Index>(k)];
        }
        trial.update_gradients();
        return trial;
    };

    double prev_energy = rep.energy_trace.front();
    int stagnant = 0;
    for (int it = 0; it < tol.max_iters; ++it) {
        const Eigen::VectorXd g = assemble_gradient(u, f, mp);
        rep.residual_norm = weak_residual(u, f, mp);
        if (rep.residual_norm <= tol.residual) {
            rep.converged = true;
            return {u, rep};
        }
        if (interior.empty()) break;

        Eigen::VectorXd gi(interior.size());
        for (size_t k = 0; k < interior.size(); ++k) gi[static_cast<Eigen::Index>(k)] = g[interior[k]];

        const SpMat H = assemble_hessian_interior(u, mp, compact);
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(tol.cg_rel_tol);
        cg.setMaxIterations(4 * H.rows());
        cg.compute(H);
        if (cg.info() != Eigen::Success) throw SingularLinearSolve("minimize: CG setup failed");
        Eigen::VectorXd dir = cg.solve(-gi);
        bool newton_ok = dir.allFinite() && gi.dot(dir) < 0.0;
        if (!newton_ok) dir = -gi;  // gradient-descent fallback
        if (!dir.allFinite()) throw SingularLinearSolve("minimize: non-finite search direction");

        const double slope = gi.dot(dir);
        double t = 1.0;
        const double e0 = prev_energy;
        DiscreteField trial = with_step(dir, t);
        double e1 = assemble_energy(trial, f, mp);
        while (e1 > e0 + tol.armijo_c * t * slope && t > 1e-14) {
            t *= tol.backtrack;
            ++rep.linesearch_backtracks;
            trial = with_step(dir, t);
            e1 = assemble_energy(trial, f, mp);
        }
        if (e1 > e0 && t <= 1e-14) {
            rep.error = "line search failed";
            throw NonConvergence("minimize: line search failed to decrease energy", rep);
        }
        u = std::move(trial);
        ++rep.newton_iters;
        rep.energy_trace.push_back(e1);
        if (e0 - e1 < tol.energy_decrease * std::max(1.0, std::abs(e1)))
            ++stagnant;
        else
            stagnant = 0;
        prev_energy = e1;
        if (stagnant >= 3) break;  // secondary criterion: energy decrease exhausted
    }
    rep.residual_norm = weak_residual(u, f, mp);
    if (rep.residual_norm <= tol.residual) {
        rep.converged = true;
        return {u, rep};
    }
    rep.error = "residual tolerance not reached";
    throw NonConvergence("minimize: no convergence within iteration budget (residual " +
                             std::to_string(rep.residual_norm) + ")",
                         rep);
}

std::pair<std::vector<DiscreteField>, LadderReport> solve_ladder(
    const DiscreteField& initial, const Eigen::MatrixXd& f, const ModelParams& params_base,
    const std::vector<double>& epsilons, double delta, const ToleranceSpec& tol) {
    if (epsilons.empty()) throw std::invalid_argument("solve_ladder: empty epsilon list");
    for (size_t j = 0; j < epsilons.size(); ++j) {
        if (!(epsilons[j] > 0.0 && epsilons[j] < delta / 4.0))
            throw std::invalid_argument("solve_ladder: every epsilon must satisfy 0 < epsilon < delta/4");
        if (j > 0 && !(epsilons[j] < epsilons[j - 1]))
            throw std::invalid_argument("solve_ladder: epsilons must be strictly decreasing");
    }

    LadderReport ladder;
    ladder.delta = delta;
    std::vector<DiscreteField> fields;
    DiscreteField warm = initial;
    int prev_solved = -1;
    double prev_eps = 0.0;
    for (size_t j = 0; j < epsilons.size(); ++j) {
        ModelParams mp = params_base;
        mp.epsilon = epsilons[j];
        mp.delta = delta;
        LadderLevel level;
        level.epsilon = epsilons[j];
        try {
            auto [u, rep] = minimize(warm, f, mp, tol);
            level.report = rep;
            level.solved = true;
            warm = u;
            fields.push_back(std::move(u));
        } catch (const NonConvergence& e) {
            level.report = e.report;
            level.error = e.what();
            ladder.levels.push_back(std::move(level));
            continue;
        }
        if (prev_solved >= 0) {
            const DiscreteField& a = fields[static_cast<size_t>(prev_solved)];
            const DiscreteField& b = fields.back();
            const Mesh& m = b.mesh();
            double lp = 0.0;
            double sup = 0.0;
            for (int t = 0; t < m.num_triangles(); ++t) {
                const GradMat da = a.gradient(t) - b.gradient(t);
                lp += m.area[t] * std::pow(da.norm(), params_base.p);
                const GradMat ga = truncate_relaxed(a.gradient(t), 2.0 * delta, prev_eps);
                const GradMat gb = truncate_relaxed(b.gradient(t), 2.0 * delta, epsilons[j]);
                sup = std::max(sup, (ga - gb).norm());
            }
            level.ddu_lp = std::pow(lp, 1.0 / params_base.p);
            level.dg_sup = sup;
        }
        prev_solved = static_cast<int>(fields.size()) - 1;
        prev_eps = epsilons[j];
        ladder.levels.push_back(std::move(level));
    }
    return {fields, ladder};
}

}  // namespace facetflow
