#include "triodflow/evolve.hpp"

#include <cmath>
#include <limits>

#include "triodflow/block_arrow.hpp"
#include "triodflow/diagnostics.hpp"

namespace triodflow {

namespace {

// Direction over the free nodes, chain layout: chains[c] col j-1 <-> node (c, j).
using Direction = BlockArrowVec;

double dot(const GradientField& g, const Direction& dir) {
    double out = 0.0;
    const auto& layout = g.layout();
    if (layout.has_junction()) out += g.junction().dot(dir.head);
    const int arms = static_cast<int>(dir.chains.size());
    for (int i = 0; i < arms; ++i)
        for (int j = 1; j < layout.m; ++j)
            out += g.interior(i, j).dot(dir.chains[i].col(j - 1));
    return out;
}

Direction negated_gradient(const GradientField& g) {
    Direction dir;
    const auto& layout = g.layout();
    if (layout.has_junction()) dir.head = -g.junction();
    const int arms = arm_count(layout.topology);
    dir.chains.resize(arms);
    for (int i = 0; i < arms; ++i) {
        dir.chains[i].resize(layout.dim, layout.m - 1);
        for (int j = 1; j < layout.m; ++j) dir.chains[i].col(j - 1) = -g.interior(i, j);
    }
    return dir;
}

void set_from(NetworkState& s, const Eigen::MatrixXd& base, const Direction& dir, double t) {
    s.nodes() = base;
    if (s.topology() == TopologyKind::Triod) s.node(0, 0) += t * dir.head;
    for (int i = 0; i < s.arms(); ++i)
        for (int j = 1; j < s.m(); ++j) s.node(i, j) += t * dir.chains[i].col(j - 1);
}

// Hessian of Phi: (1/h) grad G_eps per edge in second-difference pattern plus
// the (h/dt) proximal diagonal on the arm interiors (none on the junction).
BlockArrowSystem assemble_hessian(const NetworkState& s, const RegularizationParams& p,
                                  double dt) {
    const int m = s.m();
    const int d = s.dim();
    const double h = s.h();
    const Eigen::MatrixXd prox = (h / dt) * Eigen::MatrixXd::Identity(d, d);

    BlockArrowSystem sys;
    const int arms = s.arms();
    sys.diag.resize(arms);
    sys.off.resize(arms);
    if (s.topology() == TopologyKind::Triod) {
        sys.head = Eigen::MatrixXd::Zero(d, d);
        sys.head_off.resize(arms);
    }

    for (int i = 0; i < arms; ++i) {
        std::vector<Eigen::MatrixXd> W(m);
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXd tangent = (s.node(i, j + 1) - s.node(i, j)) / h;
            W[j] = grad_g_eps(p, tangent) / h;
        }
        sys.diag[i].resize(m - 1);
        sys.off[i].resize(m >= 3 ? m - 2 : 0);
        for (int j = 1; j < m; ++j) {
            sys.diag[i][j - 1] = W[j - 1] + W[j] + prox;
            if (j < m - 1) sys.off[i][j - 1] = -W[j];
        }
        if (s.topology() == TopologyKind::Triod) {
            sys.head += W[0];
            sys.head_off[i] = -W[0];
        }
    }
    return sys;
}

} // namespace

std::pair<NetworkState, StepReport> implicit_step(const NetworkState& state,
                                                  const RegularizationParams& p,
                                                  const Eigen::VectorXd& gravity,
                                                  const StepParams& sp) {
    sp.validate();
    const double h = state.h();
    const double dt = sp.dt;
    const int m = state.m();
    const Eigen::MatrixXd base = state.nodes();

    auto prox_term = [&](const NetworkState& s) {
        double sum = 0.0;
        for (int i = 0; i < s.arms(); ++i)
            for (int j = 1; j < m; ++j)
                sum += h * (s.node(i, j) - base.col(s.col(i, j))).squaredNorm();
        return sum;
    };
    auto phi_of = [&](const NetworkState& s) {
        return total_energy(s, p, gravity).total + prox_term(s) / (2.0 * dt);
    };
    auto grad_phi = [&](const NetworkState& s) {
        GradientField g = energy_gradient(s, p, gravity);
        for (int i = 0; i < s.arms(); ++i)
            for (int j = 1; j < m; ++j)
                g.interior(i, j) += (h / dt) * (s.node(i, j) - base.col(s.col(i, j)));
        return g;
    };

    StepReport rep;
    rep.energy_before = total_energy(state, p, gravity).total;

    NetworkState x = state;
    NetworkState trial = state;
    double phi = rep.energy_before; // Phi(x_k)
    const double phi0 = phi;

    int iters = 0;
    while (true) {
        const GradientField g = grad_phi(x);
        if (g.norm() <= sp.newton_tol) break;
        if (iters >= sp.max_newton_iters) {
            rep.newton_iters = iters;
            rep.converged = false;
            throw StepNotConverged("implicit_step: Newton iteration budget exceeded", x, rep);
        }
        ++iters;

        BlockArrowSystem sys = assemble_hessian(x, p, dt);
        Direction dir = solve_block_arrow(sys, negated_gradient(g));

        // the Newton step is below the floating-point resolution of the node
        // positions: the iterate already is the minimizer at this precision
        double step_inf = sys.has_head() ? dir.head.lpNorm<Eigen::Infinity>() : 0.0;
        for (const Eigen::MatrixXd& c : dir.chains)
            step_inf = std::max(step_inf, c.lpNorm<Eigen::Infinity>());
        if (step_inf <= 64.0 * std::numeric_limits<double>::epsilon() *
                            (1.0 + x.nodes().lpNorm<Eigen::Infinity>()))
            break;

        double dd = dot(g, dir);
        if (dd >= 0.0) { // not a descent direction (roundoff); fall back to steepest descent
            dir = negated_gradient(g);
            dd = dot(g, dir);
        }

        // Below the floating-point resolution of Phi the sufficient-decrease
        // test is meaningless; take the full step and let the gradient norm
        // decide convergence.
        if (std::abs(dd) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi))) {
            set_from(x, x.nodes(), dir, 1.0);
            phi = phi_of(x);
            continue;
        }

        bool accepted = false;
        for (int pass = 0; pass < 2 && !accepted; ++pass) {
            double t = 1.0;
            for (int bt = 0; bt <= sp.max_ls_backtracks; ++bt) {
                set_from(trial, x.nodes(), dir, t);
                const double phi_trial = phi_of(trial);
                if (phi_trial <= phi + sp.ls_c1 * t * dd) {
                    x.nodes() = trial.nodes();
                    phi = phi_trial;
                    accepted = true;
                    break;
                }
                t *= sp.ls_shrink;
            }
            if (!accepted && pass == 0) { // retry along the gradient
                dir = negated_gradient(g);
                dd = dot(g, dir);
            }
        }
        if (!accepted) {
            rep.newton_iters = iters;
            rep.converged = false;
            throw StepNotConverged("implicit_step: line search failed", x, rep);
        }
    }

    for (int i = 0; i < x.arms(); ++i)
        for (int j = 1; j < m; ++j) {
            const Eigen::VectorXd dx = x.node(i, j) - base.col(x.col(i, j));
            rep.displacement_sq += h * dx.squaredNorm();
            rep.gravity_dot_disp += h * gravity.dot(dx);
        }
    rep.newton_iters = iters;
    rep.converged = true;
    rep.energy_after = total_energy(x, p, gravity).total;
    rep.step_functional_decrease = phi0 - phi;
    x.set_time(state.time() + dt);
    return {std::move(x), rep};
}

Trajectory run_flow(const NetworkState& state0, const RegularizationParams& p,
                    const Eigen::VectorXd& gravity, const StepParams& sp0, double t_end,
                    int record_every, std::optional<double> stop_vel_tol, int retry_budget) {
    if (!(t_end > 0.0)) throw ValidationError("run_flow: t_end must be positive");
    if (record_every < 1) throw ValidationError("run_flow: record_every must be >= 1");
    StepParams sp = sp0;
    sp.validate();

    Trajectory traj;
    traj.initial_energy = total_energy(state0, p, gravity).total;
    NetworkState cur = state0;
    traj.snapshots.push_back({cur.time(), cur});

    const double guard = 1e-12 * std::max(1.0, t_end);
    int step_idx = 0;
    while (cur.time() < t_end - guard) {
        std::pair<NetworkState, StepReport> next = [&] {
            while (true) {
                try {
                    return implicit_step(cur, p, gravity, sp);
                } catch (const StepNotConverged&) {
                    if (traj.dt_halvings >= retry_budget)
                        throw RunAborted("run_flow: retry budget exhausted");
                    ++traj.dt_halvings;
                    sp.dt *= 0.5;
                }
            }
        }();
        cur = std::move(next.first);
        ++step_idx;

        StepRecord rec;
        rec.t = cur.time();
        rec.dt = sp.dt;
        rec.report = next.second;
        const EnergyBreakdown eb = total_energy(cur, p, gravity);
        rec.q_part = eb.q_part;
        rec.gravity_part = eb.gravity_part;
        const EdgeFields ef = edge_fields(cur, p);
        const ConstraintSummary cs = constraint_report(ef, p);
        rec.min_sigma = cs.min_sigma;
        rec.max_stretch_minus_one = cs.max_stretch_minus_one;
        rec.constraint_bound_max_residual = cs.constraint_bound_max_residual;
        if (cur.topology() == TopologyKind::Triod) {
            const auto [force, resid] = junction_report(ef, cur.grid(), gravity);
            rec.junction_force_norm = force.norm();
            rec.junction_residual_corrected = resid;
        }
        traj.steps.push_back(rec);

        if (step_idx % record_every == 0) traj.snapshots.push_back({cur.time(), cur});
        if (stop_vel_tol && std::sqrt(next.second.displacement_sq) / sp.dt < *stop_vel_tol) break;
    }
    if (traj.snapshots.back().t != cur.time()) traj.snapshots.push_back({cur.time(), cur});
    return traj;
}

std::optional<double> steady_detect(const Trajectory& trajectory, double vel_tol) {
    if (!(vel_tol >= 0.0)) throw ValidationError("steady_detect: vel_tol must be nonnegative");
    for (const StepRecord& rec : trajectory.steps)
        if (std::sqrt(rec.report.displacement_sq) / rec.dt < vel_tol) return rec.t;
    return std::nullopt;
}

} // namespace triodflow
