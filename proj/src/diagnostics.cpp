#include "triodflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace triodflow {

EdgeFields edge_fields(const NetworkState& state, const RegularizationParams& p) {
    const double h = state.h();
    EdgeFields out;
    out.tangent.resize(state.arms());
    out.psi.resize(state.arms());
    out.sigma.resize(state.arms());
    out.stretch.resize(state.arms());
    for (int i = 0; i < state.arms(); ++i) {
        Eigen::MatrixXd d(state.dim(), state.m());
        Eigen::MatrixXd psi(state.dim(), state.m());
        Eigen::VectorXd sigma(state.m());
        Eigen::VectorXd stretch(state.m());
        for (int j = 0; j < state.m(); ++j) {
            d.col(j) = (state.node(i, j + 1) - state.node(i, j)) / h;
            psi.col(j) = g_eps(p, d.col(j));
            sigma[j] = psi.col(j).dot(d.col(j));
            stretch[j] = d.col(j).norm();
        }
        out.tangent[i] = std::move(d);
        out.psi[i] = std::move(psi);
        out.sigma[i] = std::move(sigma);
        out.stretch[i] = std::move(stretch);
    }
    return out;
}

ConstraintSummary constraint_report(const EdgeFields& fields, const RegularizationParams& p) {
    ConstraintSummary s;
    s.max_stretch_minus_one = -std::numeric_limits<double>::infinity();
    s.constraint_bound_max_residual = -std::numeric_limits<double>::infinity();
    s.min_sigma = std::numeric_limits<double>::infinity();
    const double sqrt_eps = std::sqrt(p.eps);
    for (std::size_t i = 0; i < fields.tangent.size(); ++i) {
        for (int j = 0; j < fields.tangent[i].cols(); ++j) {
            const double stretch = fields.stretch[i][j];
            const double psi_norm = fields.psi[i].col(j).norm();
            s.max_stretch_minus_one = std::max(s.max_stretch_minus_one, stretch - 1.0);
            const double lhs = psi_norm * std::abs(stretch * stretch - 1.0);
            const double rhs = (stretch + 1.0) * (p.eps * psi_norm * psi_norm + sqrt_eps);
            s.constraint_bound_max_residual = std::max(s.constraint_bound_max_residual, lhs - rhs);
            s.min_sigma = std::min(s.min_sigma, fields.sigma[i][j]);
        }
    }
    return s;
}

std::pair<Eigen::VectorXd, double> junction_report(const EdgeFields& fields, const Grid& grid,
                                                   const Eigen::VectorXd& gravity) {
    if (fields.psi.size() != 3)
        throw WrongTopology("junction_report: requires the Triod topology");
    Eigen::VectorXd force = Eigen::VectorXd::Zero(gravity.size());
    for (int i = 0; i < 3; ++i) force += fields.psi[i].col(0);
    const double residual = (force + 1.5 * grid.h() * gravity).norm();
    return {force, residual};
}

double energy_balance_report(const Trajectory& trajectory) {
    if (trajectory.steps.empty())
        throw ValidationError("energy_balance_report: empty trajectory");
    double dissipation = 0.0;
    for (const StepRecord& rec : trajectory.steps)
        dissipation += rec.report.displacement_sq / rec.dt; // dt * sum h |dx/dt|^2
    const double e_end = trajectory.steps.back().report.energy_after;
    return std::abs(dissipation + e_end - trajectory.initial_energy);
}

std::vector<double> dissipation_inequality_report(const Trajectory& trajectory) {
    std::vector<double> slack;
    slack.reserve(trajectory.steps.size());
    for (const StepRecord& rec : trajectory.steps) {
        const double dt = rec.dt;
        slack.push_back(rec.report.displacement_sq / (dt * dt) -
                        rec.report.gravity_dot_disp / dt);
    }
    return slack;
}

CertificateReport certify(const Trajectory& trajectory, const RegularizationParams& p,
                          const Eigen::VectorXd& gravity, double tail_start) {
    CertificateReport cert;
    cert.max_stretch_minus_one = -std::numeric_limits<double>::infinity();
    cert.constraint_bound_max_residual = -std::numeric_limits<double>::infinity();
    cert.min_sigma = std::numeric_limits<double>::infinity();

    if (!trajectory.snapshots.empty()) { // fold in the initial state
        const NetworkState& s0 = trajectory.snapshots.front().state;
        const ConstraintSummary cs = constraint_report(edge_fields(s0, p), p);
        cert.max_stretch_minus_one = cs.max_stretch_minus_one;
        cert.constraint_bound_max_residual = cs.constraint_bound_max_residual;
        cert.min_sigma = cs.min_sigma;
    }
    double max_junction_residual = 0.0;
    for (const StepRecord& rec : trajectory.steps) {
        cert.max_stretch_minus_one = std::max(cert.max_stretch_minus_one, rec.max_stretch_minus_one);
        cert.constraint_bound_max_residual = std::max(cert.constraint_bound_max_residual, rec.constraint_bound_max_residual);
        cert.min_sigma = std::min(cert.min_sigma, rec.min_sigma);
        max_junction_residual = std::max(max_junction_residual, rec.junction_residual_corrected);
    }
    cert.junction_residual_corrected = max_junction_residual;

    if (!trajectory.snapshots.empty()) {
        const NetworkState& last = trajectory.snapshots.back().state;
        if (last.topology() == TopologyKind::Triod)
            cert.junction_force =
                junction_report(edge_fields(last, p), last.grid(), gravity).first;
    }
    if (!trajectory.steps.empty())
        cert.energy_balance_residual = energy_balance_report(trajectory);

    const std::vector<double> slack = dissipation_inequality_report(trajectory);
    double tail_max = 0.0;
    for (std::size_t k = 0; k < slack.size(); ++k)
        if (trajectory.steps[k].t >= tail_start) tail_max = std::max(tail_max, slack[k]);
    cert.dissipation_inequality_slack = tail_max;
    return cert;
}

} // namespace triodflow
