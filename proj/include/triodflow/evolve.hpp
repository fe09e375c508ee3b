#ifndef TRIODFLOW_EVOLVE_HPP
#define TRIODFLOW_EVOLVE_HPP

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "triodflow/energy.hpp"
#include "triodflow/network.hpp"
#include "triodflow/regularization.hpp"

namespace triodflow {

struct StepParams {
    double dt = 1e-3;
    double newton_tol = 1e-10; // on the free-node gradient norm of the step functional
    int max_newton_iters = 50;
    double ls_shrink = 0.5;
    double ls_c1 = 1e-4; // sufficient-decrease constant
    int max_ls_backtracks = 60;

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("StepParams: dt must be positive");
        if (!(newton_tol > 0.0)) throw ValidationError("StepParams: newton_tol must be positive");
    }
};

struct StepReport {
    int newton_iters = 0;
    double step_functional_decrease = 0.0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double displacement_sq = 0.0;   // sum over mass-carrying nodes of h |dx|^2
    double gravity_dot_disp = 0.0;  // sum over mass-carrying nodes of h g.dx
    bool converged = false;
};

/// Thrown when the Newton solve of a step exceeds its iteration budget;
/// carries the best iterate reached and its report.
struct StepNotConverged : Error {
    StepNotConverged(const std::string& msg, NetworkState best_, StepReport report_)
        : Error(msg), best(std::move(best_)), report(report_) {}
    NetworkState best;
    StepReport report;
};

/// One minimizing-movement step: minimize
///   Phi(x) = (1/(2 dt)) sum h |x - x_k|^2 + E_eps(x)
/// over states with the same pins and shared junction. The proximal sum runs
/// over the arm interiors only: the junction carries no L^2 mass (a point has
/// measure zero on the arm), so its stationarity enforces the discrete force
/// balance sum_i psi^i(0) + (3/2) h g = 0 exactly at every step. Newton with
/// backtracking line search; the Hessian (1/dt) h I + (1/h) grad G per edge is
/// positive-definite, solved through the per-arm tridiagonal blocks coupled
/// only through the junction row.
std::pair<NetworkState, StepReport> implicit_step(const NetworkState& state,
                                                  const RegularizationParams& p,
                                                  const Eigen::VectorXd& gravity,
                                                  const StepParams& sp);

/// Per-step record of the flow (diagnostic scalars evaluated on the post-step
/// state).
struct StepRecord {
    double t = 0.0;  // time after the step
    double dt = 0.0; // step size actually used
    StepReport report;
    double q_part = 0.0;       // energy split of the post-step state
    double gravity_part = 0.0;
    double min_sigma = 0.0;
    double max_stretch_minus_one = 0.0;
    double constraint_bound_max_residual = 0.0;
    double junction_residual_corrected = 0.0; // 0 for Cord
    double junction_force_norm = 0.0;         // |sum_i psi^i(0)|, 0 for Cord
};

struct Snapshot {
    double t = 0.0;
    NetworkState state;
};

struct Trajectory {
    std::vector<StepRecord> steps;
    std::vector<Snapshot> snapshots; // cadence including t = 0 and the final state
    double initial_energy = 0.0;
    int dt_halvings = 0;
};

/// Repeated implicit steps until time >= t_end (or the velocity drops below
/// stop_vel_tol, when given). Snapshots are recorded every record_every steps
/// plus the initial and final states. On StepNotConverged the step is retried
/// with dt halved, up to retry_budget halvings for the whole run.
Trajectory run_flow(const NetworkState& state0, const RegularizationParams& p,
                    const Eigen::VectorXd& gravity, const StepParams& sp, double t_end,
                    int record_every, std::optional<double> stop_vel_tol = std::nullopt,
                    int retry_budget = 10);

/// First recorded time at which sqrt(sum h |dx/dt|^2) < vel_tol, if any.
std::optional<double> steady_detect(const Trajectory& trajectory, double vel_tol);

} // namespace triodflow

#endif
