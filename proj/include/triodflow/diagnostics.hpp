#ifndef TRIODFLOW_DIAGNOSTICS_HPP
#define TRIODFLOW_DIAGNOSTICS_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "triodflow/evolve.hpp"
#include "triodflow/network.hpp"
#include "triodflow/regularization.hpp"

namespace triodflow {

/// Per-edge fields of a state: tangent d, psi = G_eps(d), sigma = psi . d,
/// stretch = |d|.
struct EdgeFields {
    std::vector<Eigen::MatrixXd> tangent; // d x m per arm
    std::vector<Eigen::MatrixXd> psi;     // d x m per arm
    std::vector<Eigen::VectorXd> sigma;   // m per arm
    std::vector<Eigen::VectorXd> stretch; // m per arm
};

EdgeFields edge_fields(const NetworkState& state, const RegularizationParams& p);

/// Edge-wise certificate quantities. constraint_bound_max_residual is the slack of the
/// algebraic bound |psi| ||d|^2 - 1| <= (|d|+1)(eps |psi|^2 + sqrt(eps)),
/// which is nonpositive in exact arithmetic.
struct ConstraintSummary {
    double max_stretch_minus_one = 0.0;
    double constraint_bound_max_residual = 0.0;
    double min_sigma = 0.0;
};

ConstraintSummary constraint_report(const EdgeFields& fields, const RegularizationParams& p);

/// Junction force sum_i psi^i(first edge) and the residual of the discrete
/// junction stationarity |sum_i psi^i + (3/2) h g| (the explicit trapezoid
/// gravity weight at the junction is subtracted so solver error is measured,
/// not the O(h) quadrature term). Triod only.
std::pair<Eigen::VectorXd, double> junction_report(const EdgeFields& fields, const Grid& grid,
                                                   const Eigen::VectorXd& gravity);

/// Residual | sum_k dt sum h |v_k|^2 + E(end) - E(0) | of the discrete energy
/// balance identity; O(dt) for the implicit scheme.
double energy_balance_report(const Trajectory& trajectory);

/// Per-step slack sum h |v_k|^2 - sum h g . v_k of the energy dissipation
/// inequality. Reported, not asserted: the inequality is proved only for the
/// eps -> 0 limit.
std::vector<double> dissipation_inequality_report(const Trajectory& trajectory);

/// Aggregated certificate of a run.
struct CertificateReport {
    double max_stretch_minus_one = 0.0;       // over all recorded states
    double constraint_bound_max_residual = 0.0;           // over all recorded states
    double min_sigma = 0.0;                   // over all recorded states
    Eigen::VectorXd junction_force;           // final state (empty for Cord)
    double junction_residual_corrected = 0.0; // max over converged steps
    double energy_balance_residual = 0.0;
    double dissipation_inequality_slack = 0.0; // max positive tail slack
};

/// Assemble the run certificate; the dissipation slack is maximized over
/// steps with t >= tail_start (the post-transient window).
CertificateReport certify(const Trajectory& trajectory, const RegularizationParams& p,
                          const Eigen::VectorXd& gravity, double tail_start);

} // namespace triodflow

#endif
