#ifndef TRIODFLOW_TENSION_BVP_HPP
#define TRIODFLOW_TENSION_BVP_HPP

#include <Eigen/Core>
#include <vector>

#include "triodflow/network.hpp"

namespace triodflow {

/// Nodal tension recovered from the geometry alone by the two-point boundary
/// value problem d_ss sigma = |d_ss eta|^2 sigma with the junction/end force
/// conditions, solved in the least-squares sense.
struct TensionSolution {
    std::vector<Eigen::VectorXd> sigma; // m+1 nodal values per arm
    double residual_norm = 0.0;         // l2 residual of the assembled system
};

/// Nodal geometry of an arm by second-order differences (one-sided at the
/// ends): tangent and curvature fields used by the BVP and the projection.
struct NodalGeometry {
    std::vector<Eigen::MatrixXd> tangent;   // d x (m+1)
    std::vector<Eigen::MatrixXd> curvature; // d x (m+1)
};

NodalGeometry nodal_geometry(const NetworkState& state);

/// Assemble and solve the tension BVP on a (nearly unit-speed) configuration.
/// Interior rows are the central-difference quotient of d_ss sigma minus
/// |curvature|^2 sigma; the boundary rows are, per arm,
///   sum_i sigma^i t^i = 0 at s=0 and arm-wise equality of
///   (d_s sigma) t + sigma curvature + g at s=0      (Triod)
///   (d_s sigma) t + sigma curvature = -g at both pinned ends.
/// Overdetermined; solved by complete orthogonal decomposition (minimum-norm
/// least squares).
TensionSolution solve_tension_bvp(const NetworkState& state, double geometry_tol,
                                  const Eigen::VectorXd& gravity);

/// Projected gravity P_eta g = g + d_s(sigma d_s eta) per arm (second-order
/// differences), plus the tangency defect max |d_s(P_eta g) . d_s eta|.
struct ProjectedGravity {
    std::vector<Eigen::MatrixXd> field; // d x (m+1) per arm
    double tangency_defect = 0.0;
};

ProjectedGravity projected_gravity(const NetworkState& state, const TensionSolution& ts,
                                   const Eigen::VectorXd& gravity);

} // namespace triodflow

#endif
