#ifndef TRIODFLOW_ENERGY_HPP
#define TRIODFLOW_ENERGY_HPP

#include <Eigen/Core>
#include <vector>

#include "triodflow/network.hpp"
#include "triodflow/regularization.hpp"

namespace triodflow {

/// Discrete approximating energy split: q_part = sum_i sum_j h Q_eps(d_ij)
/// (edge-midpoint rule), gravity_part = composite trapezoid of (-g).eta per
/// arm.
struct EnergyBreakdown {
    double q_part = 0.0;
    double gravity_part = 0.0;
    double total = 0.0;
};

/// Ordering of the free nodes: junction block first (Triod), then the arm
/// interiors j = 1..m-1 in arm-major order. Pinned nodes have no block.
struct FreeDofLayout {
    TopologyKind topology;
    int m;
    int dim;

    static FreeDofLayout of(const NetworkState& s) {
        return {s.topology(), s.m(), s.dim()};
    }
    bool has_junction() const { return topology == TopologyKind::Triod; }
    int free_nodes() const {
        const int interior = (arm_count(topology)) * (m - 1);
        return interior + (has_junction() ? 1 : 0);
    }
    int junction_block() const { return 0; }
    int interior_block(int arm, int j) const {
        return (has_junction() ? 1 : 0) + arm * (m - 1) + (j - 1);
    }
};

/// Co-state over the free nodes only; entries at pinned nodes are absent.
class GradientField {
public:
    GradientField(FreeDofLayout layout)
        : layout_(layout), values_(Eigen::MatrixXd::Zero(layout.dim, layout.free_nodes())) {}

    const FreeDofLayout& layout() const { return layout_; }
    Eigen::MatrixXd& values() { return values_; }
    const Eigen::MatrixXd& values() const { return values_; }

    Eigen::MatrixXd::ColXpr junction() {
        if (!layout_.has_junction()) throw WrongTopology("GradientField: no junction entry");
        return values_.col(layout_.junction_block());
    }
    Eigen::MatrixXd::ConstColXpr junction() const {
        if (!layout_.has_junction()) throw WrongTopology("GradientField: no junction entry");
        return values_.col(layout_.junction_block());
    }
    Eigen::MatrixXd::ColXpr interior(int arm, int j) {
        return values_.col(layout_.interior_block(arm, j));
    }
    Eigen::MatrixXd::ConstColXpr interior(int arm, int j) const {
        return values_.col(layout_.interior_block(arm, j));
    }

    double norm() const { return values_.norm(); }

private:
    FreeDofLayout layout_;
    Eigen::MatrixXd values_;
};

EnergyBreakdown total_energy(const NetworkState& state, const RegularizationParams& p,
                             const Eigen::VectorXd& gravity);

/// Gradient of total_energy with respect to the free nodes:
///   interior (i,j): -[G(d_ij) - G(d_i,j-1)] - h g
///   junction:       -sum_i G(d_i0) - (3/2) h g
GradientField energy_gradient(const NetworkState& state, const RegularizationParams& p,
                              const Eigen::VectorXd& gravity);

/// Duality pairing <A(a) - A(b), a - b> of the pure-constraint operator:
/// sum_i sum_j h (G(d_a) - G(d_b)) . (d_a - d_b). Nonnegative; bounded below
/// by eps * sum h |G(d_a) - G(d_b)|^2.
double constraint_operator_pairing(const NetworkState& a, const NetworkState& b,
                                   const RegularizationParams& p);

} // namespace triodflow

#endif
