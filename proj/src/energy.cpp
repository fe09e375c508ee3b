#include "triodflow/energy.hpp"

namespace triodflow {

EnergyBreakdown total_energy(const NetworkState& state, const RegularizationParams& p,
                             const Eigen::VectorXd& gravity) {
    const double h = state.h();
    EnergyBreakdown out;
    for (int i = 0; i < state.arms(); ++i) {
        for (int j = 0; j < state.m(); ++j) {
            const Eigen::VectorXd d = (state.node(i, j + 1) - state.node(i, j)) / h;
            out.q_part += h * q_eps(p, d);
        }
        for (int j = 0; j <= state.m(); ++j) {
            const double w = (j == 0 || j == state.m()) ? 0.5 : 1.0;
            out.gravity_part -= w * h * gravity.dot(state.node(i, j));
        }
    }
    out.total = out.q_part + out.gravity_part;
    return out;
}

GradientField energy_gradient(const NetworkState& state, const RegularizationParams& p,
                              const Eigen::VectorXd& gravity) {
    const double h = state.h();
    const int m = state.m();
    GradientField grad(FreeDofLayout::of(state));

    for (int i = 0; i < state.arms(); ++i) {
        Eigen::MatrixXd psi(state.dim(), m);
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXd d = (state.node(i, j + 1) - state.node(i, j)) / h;
            psi.col(j) = g_eps(p, d);
        }
        for (int j = 1; j < m; ++j)
            grad.interior(i, j) = -(psi.col(j) - psi.col(j - 1)) - h * gravity;
        if (grad.layout().has_junction())
            grad.junction() -= psi.col(0) + 0.5 * h * gravity; // three half-edge weights total 3/2
    }
    return grad;
}

double constraint_operator_pairing(const NetworkState& a, const NetworkState& b,
                                   const RegularizationParams& p) {
    if (a.topology() != b.topology() || a.m() != b.m() || a.dim() != b.dim())
        throw TopologyMismatch("constraint_operator_pairing: states are not comparable");
    if (a.pins() != b.pins())
        throw TopologyMismatch("constraint_operator_pairing: pins differ");

    const double h = a.h();
    double pairing = 0.0;
    for (int i = 0; i < a.arms(); ++i)
        for (int j = 0; j < a.m(); ++j) {
            const Eigen::VectorXd da = (a.node(i, j + 1) - a.node(i, j)) / h;
            const Eigen::VectorXd db = (b.node(i, j + 1) - b.node(i, j)) / h;
            pairing += h * (g_eps(p, da) - g_eps(p, db)).dot(da - db);
        }
    return pairing;
}

} // namespace triodflow
