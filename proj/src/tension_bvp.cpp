#include "triodflow/tension_bvp.hpp"

#include <Eigen/QR>
#include <cmath>

#include "triodflow/errors.hpp"

namespace triodflow {

namespace {

// d/ds of a nodal field by central differences, second-order one-sided at the
// ends.
Eigen::MatrixXd nodal_derivative(const Eigen::MatrixXd& f, double h) {
    const Eigen::Index n = f.cols() - 1;
    Eigen::MatrixXd out(f.rows(), n + 1);
    for (Eigen::Index j = 1; j < n; ++j) out.col(j) = (f.col(j + 1) - f.col(j - 1)) / (2 * h);
    out.col(0) = (-3.0 * f.col(0) + 4.0 * f.col(1) - f.col(2)) / (2 * h);
    out.col(n) = (3.0 * f.col(n) - 4.0 * f.col(n - 1) + f.col(n - 2)) / (2 * h);
    return out;
}

} // namespace

NodalGeometry nodal_geometry(const NetworkState& state) {
    const double h = state.h();
    const int m = state.m();
    NodalGeometry geo;
    geo.tangent.resize(state.arms());
    geo.curvature.resize(state.arms());
    for (int i = 0; i < state.arms(); ++i) {
        Eigen::MatrixXd x(state.dim(), m + 1);
        for (int j = 0; j <= m; ++j) x.col(j) = state.node(i, j);

        geo.tangent[i] = nodal_derivative(x, h);

        Eigen::MatrixXd k(state.dim(), m + 1);
        for (int j = 1; j < m; ++j)
            k.col(j) = (x.col(j + 1) - 2.0 * x.col(j) + x.col(j - 1)) / (h * h);
        if (m >= 3) {
            k.col(0) = (2.0 * x.col(0) - 5.0 * x.col(1) + 4.0 * x.col(2) - x.col(3)) / (h * h);
            k.col(m) = (2.0 * x.col(m) - 5.0 * x.col(m - 1) + 4.0 * x.col(m - 2) - x.col(m - 3)) /
                       (h * h);
        } else {
            k.col(0) = k.col(1);
            k.col(m) = k.col(m - 1);
        }
        geo.curvature[i] = std::move(k);
    }
    return geo;
}

TensionSolution solve_tension_bvp(const NetworkState& state, double geometry_tol,
                                  const Eigen::VectorXd& gravity) {
    const double h = state.h();
    const int m = state.m();
    const int d = state.dim();
    const int arms = state.arms();

    for (int i = 0; i < arms; ++i)
        for (int j = 0; j < m; ++j) {
            const double len = (state.node(i, j + 1) - state.node(i, j)).norm() / h;
            if (std::abs(len - 1.0) > geometry_tol)
                throw GeometryTooSlack("solve_tension_bvp: |d_s eta| deviates from 1 beyond tol");
        }

    const NodalGeometry geo = nodal_geometry(state);
    const int n = arms * (m + 1);
    const int n_rows = arms * (m - 1) +
                       (state.topology() == TopologyKind::Triod ? d + 2 * d + 3 * d : 2 * d);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);

    auto idx = [m](int arm, int j) { return arm * (m + 1) + j; };
    int row = 0;

    // interior ODE rows: (sigma_{j-1} - 2 sigma_j + sigma_{j+1})/h^2 = |k|^2 sigma_j
    for (int i = 0; i < arms; ++i)
        for (int j = 1; j < m; ++j) {
            A(row, idx(i, j - 1)) += 1.0 / (h * h);
            A(row, idx(i, j)) += -2.0 / (h * h) - geo.curvature[i].col(j).squaredNorm();
            A(row, idx(i, j + 1)) += 1.0 / (h * h);
            ++row;
        }

    // force expression (d_s sigma) t + sigma k at node j of arm i, written into
    // rows [row, row+d) with the given sign
    auto add_force_rows = [&](int i, int j, double sign, int at_row) {
        double w0, w1, w2;
        int j0, j1, j2;
        if (j == 0) {
            w0 = -3.0 / (2 * h); w1 = 4.0 / (2 * h); w2 = -1.0 / (2 * h);
            j0 = 0; j1 = 1; j2 = 2;
        } else {
            w0 = 3.0 / (2 * h); w1 = -4.0 / (2 * h); w2 = 1.0 / (2 * h);
            j0 = m; j1 = m - 1; j2 = m - 2;
        }
        for (int c = 0; c < d; ++c) {
            const double t = geo.tangent[i](c, j);
            A(at_row + c, idx(i, j0)) += sign * (w0 * t + geo.curvature[i](c, j)); // j0 == j
            A(at_row + c, idx(i, j1)) += sign * w1 * t;
            A(at_row + c, idx(i, j2)) += sign * w2 * t;
        }
    };

    if (state.topology() == TopologyKind::Triod) {
        // junction force balance: sum_i sigma^i(0) t^i(0) = 0
        for (int i = 0; i < arms; ++i)
            for (int c = 0; c < d; ++c) A(row + c, idx(i, 0)) += geo.tangent[i](c, 0);
        row += d;
        // arm-wise equality of the junction force expression (g cancels)
        for (int pair = 0; pair < 2; ++pair) {
            add_force_rows(pair, 0, 1.0, row);
            add_force_rows(pair + 1, 0, -1.0, row);
            row += d;
        }
        // pinned ends: (d_s sigma) t + sigma k = -g at s=1
        for (int i = 0; i < arms; ++i) {
            add_force_rows(i, m, 1.0, row);
            for (int c = 0; c < d; ++c) b(row + c) = -gravity(c);
            row += d;
        }
    } else {
        for (int j : {0, m}) {
            add_force_rows(0, j, 1.0, row);
            for (int c = 0; c < d; ++c) b(row + c) = -gravity(c);
            row += d;
        }
    }

    const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);

    TensionSolution ts;
    ts.sigma.resize(arms);
    for (int i = 0; i < arms; ++i) ts.sigma[i] = sol.segment(idx(i, 0), m + 1);
    ts.residual_norm = (A * sol - b).norm();
    return ts;
}

ProjectedGravity projected_gravity(const NetworkState& state, const TensionSolution& ts,
                                   const Eigen::VectorXd& gravity) {
    if (static_cast<int>(ts.sigma.size()) != state.arms() ||
        ts.sigma[0].size() != state.m() + 1)
        throw ShapeMismatch("projected_gravity: tension solution does not match the state");

    const double h = state.h();
    const NodalGeometry geo = nodal_geometry(state);
    ProjectedGravity out;
    out.field.resize(state.arms());
    for (int i = 0; i < state.arms(); ++i) {
        const Eigen::MatrixXd u =
            geo.tangent[i].array().rowwise() * ts.sigma[i].transpose().array();
        Eigen::MatrixXd pg = nodal_derivative(u, h);
        pg.colwise() += gravity;
        const Eigen::MatrixXd dpg = nodal_derivative(pg, h);
        for (int j = 0; j <= state.m(); ++j)
            out.tangency_defect =
                std::max(out.tangency_defect, std::abs(dpg.col(j).dot(geo.tangent[i].col(j))));
        out.field[i] = std::move(pg);
    }
    return out;
}

} // namespace triodflow
