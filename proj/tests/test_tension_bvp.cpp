#include <doctest.h>

#include <cmath>

#include "triodflow/catenary.hpp"
#include "triodflow/diagnostics.hpp"
#include "triodflow/evolve.hpp"
#include "triodflow/tension_bvp.hpp"

using namespace triodflow;

namespace {

NetworkState straight_vertical_cord(int m) {
    NetworkState s(TopologyKind::Cord, Grid(m), 2);
    for (int j = 0; j <= m; ++j) s.node(0, j) = Eigen::Vector2d(0.0, -static_cast<double>(j) / m);
    s.pins().col(0) = s.node(0, 0);
    s.pins().col(1) = s.node(0, m);
    return s;
}

NetworkState catenary_state(int m) {
    const Eigen::Vector2d g(0.0, -1.0);
    const CatenaryResult cat = catenary_oracle(Eigen::Vector2d(0.0, 0.0),
                                               Eigen::Vector2d(0.8, 0.0), 1.0, g, m + 1);
    NetworkState s(TopologyKind::Cord, Grid(m), 2);
    for (int j = 0; j <= m; ++j) s.node(0, j) = cat.polyline.col(j);
    s.pins().col(0) = s.node(0, 0);
    s.pins().col(1) = s.node(0, m);
    return s;
}

} // namespace

TEST_CASE("straight vertical cord: sigma affine with tangential slope -1") {
    const Eigen::Vector2d g(0.0, -1.0);
    const int m = 32;
    const NetworkState s = straight_vertical_cord(m);
    const TensionSolution ts = solve_tension_bvp(s, 1e-6, g);
    CHECK(ts.residual_norm <= 1e-8);
    const Eigen::VectorXd& sig = ts.sigma[0];
    const double h = 1.0 / m;
    for (int j = 1; j < m; ++j)
        CHECK(std::abs(sig[j + 1] - 2 * sig[j] + sig[j - 1]) <= 1e-8); // affine
    // tangent is (0,-1): d_s sigma * t = -g forces d_s sigma = -1
    CHECK((sig[1] - sig[0]) / h == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("linearity in gravity") {
    const Eigen::Vector2d g(0.0, -1.0);
    const NetworkState s = catenary_state(48);
    const TensionSolution one = solve_tension_bvp(s, 1e-2, g);
    const TensionSolution two = solve_tension_bvp(s, 1e-2, (2.0 * g).eval());
    CHECK((two.sigma[0] - 2.0 * one.sigma[0]).norm() <= 1e-9 * one.sigma[0].norm());
}

TEST_CASE("recovers the catenary tension a*cosh(u) from geometry alone") {
    const Eigen::Vector2d g(0.0, -1.0);
    const int m = 64;
    const NetworkState s = catenary_state(m);
    const CatenaryResult cat = catenary_oracle(Eigen::Vector2d(0.0, 0.0),
                                               Eigen::Vector2d(0.8, 0.0), 1.0, g, m + 1);
    const TensionSolution ts = solve_tension_bvp(s, 1e-3, g);

    Eigen::VectorXd expected(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double arc = static_cast<double>(j) / m;
        const double u = std::asinh(arc / cat.a + std::sinh(cat.u1));
        expected[j] = cat.a * std::cosh(u);
    }
    CHECK((ts.sigma[0] - expected).norm() <= 5e-3 * expected.norm());

    // the recovered tension projects gravity to (nearly) zero: the catenary is steady
    const ProjectedGravity pg = projected_gravity(s, ts, g);
    double max_pg = 0.0;
    for (int j = 0; j <= m; ++j) max_pg = std::max(max_pg, pg.field[0].col(j).norm());
    CHECK(max_pg <= 5e-2);
}

TEST_CASE("triod at steadiness: BVP tension matches the flow, junction rows near zero") {
    // pins placed so that every arm stays taut at the steady state: the
    // appendix model presumes near-unit-speed geometry
    const Eigen::Vector2d g(0.0, -1.0);
    Eigen::MatrixXd pins(2, 3);
    pins.col(0) << 0.7, 0.35;
    pins.col(1) << -0.7, 0.35;
    pins.col(2) << 0.0, 0.8;
    RegularizationParams p(0.01);
    const NetworkState s0 =
        build_initial(TopologyKind::Triod, Grid(24), pins, InitialShape::circular_arcs(), g);
    StepParams sp;
    sp.dt = 1e-3;
    const Trajectory traj = run_flow(s0, p, g, sp, 20.0, 5000, 1e-7);
    REQUIRE(steady_detect(traj, 1e-7).has_value());
    const NetworkState& state = traj.snapshots.back().state;

    const TensionSolution ts = solve_tension_bvp(state, 0.1, g);
    const EdgeFields ef = edge_fields(state, p);
    const int m = state.m();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 1; j < m; ++j) {
            const double flow = 0.5 * (ef.sigma[i][j - 1] + ef.sigma[i][j]);
            num += std::pow(ts.sigma[i][j] - flow, 2);
            den += flow * flow;
        }
    CHECK(std::sqrt(num / den) <= 0.1);

    // junction force balance of the recovered tension (A.2 row)
    const NodalGeometry geo = nodal_geometry(state);
    Eigen::Vector2d balance = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) balance += ts.sigma[i][0] * geo.tangent[i].col(0);
    CHECK(balance.norm() <= 5e-2);

    // P_eta g nearly vanishes at a steady state
    const ProjectedGravity pg = projected_gravity(state, ts, g);
    double max_pg = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= m; ++j) max_pg = std::max(max_pg, pg.field[i].col(j).norm());
    CHECK(max_pg <= 0.15);

    // the junction force expression fitted by the A.3 rows is arm-independent
    // up to the least-squares residual; P_eta g(0) itself adds an O(h)
    // product-stencil consistency error on top
    const double h = state.h();
    Eigen::Vector2d fexpr[3];
    for (int i = 0; i < 3; ++i) {
        const double dsig0 =
            (-3 * ts.sigma[i][0] + 4 * ts.sigma[i][1] - ts.sigma[i][2]) / (2 * h);
        fexpr[i] = dsig0 * geo.tangent[i].col(0) + ts.sigma[i][0] * geo.curvature[i].col(0);
    }
    for (int i = 1; i < 3; ++i) {
        CHECK((fexpr[i] - fexpr[0]).norm() <= 2.0 * ts.residual_norm);
        CHECK((pg.field[i].col(0) - pg.field[0].col(0)).norm() <= 6.0 * h);
    }
}

TEST_CASE("projected gravity with sigma = 0 is g; geometry precondition enforced") {
    const Eigen::Vector2d g(0.0, -1.0);
    const NetworkState s = catenary_state(24);
    TensionSolution zero;
    zero.sigma = {Eigen::VectorXd::Zero(25)};
    const ProjectedGravity pg = projected_gravity(s, zero, g);
    for (int j = 0; j <= 24; ++j) CHECK((pg.field[0].col(j) - g).norm() == 0.0);

    NetworkState shrunk = s;
    shrunk.nodes() *= 0.5; // edges now far from unit speed
    CHECK_THROWS_AS(solve_tension_bvp(shrunk, 0.05, g), GeometryTooSlack);

    TensionSolution wrong;
    wrong.sigma = {Eigen::VectorXd::Zero(7)};
    CHECK_THROWS_AS(projected_gravity(s, wrong, g), ShapeMismatch);
}
