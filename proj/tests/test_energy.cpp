#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "triodflow/energy.hpp"

using namespace triodflow;
using test_util::perturb_free;
using test_util::random_vec;

namespace {

NetworkState reference_triod(int m) {
    Eigen::MatrixXd pins(2, 3);
    for (int i = 0; i < 3; ++i) {
        const double a = M_PI / 180.0 * (i == 0 ? 150.0 : i == 1 ? 30.0 : 270.0);
        pins.col(i) << 0.8 * std::cos(a), 0.8 * std::sin(a);
    }
    return build_initial(TopologyKind::Triod, Grid(m), pins, InitialShape::circular_arcs(),
                         Eigen::Vector2d(0.0, -1.0));
}

// central finite difference of total_energy over the free nodes
Eigen::MatrixXd fd_gradient(const NetworkState& s, const RegularizationParams& p,
                            const Eigen::VectorXd& g, const FreeDofLayout& layout) {
    Eigen::MatrixXd fd(layout.dim, layout.free_nodes());
    NetworkState work = s;
    const double delta = 1e-6;
    auto probe = [&](int arm, int j, int block) {
        for (int c = 0; c < layout.dim; ++c) {
            const double saved = work.node(arm, j)[c];
            work.node(arm, j)[c] = saved + delta;
            const double ep = total_energy(work, p, g).total;
            work.node(arm, j)[c] = saved - delta;
            const double em = total_energy(work, p, g).total;
            work.node(arm, j)[c] = saved;
            fd(c, block) = (ep - em) / (2 * delta);
        }
    };
    if (layout.has_junction()) probe(0, 0, layout.junction_block());
    for (int i = 0; i < arm_count(layout.topology); ++i)
        for (int j = 1; j < layout.m; ++j) probe(i, j, layout.interior_block(i, j));
    return fd;
}

} // namespace

TEST_CASE("total_energy: breakdown, translation rule, bounds") {
    const Eigen::Vector2d g(0.0, -1.0);
    RegularizationParams p(0.05);
    NetworkState s = reference_triod(16);
    const EnergyBreakdown e = total_energy(s, p, g);
    CHECK(e.total == e.q_part + e.gravity_part);
    CHECK(e.q_part >= 0.0);
    // all tangents have norm 1 here, so q_part < 3 * max_{|tau|<=1} Q
    const double qmax = q_eps(p, Eigen::Vector2d(1.0, 0.0));
    CHECK(e.q_part < 3.0 * qmax + 1e-12);
    CHECK(e.gravity_part >= -3.0 * 1.8);
    CHECK(e.gravity_part <= 3.0 * 1.8);

    // rigid translation of everything changes total by -3 g.v
    const Eigen::Vector2d v(0.3, -0.7);
    NetworkState t = s;
    t.nodes().colwise() += v;
    t.pins().colwise() += v;
    const EnergyBreakdown et = total_energy(t, p, g);
    CHECK(et.q_part == doctest::Approx(e.q_part).epsilon(1e-12));
    CHECK(et.total - e.total == doctest::Approx(-3.0 * g.dot(v)).epsilon(1e-10));
}

TEST_CASE("energy_gradient matches finite differences on random admissible states") {
    const Eigen::Vector2d g(0.0, -1.0);
    RegularizationParams p(0.1);
    std::mt19937 rng(101);
    for (int trial = 0; trial < 6; ++trial) {
        NetworkState s = reference_triod(16);
        perturb_free(s, rng, 0.02);
        const GradientField grad = energy_gradient(s, p, g);
        const Eigen::MatrixXd fd = fd_gradient(s, p, g, grad.layout());
        CHECK((fd - grad.values()).norm() <= 1e-6 * grad.values().norm());
    }
}

TEST_CASE("gradient structure: counts, equal-tangent reduction, junction weight") {
    const Eigen::Vector2d g(0.0, -1.0);
    RegularizationParams p(0.2);
    NetworkState s = reference_triod(16);
    const GradientField grad = energy_gradient(s, p, g);
    CHECK(grad.values().cols() == 3 * 15 + 1);

    // straight arms: equal tangents per arm make the interior gradient -h g
    NetworkState straight(TopologyKind::Cord, Grid(8), 2);
    const Eigen::Vector2d dir = Eigen::Vector2d(1.0, 2.0).normalized();
    for (int j = 0; j <= 8; ++j) straight.node(0, j) = 0.7 * (j / 8.0) * dir;
    straight.pins().col(0) = straight.node(0, 0);
    straight.pins().col(1) = straight.node(0, 8);
    const GradientField gs = energy_gradient(straight, p, g);
    CHECK(gs.values().cols() == 7);
    for (int j = 1; j < 8; ++j)
        CHECK((gs.interior(0, j) + (1.0 / 8.0) * g).norm() < 1e-14);

    CHECK_THROWS_AS(gs.junction(), WrongTopology);
}

TEST_CASE("constraint_operator_pairing: zero, monotone, kernel lower bounds") {
    const Eigen::Vector2d g(0.0, -1.0);
    const double eps = 0.1;
    RegularizationParams p(eps);
    std::mt19937 rng(55);

    NetworkState a = reference_triod(12);
    CHECK(constraint_operator_pairing(a, a, p) == 0.0);

    const double h = a.h();
    for (int trial = 0; trial < 100; ++trial) {
        NetworkState x = a, y = a;
        perturb_free(x, rng, 0.05);
        perturb_free(y, rng, 0.05);
        const double pairing = constraint_operator_pairing(x, y, p);
        CHECK(pairing >= 0.0);

        const auto dx = edge_tangents(x);
        const auto dy = edge_tangents(y);
        double lower_g = 0.0, lower_d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 12; ++j) {
                lower_g += h * (g_eps(p, dx[i].col(j)) - g_eps(p, dy[i].col(j))).squaredNorm();
                lower_d += h * (dx[i].col(j) - dy[i].col(j)).squaredNorm();
            }
        CHECK(pairing >= eps * lower_g - 1e-12);
        const double c0 = eps / std::pow(eps + 1.0 / std::sqrt(eps), 2);
        CHECK(pairing >= c0 * lower_d - 1e-12);
    }

    NetworkState cord(TopologyKind::Cord, Grid(12), 2);
    CHECK_THROWS_AS(constraint_operator_pairing(a, cord, p), TopologyMismatch);
    NetworkState moved = a;
    moved.pins().col(0) += Eigen::Vector2d(0.01, 0.0);
    CHECK_THROWS_AS(constraint_operator_pairing(a, moved, p), TopologyMismatch);
}
