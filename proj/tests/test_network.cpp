#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "triodflow/network.hpp"

using namespace triodflow;

namespace {

Eigen::MatrixXd reference_triod_pins() {
    Eigen::MatrixXd pins(2, 3);
    for (int i = 0; i < 3; ++i) {
        const double a = M_PI / 180.0 * (i == 0 ? 150.0 : i == 1 ? 30.0 : 270.0);
        pins.col(i) << 0.8 * std::cos(a), 0.8 * std::sin(a);
    }
    return pins;
}

Eigen::MatrixXd cord_pins(double span) {
    Eigen::MatrixXd pins(2, 2);
    pins.col(0) << 0.0, 0.0;
    pins.col(1) << span, 0.0;
    return pins;
}

} // namespace

TEST_CASE("circular arc initializer: geometry of the m=100 chord-0.8 arc") {
    const Eigen::Vector2d g(0.0, -1.0);
    const NetworkState s = build_initial(TopologyKind::Cord, Grid(100), cord_pins(0.8),
                                         InitialShape::circular_arcs(), g);
    // discrete half-angle/radius agree with the scalar root sin(t)/t = 0.8 to O(1/m^2)
    const double beta = detail::discrete_arc_angle(100, 0.8);
    CHECK(100 * beta == doctest::Approx(1.1311025856512829).epsilon(1e-4));
    CHECK(0.01 / (2 * std::sin(beta)) == doctest::Approx(0.44204655381642739).epsilon(1e-4));
    // mid node sags along gravity by about the sagitta
    CHECK(s.node(0, 50).y() == doctest::Approx(-0.25388397586592301).epsilon(1e-3));
    CHECK(s.node(0, 50).x() == doctest::Approx(0.4).epsilon(1e-12));

    // every edge has length exactly h (1e-9 relative and 1e-10 absolute)
    const ValidationReport rep = validate_state(s);
    CHECK(rep.ok());
    CHECK(rep.min_edge_length >= 0.01 * (1 - 1e-9));
    CHECK(rep.max_edge_length <= 0.01 * (1 + 1e-9));
}

TEST_CASE("triod build: shared junction at the origin, pins exact") {
    const Eigen::Vector2d g(0.0, -1.0);
    const NetworkState s = build_initial(TopologyKind::Triod, Grid(64), reference_triod_pins(),
                                         InitialShape::circular_arcs(), g);
    CHECK(s.node(0, 0) == s.node(1, 0));
    CHECK(s.node(1, 0) == s.node(2, 0));
    CHECK(s.node(0, 0).norm() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(s.node(i, 64) == s.pins().col(i));
    CHECK(validate_state(s).ok());
    const auto tangents = edge_tangents(s);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 64; ++j)
            CHECK(tangents[i].col(j).norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("build_initial is deterministic (bit-identical)") {
    const Eigen::Vector2d g(0.0, -1.0);
    const NetworkState a = build_initial(TopologyKind::Triod, Grid(32), reference_triod_pins(),
                                         InitialShape::circular_arcs(), g);
    const NetworkState b = build_initial(TopologyKind::Triod, Grid(32), reference_triod_pins(),
                                         InitialShape::circular_arcs(), g);
    CHECK(a.nodes() == b.nodes());
}

TEST_CASE("sag direction falls back to a coordinate axis for chord parallel to g") {
    const Eigen::Vector2d g(0.0, -1.0);
    Eigen::MatrixXd pins(2, 2);
    pins.col(0) << 0.0, 0.0;
    pins.col(1) << 0.0, -0.8; // chord along gravity
    const NetworkState s =
        build_initial(TopologyKind::Cord, Grid(20), pins, InitialShape::circular_arcs(), g);
    CHECK(s.node(0, 10).x() > 0.1); // belly bulges along +x
    CHECK(validate_state(s).ok());
}

TEST_CASE("edge_tangents: affine sequences and linearity") {
    const Eigen::Vector2d g(0.0, -1.0);
    NetworkState s(TopologyKind::Cord, Grid(4), 2);
    const Eigen::Vector2d dir = Eigen::Vector2d(3.0, 4.0).normalized();
    for (int j = 0; j <= 4; ++j) s.node(0, j) = 0.25 * j * dir;
    s.pins().col(0) = s.node(0, 0);
    s.pins().col(1) = s.node(0, 4);
    auto t = edge_tangents(s);
    for (int j = 0; j < 4; ++j) CHECK((t[0].col(j) - dir).norm() < 1e-14);

    s.nodes() *= 2.0;
    auto t2 = edge_tangents(s);
    for (int j = 0; j < 4; ++j) CHECK((t2[0].col(j) - 2.0 * t[0].col(j)).norm() < 1e-14);
}

TEST_CASE("invalid pins rejected") {
    const Eigen::Vector2d g(0.0, -1.0);
    CHECK_THROWS_AS(build_initial(TopologyKind::Cord, Grid(10), cord_pins(1.0),
                                  InitialShape::circular_arcs(), g),
                    InvalidPins);
    Eigen::MatrixXd pins = reference_triod_pins();
    pins.col(2) << 0.0, -1.0; // |pin| = 1, not strictly slack
    CHECK_THROWS_AS(build_initial(TopologyKind::Triod, Grid(10), pins,
                                  InitialShape::circular_arcs(), g),
                    InvalidPins);
    CHECK_THROWS_AS(build_initial(TopologyKind::Cord, Grid(10), cord_pins(0.5),
                                  InitialShape::circular_arcs(), Eigen::Vector2d(0.0, -2.0)),
                    ValidationError);
}

TEST_CASE("explicit polyline: accepted when unit speed, rejected otherwise") {
    const Eigen::Vector2d g(0.0, -1.0);
    const int m = 16;
    const NetworkState arc = build_initial(TopologyKind::Cord, Grid(m), cord_pins(0.7),
                                           InitialShape::circular_arcs(), g);
    Eigen::MatrixXd poly(2, m + 1);
    for (int j = 0; j <= m; ++j) poly.col(j) = arc.node(0, j);

    InitialShape shape;
    shape.arms.push_back(ArmShape::explicit_polyline(poly));
    const NetworkState s = build_initial(TopologyKind::Cord, Grid(m), cord_pins(0.7), shape, g);
    CHECK(s.nodes() == arc.nodes());

    Eigen::MatrixXd bad = poly;
    bad.col(3) += Eigen::Vector2d(1e-6, 0.0); // breaks edge uniformity
    InitialShape bad_shape;
    bad_shape.arms.push_back(ArmShape::explicit_polyline(bad));
    CHECK_THROWS_AS(build_initial(TopologyKind::Cord, Grid(m), cord_pins(0.7), bad_shape, g),
                    ShapeMismatch);

    InitialShape short_shape;
    short_shape.arms.push_back(ArmShape::explicit_polyline(poly.leftCols(m)));
    CHECK_THROWS_AS(build_initial(TopologyKind::Cord, Grid(m), cord_pins(0.7), short_shape, g),
                    ShapeMismatch);
}

TEST_CASE("validate_state flags corruption") {
    const Eigen::Vector2d g(0.0, -1.0);
    NetworkState s = build_initial(TopologyKind::Triod, Grid(8), reference_triod_pins(),
                                   InitialShape::circular_arcs(), g);
    CHECK(validate_state(s).ok());

    NetworkState moved_pin = s;
    moved_pin.node(1, 8) += Eigen::Vector2d(1e-3, 0.0);
    CHECK_FALSE(validate_state(moved_pin).pins_consistent);

    NetworkState poisoned = s;
    poisoned.node(0, 3)[0] = std::nan("");
    CHECK_FALSE(validate_state(poisoned).finite);
}
