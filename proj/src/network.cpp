#include "triodflow/network.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace triodflow {

NetworkState::NetworkState(TopologyKind topology, Grid grid, int dim)
    : topology_(topology), grid_(grid), dim_(dim) {
    if (dim < 2) throw ValidationError("NetworkState: dimension must be >= 2");
    const Eigen::Index ncols =
        topology == TopologyKind::Cord ? grid.m + 1 : 1 + 3 * static_cast<Eigen::Index>(grid.m);
    nodes_.setZero(dim, ncols);
    pins_.setZero(dim, topology == TopologyKind::Cord ? 2 : 3);
}

namespace detail {

double discrete_arc_angle(int m, double chord) {
    // f(b) = sin(m b) - m*chord*sin(b): positive near 0 (chord < 1), negative
    // at pi/m. Bisection, then Newton polish.
    const double mc = m * chord;
    auto f = [&](double b) { return std::sin(m * b) - mc * std::sin(b); };
    double lo = 0.0, hi = std::numbers::pi / m;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double b = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double df = m * std::cos(m * b) - mc * std::cos(b);
        if (df == 0.0) break;
        b -= f(b) / df;
    }
    return b;
}

// Sag direction: gravity projected orthogonal to the chord; deterministic
// coordinate-axis fallback when the projection vanishes.
Eigen::VectorXd sag_direction(const Eigen::VectorXd& chord_dir, const Eigen::VectorXd& gravity) {
    Eigen::VectorXd s = gravity - gravity.dot(chord_dir) * chord_dir;
    if (s.norm() > 1e-12) return s.normalized();
    for (Eigen::Index k = 0; k < chord_dir.size(); ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(chord_dir.size(), k);
        Eigen::VectorXd cand = e - e.dot(chord_dir) * chord_dir;
        if (cand.norm() > 1e-8) return cand.normalized();
    }
    throw Error("sag_direction: no axis orthogonal to the chord"); // unreachable for d >= 2
}

// Discrete circular arc from a to b: m chords of length exactly h, constant
// turning, belly pointing along the sag direction.
Eigen::MatrixXd circular_arc(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int m,
                             const Eigen::VectorXd& gravity) {
    const double h = 1.0 / m;
    const Eigen::VectorXd chord = b - a;
    const double L = chord.norm();
    const Eigen::VectorXd u = chord / L;
    const Eigen::VectorXd v = sag_direction(u, gravity);
    const double beta = discrete_arc_angle(m, L);
    const double R = h / (2.0 * std::sin(beta));
    const double theta = m * beta;
    const Eigen::VectorXd center = 0.5 * (a + b) - R * std::cos(theta) * v;
    Eigen::MatrixXd nodes(a.size(), m + 1);
    for (int j = 0; j <= m; ++j) {
        const double phi = -theta + 2.0 * beta * j;
        nodes.col(j) = center + R * (std::sin(phi) * u + std::cos(phi) * v);
    }
    nodes.col(0) = a;
    nodes.col(m) = b;
    return nodes;
}

void check_polyline(const Eigen::MatrixXd& poly, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b, int m, int dim) {
    if (poly.rows() != dim || poly.cols() != m + 1)
        throw ShapeMismatch("explicit polyline: wrong node count or dimension");
    const double h = 1.0 / m;
    for (int j = 0; j < m; ++j) {
        const double len = (poly.col(j + 1) - poly.col(j)).norm();
        if (std::abs(len - h) > 1e-10)
            throw ShapeMismatch("explicit polyline: non-uniform edge lengths");
    }
    if ((poly.col(0) - a).norm() > 1e-12 || (poly.col(m) - b).norm() > 1e-12)
        throw ShapeMismatch("explicit polyline: endpoints do not match junction/pins");
}

} // namespace detail

NetworkState build_initial(TopologyKind topology, Grid grid, const Eigen::MatrixXd& pins,
                           const InitialShape& shape, const Eigen::VectorXd& gravity) {
    const int arms = arm_count(topology);
    const int dim = static_cast<int>(gravity.size());
    if (pins.rows() != dim)
        throw InvalidPins("build_initial: pin dimension does not match gravity");
    if (pins.cols() != (topology == TopologyKind::Cord ? 2 : 3))
        throw InvalidPins("build_initial: wrong number of pins for the topology");
    if (std::abs(gravity.norm() - 1.0) > 1e-12)
        throw ValidationError("build_initial: gravity must be a unit vector");
    if (!shape.arms.empty() && static_cast<int>(shape.arms.size()) != arms)
        throw ShapeMismatch("build_initial: shape list does not match arm count");

    NetworkState state(topology, grid, dim);
    state.pins() = pins;

    for (int i = 0; i < arms; ++i) {
        const Eigen::VectorXd start = topology == TopologyKind::Cord
                                          ? Eigen::VectorXd(pins.col(0))
                                          : Eigen::VectorXd(Eigen::VectorXd::Zero(dim));
        const Eigen::VectorXd end = topology == TopologyKind::Cord ? pins.col(1) : pins.col(i);
        const double chord = (end - start).norm();
        if (chord >= 1.0)
            throw InvalidPins("build_initial: chord length must be strictly less than 1");

        const ArmShape arc_default = ArmShape::circular_arc();
        const ArmShape& as = shape.arms.empty() ? arc_default : shape.arms[i];
        Eigen::MatrixXd arm;
        if (as.kind == ArmShape::Kind::CircularArc) {
            arm = detail::circular_arc(start, end, grid.m, gravity);
        } else {
            detail::check_polyline(as.polyline, start, end, grid.m, dim);
            arm = as.polyline;
            arm.col(0) = start;
            arm.col(grid.m) = end;
        }
        for (int j = 0; j <= grid.m; ++j) state.node(i, j) = arm.col(j);
    }
    state.set_time(0.0);
    return state;
}

std::vector<Eigen::MatrixXd> edge_tangents(const NetworkState& state) {
    const double inv_h = state.m();
    std::vector<Eigen::MatrixXd> out(state.arms());
    for (int i = 0; i < state.arms(); ++i) {
        Eigen::MatrixXd d(state.dim(), state.m());
        for (int j = 0; j < state.m(); ++j)
            d.col(j) = (state.node(i, j + 1) - state.node(i, j)) * inv_h;
        out[i] = std::move(d);
    }
    return out;
}

ValidationReport validate_state(const NetworkState& state) {
    ValidationReport rep;
    rep.finite = state.nodes().allFinite();

    // junction identity is structural (single shared column); report the
    // stored-once property explicitly
    rep.junction_consistent = true;
    if (state.topology() == TopologyKind::Triod) {
        for (int i = 1; i < 3; ++i)
            rep.junction_consistent =
                rep.junction_consistent && state.col(i, 0) == state.col(0, 0);
    }

    rep.pins_consistent = true;
    for (int i = 0; i < state.arms(); ++i) {
        const Eigen::VectorXd end_pin =
            state.topology() == TopologyKind::Cord ? state.pins().col(1) : state.pins().col(i);
        if (state.node(i, state.m()) != end_pin) rep.pins_consistent = false;
    }
    if (state.topology() == TopologyKind::Cord)
        if (state.node(0, 0) != state.pins().col(0)) rep.pins_consistent = false;

    rep.min_edge_length = std::numeric_limits<double>::infinity();
    rep.max_edge_length = 0.0;
    for (int i = 0; i < state.arms(); ++i)
        for (int j = 0; j < state.m(); ++j) {
            const double len = (state.node(i, j + 1) - state.node(i, j)).norm();
            rep.min_edge_length = std::min(rep.min_edge_length, len);
            rep.max_edge_length = std::max(rep.max_edge_length, len);
        }
    return rep;
}

} // namespace triodflow
