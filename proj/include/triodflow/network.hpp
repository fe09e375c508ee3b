#ifndef TRIODFLOW_NETWORK_HPP
#define TRIODFLOW_NETWORK_HPP

#include <Eigen/Core>
#include <vector>

#include "triodflow/errors.hpp"

namespace triodflow {

enum class TopologyKind {
    Triod, // 3 arms, shared free junction at s=0, pinned at s=1
    Cord   // 1 arm, both ends pinned
};

inline int arm_count(TopologyKind k) { return k == TopologyKind::Triod ? 3 : 1; }

/// Uniform arclength grid on an arm of length 1: m edges, step h = 1/m.
struct Grid {
    int m;
    explicit Grid(int m_) : m(m_) {
        if (m < 2) throw ValidationError("Grid: m must be >= 2");
    }
    double h() const { return 1.0 / m; }
};

/// Per-arm initial shape choice.
struct ArmShape {
    enum class Kind { CircularArc, ExplicitPolyline };
    Kind kind = Kind::CircularArc;
    Eigen::MatrixXd polyline; // d x (m+1), only for ExplicitPolyline

    static ArmShape circular_arc() { return {}; }
    static ArmShape explicit_polyline(Eigen::MatrixXd nodes) {
        ArmShape s;
        s.kind = Kind::ExplicitPolyline;
        s.polyline = std::move(nodes);
        return s;
    }
};

/// Shape specification for build_initial; empty = circular arc on every arm.
struct InitialShape {
    std::vector<ArmShape> arms;
    static InitialShape circular_arcs() { return {}; }
};

/// Discrete network on a uniform arclength grid. Node positions live in one
/// d x ncols matrix; for the Triod the junction occupies a single shared
/// column, so the junction identity of the three arms is exact by
/// construction. Pinned end columns are held fixed by the solvers.
class NetworkState {
public:
    NetworkState(TopologyKind topology, Grid grid, int dim);

    TopologyKind topology() const { return topology_; }
    const Grid& grid() const { return grid_; }
    int arms() const { return arm_count(topology_); }
    int dim() const { return dim_; }
    int m() const { return grid_.m; }
    double h() const { return grid_.h(); }

    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    /// Column of node j of arm i (j = 0 is the junction side for Triod).
    Eigen::Index col(int arm, int j) const {
        if (topology_ == TopologyKind::Cord) return j;
        return j == 0 ? 0 : 1 + static_cast<Eigen::Index>(arm) * grid_.m + (j - 1);
    }
    Eigen::MatrixXd::ColXpr node(int arm, int j) { return nodes_.col(col(arm, j)); }
    Eigen::MatrixXd::ConstColXpr node(int arm, int j) const { return nodes_.col(col(arm, j)); }

    Eigen::MatrixXd& nodes() { return nodes_; }
    const Eigen::MatrixXd& nodes() const { return nodes_; }

    /// Pinned endpoints: column i is alpha^i(1); for Cord, columns are
    /// alpha(0), alpha(1).
    Eigen::MatrixXd& pins() { return pins_; }
    const Eigen::MatrixXd& pins() const { return pins_; }

    bool is_free(int /*arm*/, int j) const {
        if (j == grid_.m) return false;
        if (j == 0) return topology_ == TopologyKind::Triod;
        return true;
    }

private:
    TopologyKind topology_;
    Grid grid_;
    int dim_;
    Eigen::MatrixXd nodes_;
    Eigen::MatrixXd pins_;
    double time_ = 0.0;
};

struct ValidationReport {
    bool junction_consistent = true;
    bool pins_consistent = true;
    bool finite = true;
    double min_edge_length = 0.0;
    double max_edge_length = 0.0;
    bool ok() const { return junction_consistent && pins_consistent && finite; }
};

/// Build the t=0 state: junction at the origin (Triod), each arm a discrete
/// unit-speed curve of total length 1 (every edge of length exactly h). The
/// canonical shape is the circular arc through the endpoints, sagging along
/// gravity projected orthogonal to the chord (first coordinate axis orthogonal
/// to the chord when that projection vanishes).
NetworkState build_initial(TopologyKind topology, Grid grid,
                           const Eigen::MatrixXd& pins, const InitialShape& shape,
                           const Eigen::VectorXd& gravity);

/// Difference-quotient edge tangents d[i].col(j) = (x_{j+1} - x_j)/h.
std::vector<Eigen::MatrixXd> edge_tangents(const NetworkState& state);

ValidationReport validate_state(const NetworkState& state);

namespace detail {
/// Half-opening angle per edge of the discrete circular arc with m chords of
/// length h = 1/m spanning a chord of length `chord`: solves
/// sin(m b) = m * chord * sin(b) on (0, pi/m).
double discrete_arc_angle(int m, double chord);
} // namespace detail

} // namespace triodflow

#endif
