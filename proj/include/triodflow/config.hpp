#ifndef TRIODFLOW_CONFIG_HPP
#define TRIODFLOW_CONFIG_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "triodflow/network.hpp"

namespace triodflow {

/// Experiment plan. Parsed from `key = value` text: `#` starts a comment,
/// vectors are comma-separated reals, lists of vectors are separated by `;`.
struct RunConfig {
    TopologyKind topology = TopologyKind::Cord;
    int dimension = 2;
    Eigen::MatrixXd pins;              // d x 2 (Cord: alpha(0), alpha(1)) or d x 3
    Eigen::VectorXd gravity;           // unit, default -last axis
    std::vector<double> eps_values{0.05}; // one value = plain run, several = sweep
    int m = 64;
    double dt = 1e-3;
    double t_end = 2.0;
    double newton_tol = 1e-10;
    double vel_tol = 1e-6;
    double root_tol = 1e-12;
    int record_every = 1;
    int samples = 1001; // catenary oracle sampling
    std::string out_dir = "out";
    bool shape_polyline = false;
    std::vector<Eigen::MatrixXd> polylines; // per arm, d x (m+1), when shape = polyline

    double eps() const { return eps_values.front(); }
    bool is_sweep() const { return eps_values.size() > 1; }
    InitialShape initial_shape() const;
};

/// Parse and validate; ParseError carries the offending line number,
/// ValidationError names the violated invariant.
RunConfig parse_config(const std::string& text);

/// Inverse of parse_config up to equivalence (used for round-trip checks).
std::string export_config(const RunConfig& config);

} // namespace triodflow

#endif
