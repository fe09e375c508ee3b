#ifndef TRIODFLOW_IO_HPP
#define TRIODFLOW_IO_HPP

#include <string>

#include "triodflow/evolve.hpp"
#include "triodflow/network.hpp"

namespace triodflow {

/// Fixed 17-significant-digit formatting used by every writer so re-exports
/// are byte-identical.
std::string format_real(double v);

void ensure_directory(const std::string& path);

/// One record per node (arm_index, node_index, x, y[, z]); '#' header lines
/// carry topology, m, time, eps.
void write_snapshot_csv(const std::string& path, const NetworkState& state, double eps);
void write_snapshot_json(const std::string& path, const NetworkState& state, double eps);

/// Per-step series: t, energy_total, q_part, gravity_part, dissipation_cum,
/// min_sigma, max_stretch, junction_residual, newton_iters.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Same series in long format: t, series_name, value.
void write_long_csv(const std::string& path, const Trajectory& traj);

} // namespace triodflow

#endif
