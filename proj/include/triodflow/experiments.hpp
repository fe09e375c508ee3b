#ifndef TRIODFLOW_EXPERIMENTS_HPP
#define TRIODFLOW_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "triodflow/config.hpp"
#include "triodflow/diagnostics.hpp"
#include "triodflow/evolve.hpp"

namespace triodflow {

struct RunResult {
    Trajectory trajectory;
    CertificateReport certificate;
    std::optional<double> steady_time;
    double eps = 0.0;
};

/// One flow run from the config's initial state at the given eps. The
/// dissipation tail window starts at t_end/2. When stop_at_steady is set the
/// run ends once the velocity drops below vel_tol.
RunResult run_single(const RunConfig& config, double eps, bool stop_at_steady);

struct SweepRow {
    double eps = 0.0;
    bool failed = false;
    std::string error;
    double stretch_excess_supported = 0.0; // final time, edges with sigma > sqrt(eps)
    double min_sigma = 0.0;                // over the whole run
    double tail_slack_max = 0.0;           // dissipation-inequality slack, tail window
    double junction_residual_max = 0.0;    // 0 for Cord
    double constraint_bound_max_residual = 0.0;        // over the whole run
    double final_energy = 0.0;
};

/// Independent runs from the same initial state, one per eps (strictly
/// decreasing values in (0,1]); table sorted by eps descending. Failed rows
/// are marked, not fatal.
std::vector<SweepRow> epsilon_sweep(const RunConfig& config);

/// Write trajectory CSV + long CSV + per-snapshot CSV/JSON + summary JSON
/// under out_dir.
void export_series(const std::string& out_dir, const RunResult& result,
                   const std::vector<SweepRow>& sweep = {});

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

} // namespace triodflow

#endif
