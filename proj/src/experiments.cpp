#include "triodflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "triodflow/io.hpp"

namespace triodflow {

RunResult run_single(const RunConfig& config, double eps, bool stop_at_steady) {
    const RegularizationParams p(eps, config.root_tol);
    const NetworkState state0 = build_initial(config.topology, Grid(config.m), config.pins,
                                              config.initial_shape(), config.gravity);
    StepParams sp;
    sp.dt = config.dt;
    sp.newton_tol = config.newton_tol;

    RunResult out;
    out.eps = eps;
    out.trajectory = run_flow(state0, p, config.gravity, sp, config.t_end, config.record_every,
                              stop_at_steady ? std::optional<double>(config.vel_tol)
                                             : std::nullopt);
    // dissipation tail window: second half of the realized run
    const double t_last =
        out.trajectory.steps.empty() ? config.t_end : out.trajectory.steps.back().t;
    out.certificate = certify(out.trajectory, p, config.gravity, 0.5 * t_last);
    out.steady_time = steady_detect(out.trajectory, config.vel_tol);
    return out;
}

std::vector<SweepRow> epsilon_sweep(const RunConfig& config) {
    const std::vector<double>& eps = config.eps_values;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && eps[i] <= 1.0))
            throw ValidationError("epsilon_sweep: eps values must lie in (0,1]");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw ValidationError("epsilon_sweep: eps list must be strictly decreasing");
    }

    std::vector<SweepRow> rows;
    for (double e : eps) {
        SweepRow row;
        row.eps = e;
        try {
            const RunResult res = run_single(config, e, false);
            const NetworkState& final_state = res.trajectory.snapshots.back().state;
            const RegularizationParams p(e, config.root_tol);
            const EdgeFields ef = edge_fields(final_state, p);
            double excess = 0.0;
            for (std::size_t i = 0; i < ef.stretch.size(); ++i)
                for (int j = 0; j < ef.stretch[i].size(); ++j)
                    if (ef.sigma[i][j] > std::sqrt(e))
                        excess = std::max(excess, std::max(ef.stretch[i][j] - 1.0, 0.0));
            row.stretch_excess_supported = excess;
            row.min_sigma = res.certificate.min_sigma;
            row.tail_slack_max = res.certificate.dissipation_inequality_slack;
            row.junction_residual_max = res.certificate.junction_residual_corrected;
            row.constraint_bound_max_residual = res.certificate.constraint_bound_max_residual;
            row.final_energy = res.trajectory.steps.empty()
                                   ? res.trajectory.initial_energy
                                   : res.trajectory.steps.back().report.energy_after;
        } catch (const Error& err) {
            row.failed = true;
            row.error = err.what();
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.eps > b.eps; });
    return rows;
}

namespace {

nlohmann::json certificate_json(const CertificateReport& cert) {
    nlohmann::json j;
    j["max_stretch_minus_one"] = cert.max_stretch_minus_one;
    j["constraint_bound_max_residual"] = cert.constraint_bound_max_residual;
    j["min_sigma"] = cert.min_sigma;
    j["junction_force"] =
        std::vector<double>(cert.junction_force.begin(), cert.junction_force.end());
    j["junction_residual_corrected"] = cert.junction_residual_corrected;
    j["energy_balance_residual"] = cert.energy_balance_residual;
    j["dissipation_inequality_slack"] = cert.dissipation_inequality_slack;
    return j;
}

nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& r : rows) {
        nlohmann::json j;
        j["eps"] = r.eps;
        j["failed"] = r.failed;
        if (r.failed) j["error"] = r.error;
        j["stretch_excess_supported"] = r.stretch_excess_supported;
        j["min_sigma"] = r.min_sigma;
        j["tail_slack_max"] = r.tail_slack_max;
        j["junction_residual_max"] = r.junction_residual_max;
        j["constraint_bound_max_residual"] = r.constraint_bound_max_residual;
        j["final_energy"] = r.final_energy;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace

void export_series(const std::string& out_dir, const RunResult& result,
                   const std::vector<SweepRow>& sweep) {
    ensure_directory(out_dir);
    write_trajectory_csv(out_dir + "/trajectory.csv", result.trajectory);
    write_long_csv(out_dir + "/series_long.csv", result.trajectory);

    if (!result.trajectory.snapshots.empty()) ensure_directory(out_dir + "/snapshots");
    for (std::size_t k = 0; k < result.trajectory.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%06zu", k);
        const Snapshot& snap = result.trajectory.snapshots[k];
        write_snapshot_csv(out_dir + "/snapshots/" + name + ".csv", snap.state, result.eps);
        write_snapshot_json(out_dir + "/snapshots/" + name + ".json", snap.state, result.eps);
    }

    nlohmann::json summary;
    summary["eps"] = result.eps;
    summary["certificate"] = certificate_json(result.certificate);
    if (result.steady_time)
        summary["steady_time"] = *result.steady_time;
    else
        summary["steady_time"] = nullptr;
    if (!sweep.empty()) summary["sweep"] = sweep_json(sweep);
    std::ofstream out(out_dir + "/summary.json");
    if (!out) throw IoError("cannot open for writing: " + out_dir + "/summary.json");
    out << summary.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + out_dir + "/summary.json");

    if (!sweep.empty()) write_sweep_csv(out_dir + "/sweep.csv", sweep);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "eps,failed,stretch_excess_supported,min_sigma,tail_slack_max,"
           "junction_residual_max,constraint_bound_max_residual,final_energy\n";
    for (const SweepRow& r : rows)
        out << format_real(r.eps) << "," << (r.failed ? 1 : 0) << ","
            << format_real(r.stretch_excess_supported) << "," << format_real(r.min_sigma) << ","
            << format_real(r.tail_slack_max) << "," << format_real(r.junction_residual_max) << ","
            << format_real(r.constraint_bound_max_residual) << "," << format_real(r.final_energy) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace triodflow
