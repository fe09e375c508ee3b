#include "triodflow/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace triodflow {

namespace {

const char* topology_name(TopologyKind k) {
    return k == TopologyKind::Triod ? "triod" : "cord";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

} // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory: " + path);
}

void write_snapshot_csv(const std::string& path, const NetworkState& state, double eps) {
    std::ofstream out = open_out(path);
    out << "# topology=" << topology_name(state.topology()) << ",m=" << state.m()
        << ",time=" << format_real(state.time()) << ",eps=" << format_real(eps)
        << ",dim=" << state.dim() << "\n";
    out << "arm_index,node_index,x,y" << (state.dim() == 3 ? ",z" : "") << "\n";
    for (int i = 0; i < state.arms(); ++i)
        for (int j = 0; j <= state.m(); ++j) {
            out << i << "," << j;
            for (int c = 0; c < state.dim(); ++c) out << "," << format_real(state.node(i, j)[c]);
            out << "\n";
        }
    if (!out) throw IoError("write failed: " + path);
}

void write_snapshot_json(const std::string& path, const NetworkState& state, double eps) {
    nlohmann::json doc;
    doc["topology"] = topology_name(state.topology());
    doc["m"] = state.m();
    doc["time"] = state.time();
    doc["eps"] = eps;
    doc["dim"] = state.dim();
    nlohmann::json nodes = nlohmann::json::array();
    for (int i = 0; i < state.arms(); ++i)
        for (int j = 0; j <= state.m(); ++j) {
            nlohmann::json rec;
            rec["arm"] = i;
            rec["node"] = j;
            std::vector<double> pos(state.node(i, j).begin(), state.node(i, j).end());
            rec["position"] = pos;
            nodes.push_back(std::move(rec));
        }
    doc["nodes"] = std::move(nodes);
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr const char* kTrajectoryHeader =
    "t,energy_total,q_part,gravity_part,dissipation_cum,min_sigma,max_stretch,"
    "junction_residual,newton_iters";

struct TrajectoryRow {
    double t, energy_total, q_part, gravity_part, dissipation_cum, min_sigma, max_stretch,
        junction_residual;
    int newton_iters;
};

TrajectoryRow make_row(const StepRecord& rec, double dissipation_cum) {
    return {rec.t,
            rec.report.energy_after,
            rec.q_part,
            rec.gravity_part,
            dissipation_cum,
            rec.min_sigma,
            rec.max_stretch_minus_one + 1.0,
            rec.junction_residual_corrected,
            rec.report.newton_iters};
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << kTrajectoryHeader << "\n";
    double cum = 0.0;
    for (const StepRecord& rec : traj.steps) {
        cum += rec.report.displacement_sq / rec.dt;
        const TrajectoryRow r = make_row(rec, cum);
        out << format_real(r.t) << "," << format_real(r.energy_total) << ","
            << format_real(r.q_part) << "," << format_real(r.gravity_part) << ","
            << format_real(r.dissipation_cum) << "," << format_real(r.min_sigma) << ","
            << format_real(r.max_stretch) << "," << format_real(r.junction_residual) << ","
            << r.newton_iters << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_long_csv(const std::string& path, const Trajectory& traj) {
    static const char* names[] = {"energy_total", "q_part",     "gravity_part",
                                  "dissipation_cum", "min_sigma", "max_stretch",
                                  "junction_residual", "newton_iters"};
    std::ofstream out = open_out(path);
    out << "t,series_name,value\n";
    double cum = 0.0;
    for (const StepRecord& rec : traj.steps) {
        cum += rec.report.displacement_sq / rec.dt;
        const TrajectoryRow r = make_row(rec, cum);
        const double values[] = {r.energy_total, r.q_part,     r.gravity_part,
                                 r.dissipation_cum, r.min_sigma, r.max_stretch,
                                 r.junction_residual, static_cast<double>(r.newton_iters)};
        for (int k = 0; k < 8; ++k)
            out << format_real(r.t) << "," << names[k] << "," << format_real(values[k]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace triodflow
