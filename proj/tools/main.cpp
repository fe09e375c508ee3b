#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "triodflow/catenary.hpp"
#include "triodflow/experiments.hpp"
#include "triodflow/io.hpp"
#include "triodflow/tension_bvp.hpp"

namespace {

using namespace triodflow;

struct CommonOpts {
    std::string config_path;
    std::optional<double> eps, dt, t_end;
    std::optional<int> m;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file")->required();
    cmd->add_option("--eps", o.eps, "override eps (single value)");
    cmd->add_option("--m", o.m, "override grid size m");
    cmd->add_option("--dt", o.dt, "override timestep");
    cmd->add_option("--t-end", o.t_end, "override final time");
    cmd->add_option("--out", o.out, "override output directory");
}

RunConfig load_config(const CommonOpts& o) {
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot read config: " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg = parse_config(ss.str());
    if (o.eps) {
        if (!(*o.eps > 0.0 && *o.eps <= 1.0))
            throw ValidationError("eps override must lie in (0,1]");
        cfg.eps_values = {*o.eps};
    }
    if (o.m) {
        if (*o.m < 2) throw ValidationError("m override must be >= 2");
        cfg.m = *o.m;
    }
    if (o.dt) {
        if (!(*o.dt > 0.0)) throw ValidationError("dt override must be positive");
        cfg.dt = *o.dt;
    }
    if (o.t_end) {
        if (!(*o.t_end > 0.0)) throw ValidationError("t_end override must be positive");
        cfg.t_end = *o.t_end;
    }
    if (o.out) cfg.out_dir = *o.out;
    return cfg;
}

void print_certificate(const RunResult& res) {
    const CertificateReport& c = res.certificate;
    std::printf("final time %.6g, energy %.10g\n",
                res.trajectory.steps.empty() ? 0.0 : res.trajectory.steps.back().t,
                res.trajectory.steps.empty() ? res.trajectory.initial_energy
                                             : res.trajectory.steps.back().report.energy_after);
    std::printf("min sigma            % .3e\n", c.min_sigma);
    std::printf("max stretch - 1      % .3e\n", c.max_stretch_minus_one);
    std::printf("constraint bound residual    % .3e\n", c.constraint_bound_max_residual);
    std::printf("junction residual    % .3e\n", c.junction_residual_corrected);
    std::printf("balance residual     % .3e\n", c.energy_balance_residual);
    std::printf("tail slack           % .3e\n", c.dissipation_inequality_slack);
    if (res.steady_time)
        std::printf("steady at t = %.6g\n", *res.steady_time);
    else
        std::printf("no steadiness detected\n");
}

int cmd_simulate(const CommonOpts& o, bool stop_at_steady) {
    const RunConfig cfg = load_config(o);
    const RunResult res = run_single(cfg, cfg.eps(), stop_at_steady);
    export_series(cfg.out_dir, res);
    print_certificate(res);
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    const RunConfig cfg = load_config(o);
    const std::vector<SweepRow> rows = epsilon_sweep(cfg);
    ensure_directory(cfg.out_dir);
    write_sweep_csv(cfg.out_dir + "/sweep.csv", rows);
    std::printf("%-10s %-22s %-12s %-14s %-14s\n", "eps", "stretch_excess(sig>sqrt(eps))", "min_sigma",
                "tail_slack", "junction_res");
    bool any_failed = false;
    for (const SweepRow& r : rows) {
        if (r.failed) {
            any_failed = true;
            std::printf("%-10g FAILED: %s\n", r.eps, r.error.c_str());
        } else {
            std::printf("%-10g %-22.6e %-12.3e %-14.6e %-14.3e\n", r.eps,
                        r.stretch_excess_supported, r.min_sigma, r.tail_slack_max,
                        r.junction_residual_max);
        }
    }
    return any_failed ? 3 : 0;
}

int cmd_tension_bvp(const CommonOpts& o, double geometry_tol) {
    const RunConfig cfg = load_config(o);
    const RunResult res = run_single(cfg, cfg.eps(), true);
    const NetworkState& state = res.trajectory.snapshots.back().state;
    const TensionSolution ts = solve_tension_bvp(state, geometry_tol, cfg.gravity);
    const ProjectedGravity pg = projected_gravity(state, ts, cfg.gravity);

    ensure_directory(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/tension.csv");
    if (!out) throw IoError("cannot open for writing: " + cfg.out_dir + "/tension.csv");
    out << "arm_index,node_index,sigma,p_eta_g_norm\n";
    double max_pg = 0.0;
    for (int i = 0; i < state.arms(); ++i)
        for (int j = 0; j <= state.m(); ++j) {
            const double pn = pg.field[i].col(j).norm();
            max_pg = std::max(max_pg, pn);
            out << i << "," << j << "," << format_real(ts.sigma[i][j]) << "," << format_real(pn)
                << "\n";
        }
    nlohmann::json rep;
    rep["residual_norm"] = ts.residual_norm;
    rep["max_projected_gravity"] = max_pg;
    rep["tangency_defect"] = pg.tangency_defect;
    if (res.steady_time) rep["steady_time"] = *res.steady_time;
    std::ofstream jout(cfg.out_dir + "/tension_report.json");
    jout << rep.dump(2) << "\n";
    std::printf("BVP residual %.3e, max |P_eta g| %.3e, tangency defect %.3e\n",
                ts.residual_norm, max_pg, pg.tangency_defect);
    return 0;
}

int cmd_catenary(const CommonOpts& o) {
    const RunConfig cfg = load_config(o);
    if (cfg.topology != TopologyKind::Cord)
        throw ValidationError("catenary: requires the cord topology (two pins)");
    const CatenaryResult cat =
        catenary_oracle(cfg.pins.col(0), cfg.pins.col(1), 1.0, cfg.gravity, cfg.samples);
    ensure_directory(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/catenary.csv");
    if (!out) throw IoError("cannot open for writing: " + cfg.out_dir + "/catenary.csv");
    out << "sample,x,y" << (cfg.dimension == 3 ? ",z" : "") << "\n";
    for (int k = 0; k < cat.polyline.cols(); ++k) {
        out << k;
        for (int c = 0; c < cat.polyline.rows(); ++c)
            out << "," << format_real(cat.polyline(c, k));
        out << "\n";
    }
    std::printf("catenary parameter a = %.10g, u1 = %.10g, u2 = %.10g\n", cat.a, cat.u1, cat.u2);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"overdamped inextensible triod / cord gradient-flow simulator"};
    app.require_subcommand(1);

    CommonOpts o;
    double geometry_tol = 0.05;
    CLI::App* simulate = app.add_subcommand("simulate", "run the flow to t_end");
    CLI::App* sweep = app.add_subcommand("sweep", "run the eps continuation sweep");
    CLI::App* steady = app.add_subcommand("steady", "run until the velocity drops below vel_tol");
    CLI::App* bvp = app.add_subcommand("tension-bvp",
                                       "run to steadiness, then recover tension from the BVP");
    CLI::App* cat = app.add_subcommand("catenary", "emit the catenary oracle polyline");
    for (CLI::App* cmd : {simulate, sweep, steady, bvp, cat}) add_common(cmd, o);
    bvp->add_option("--geometry-tol", geometry_tol, "max | |d_s eta| - 1 | accepted by the BVP");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(o, false);
        if (steady->parsed()) return cmd_simulate(o, true);
        if (sweep->parsed()) return cmd_sweep(o);
        if (bvp->parsed()) return cmd_tension_bvp(o, geometry_tol);
        if (cat->parsed()) return cmd_catenary(o);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidPins& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeMismatch& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) { // solver family
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
