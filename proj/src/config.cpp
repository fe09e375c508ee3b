#include "triodflow/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace triodflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": not a number: '" + tok + "'");
    }
}

std::vector<double> parse_reals(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_real(trim(tok), line));
    if (out.empty()) throw ParseError("line " + std::to_string(line) + ": empty value");
    return out;
}

std::vector<Eigen::VectorXd> parse_vectors(const std::string& value, int line) {
    std::vector<Eigen::VectorXd> out;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const std::vector<double> reals = parse_reals(trim(part), line);
        out.push_back(Eigen::Map<const Eigen::VectorXd>(reals.data(), reals.size()));
    }
    return out;
}

int parse_int(const std::string& tok, int line) {
    const double v = parse_real(tok, line);
    if (v != std::floor(v))
        throw ParseError("line " + std::to_string(line) + ": expected an integer: '" + tok + "'");
    return static_cast<int>(v);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

InitialShape RunConfig::initial_shape() const {
    if (!shape_polyline) return InitialShape::circular_arcs();
    InitialShape s;
    for (const Eigen::MatrixXd& poly : polylines)
        s.arms.push_back(ArmShape::explicit_polyline(poly));
    return s;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool have_gravity = false;
    std::vector<std::pair<int, std::vector<Eigen::VectorXd>>> polyline_kv(3);

    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (value.empty())
            throw ParseError("line " + std::to_string(line) + ": empty value for '" + key + "'");

        if (key == "topology") {
            if (value == "triod") cfg.topology = TopologyKind::Triod;
            else if (value == "cord") cfg.topology = TopologyKind::Cord;
            else throw ParseError("line " + std::to_string(line) + ": topology must be triod|cord");
        } else if (key == "dimension") {
            cfg.dimension = parse_int(value, line);
        } else if (key == "pins") {
            const auto vs = parse_vectors(value, line);
            if (vs.empty()) throw ParseError("line " + std::to_string(line) + ": no pins");
            cfg.pins.resize(vs[0].size(), static_cast<Eigen::Index>(vs.size()));
            for (std::size_t i = 0; i < vs.size(); ++i) {
                if (vs[i].size() != vs[0].size())
                    throw ParseError("line " + std::to_string(line) + ": ragged pin vectors");
                cfg.pins.col(static_cast<Eigen::Index>(i)) = vs[i];
            }
        } else if (key == "gravity") {
            const auto reals = parse_reals(value, line);
            cfg.gravity = Eigen::Map<const Eigen::VectorXd>(reals.data(), reals.size());
            have_gravity = true;
        } else if (key == "eps") {
            cfg.eps_values = parse_reals(value, line);
        } else if (key == "m") {
            cfg.m = parse_int(value, line);
        } else if (key == "dt") {
            cfg.dt = parse_real(value, line);
        } else if (key == "t_end") {
            cfg.t_end = parse_real(value, line);
        } else if (key == "newton_tol") {
            cfg.newton_tol = parse_real(value, line);
        } else if (key == "vel_tol") {
            cfg.vel_tol = parse_real(value, line);
        } else if (key == "root_tol") {
            cfg.root_tol = parse_real(value, line);
        } else if (key == "record_every") {
            cfg.record_every = parse_int(value, line);
        } else if (key == "samples") {
            cfg.samples = parse_int(value, line);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "shape") {
            if (value == "arc") cfg.shape_polyline = false;
            else if (value == "polyline") cfg.shape_polyline = true;
            else throw ParseError("line " + std::to_string(line) + ": shape must be arc|polyline");
        } else if (key == "polyline1" || key == "polyline2" || key == "polyline3") {
            const int arm = key[8] - '1';
            polyline_kv[arm] = {line, parse_vectors(value, line)};
        } else {
            throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }

    if (cfg.dimension != 2 && cfg.dimension != 3)
        throw ValidationError("dimension must be 2 or 3");
    if (!have_gravity) {
        cfg.gravity = Eigen::VectorXd::Zero(cfg.dimension);
        cfg.gravity[cfg.dimension - 1] = -1.0;
    }
    if (cfg.gravity.size() != cfg.dimension)
        throw ValidationError("gravity dimension does not match 'dimension'");
    if (std::abs(cfg.gravity.norm() - 1.0) > 1e-12)
        throw ValidationError("gravity is not a unit vector (|g| = 1 required)");

    const int npins = cfg.topology == TopologyKind::Cord ? 2 : 3;
    if (cfg.pins.size() == 0) throw ValidationError("pins are required");
    if (cfg.pins.cols() != npins)
        throw ValidationError("wrong number of pins for the topology");
    if (cfg.pins.rows() != cfg.dimension)
        throw ValidationError("pin dimension does not match 'dimension'");
    if (cfg.topology == TopologyKind::Triod) {
        for (int i = 0; i < 3; ++i)
            if (!(cfg.pins.col(i).norm() < 1.0))
                throw ValidationError("pin chord >= 1: triod arms must not be fully straight");
    } else {
        if (!((cfg.pins.col(1) - cfg.pins.col(0)).norm() < 1.0))
            throw ValidationError("pin chord >= 1: |alpha(0) - alpha(1)| < 1 required");
    }

    if (cfg.eps_values.empty()) throw ValidationError("eps must have at least one value");
    for (double e : cfg.eps_values)
        if (!(e > 0.0 && e <= 1.0)) throw ValidationError("eps values must lie in (0,1]");
    if (cfg.m < 2) throw ValidationError("m must be >= 2");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ValidationError("t_end must be positive");
    if (!(cfg.newton_tol > 0.0) || !(cfg.vel_tol > 0.0) || !(cfg.root_tol > 0.0))
        throw ValidationError("tolerances must be positive");
    if (cfg.record_every < 1) throw ValidationError("record_every must be >= 1");
    if (cfg.samples < 2) throw ValidationError("samples must be >= 2");

    if (cfg.shape_polyline) {
        const int arms = arm_count(cfg.topology);
        cfg.polylines.resize(arms);
        for (int i = 0; i < arms; ++i) {
            const auto& [ln, vecs] = polyline_kv[i];
            if (vecs.empty())
                throw ValidationError("shape = polyline requires polyline" + std::to_string(i + 1));
            Eigen::MatrixXd poly(cfg.dimension, static_cast<Eigen::Index>(vecs.size()));
            for (std::size_t j = 0; j < vecs.size(); ++j) {
                if (vecs[j].size() != cfg.dimension)
                    throw ParseError("line " + std::to_string(ln) + ": polyline vector dimension");
                poly.col(static_cast<Eigen::Index>(j)) = vecs[j];
            }
            cfg.polylines[i] = std::move(poly);
        }
    }
    return cfg;
}

std::string export_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "topology = " << (cfg.topology == TopologyKind::Triod ? "triod" : "cord") << "\n";
    os << "dimension = " << cfg.dimension << "\n";
    os << "pins = ";
    for (int i = 0; i < cfg.pins.cols(); ++i) {
        if (i) os << " ; ";
        for (int c = 0; c < cfg.pins.rows(); ++c) os << (c ? "," : "") << fmt(cfg.pins(c, i));
    }
    os << "\n";
    os << "gravity = ";
    for (int c = 0; c < cfg.gravity.size(); ++c) os << (c ? "," : "") << fmt(cfg.gravity[c]);
    os << "\n";
    os << "eps = ";
    for (std::size_t i = 0; i < cfg.eps_values.size(); ++i)
        os << (i ? "," : "") << fmt(cfg.eps_values[i]);
    os << "\n";
    os << "m = " << cfg.m << "\n";
    os << "dt = " << fmt(cfg.dt) << "\n";
    os << "t_end = " << fmt(cfg.t_end) << "\n";
    os << "newton_tol = " << fmt(cfg.newton_tol) << "\n";
    os << "vel_tol = " << fmt(cfg.vel_tol) << "\n";
    os << "root_tol = " << fmt(cfg.root_tol) << "\n";
    os << "record_every = " << cfg.record_every << "\n";
    os << "samples = " << cfg.samples << "\n";
    os << "out = " << cfg.out_dir << "\n";
    os << "shape = " << (cfg.shape_polyline ? "polyline" : "arc") << "\n";
    for (std::size_t i = 0; i < cfg.polylines.size(); ++i) {
        os << "polyline" << i + 1 << " = ";
        const Eigen::MatrixXd& poly = cfg.polylines[i];
        for (int j = 0; j < poly.cols(); ++j) {
            if (j) os << " ; ";
            for (int c = 0; c < poly.rows(); ++c) os << (c ? "," : "") << fmt(poly(c, j));
        }
        os << "\n";
    }
    return os.str();
}

} // namespace triodflow
