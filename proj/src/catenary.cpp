#include "triodflow/catenary.hpp"

#include <Eigen/LU>
#include <cmath>

namespace triodflow {

CatenaryResult catenary_oracle(const Eigen::VectorXd& pin_a, const Eigen::VectorXd& pin_b,
                               double length, const Eigen::VectorXd& gravity, int samples) {
    if (samples < 2) throw ValidationError("catenary_oracle: samples must be >= 2");
    if (std::abs(gravity.norm() - 1.0) > 1e-12)
        throw ValidationError("catenary_oracle: gravity must be a unit vector");
    if (!((pin_b - pin_a).norm() < length))
        throw ValidationError("catenary_oracle: pins must be closer than the length");

    const Eigen::VectorXd ey = -gravity;
    Eigen::VectorXd ex = (pin_b - pin_a) - (pin_b - pin_a).dot(ey) * ey;
    const double dx = ex.norm();
    if (dx < 1e-10 * length)
        throw OracleNotConverged("catenary_oracle: chord parallel to gravity (degenerate)");
    ex /= dx;
    const double dy = (pin_b - pin_a).dot(ey);

    // initial a from the reduced scalar equation 2a sinh(dx/2a) = sqrt(L^2-dy^2)
    const double span = std::sqrt(length * length - dy * dy);
    auto reduced = [&](double a) { return 2.0 * a * std::sinh(dx / (2.0 * a)) - span; };
    double lo = 1e-8 * dx, hi = 1e8 * dx;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (reduced(mid) > 0.0 ? lo : hi) = mid;
    }
    double a = 0.5 * (lo + hi);
    double mu = 0.0;

    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const double delta = dx / (2.0 * a);
        const double sh = std::sinh(delta), ch = std::cosh(delta);
        const Eigen::Vector2d r(2.0 * a * sh * std::cosh(mu) - length,
                                2.0 * a * sh * std::sinh(mu) - dy);
        if (r.norm() <= 1e-13 * (1.0 + length)) {
            converged = true;
            break;
        }
        Eigen::Matrix2d J;
        J(0, 0) = 2.0 * std::cosh(mu) * (sh - delta * ch);
        J(0, 1) = 2.0 * a * sh * std::sinh(mu);
        J(1, 0) = 2.0 * std::sinh(mu) * (sh - delta * ch);
        J(1, 1) = 2.0 * a * sh * std::cosh(mu);
        const Eigen::Vector2d step = J.fullPivLu().solve(-r);
        double t = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            const double a_t = a + t * step(0);
            const double mu_t = mu + t * step(1);
            if (a_t > 0.0) {
                const double d_t = dx / (2.0 * a_t);
                const Eigen::Vector2d r_t(2.0 * a_t * std::sinh(d_t) * std::cosh(mu_t) - length,
                                          2.0 * a_t * std::sinh(d_t) * std::sinh(mu_t) - dy);
                if (r_t.norm() < r.norm()) {
                    a = a_t;
                    mu = mu_t;
                    break;
                }
            }
            t *= 0.5;
            if (bt == 59) throw OracleNotConverged("catenary_oracle: damped Newton stalled");
        }
    }
    if (!converged) throw OracleNotConverged("catenary_oracle: Newton iteration budget exceeded");

    const double delta = dx / (2.0 * a);
    CatenaryResult out;
    out.a = a;
    out.u1 = mu - delta;
    out.u2 = mu + delta;

    // arclength parameterization from pin_a: s(u) = a (sinh u - sinh u1)
    const double x0 = -a * out.u1;          // local x of the apex
    const double y0 = -a * std::cosh(out.u1); // local y offset
    out.polyline.resize(pin_a.size(), samples);
    for (int k = 0; k < samples; ++k) {
        const double s = length * k / (samples - 1);
        const double u = std::asinh(s / a + std::sinh(out.u1));
        const double x = x0 + a * u;
        const double y = y0 + a * std::cosh(u);
        out.polyline.col(k) = pin_a + x * ex + y * ey;
    }
    out.polyline.col(0) = pin_a;
    out.polyline.col(samples - 1) = pin_b;
    return out;
}

} // namespace triodflow
