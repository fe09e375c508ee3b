#ifndef TRIODFLOW_CATENARY_HPP
#define TRIODFLOW_CATENARY_HPP

#include <Eigen/Core>

#include "triodflow/errors.hpp"

namespace triodflow {

struct CatenaryResult {
    Eigen::MatrixXd polyline; // d x samples, sampled at equal arclength
    double a = 0.0;           // catenary parameter y = y0 + a cosh((x-x0)/a)
    double u1 = 0.0, u2 = 0.0; // scaled abscissae of the endpoints
};

/// Catenary through pin_a, pin_b with the given total length, sagging along
/// gravity. Solved in the plane spanned by the chord and gravity: with
/// delta = dx/(2a),
///   2 a sinh(delta) cosh(mu) = length,   2 a sinh(delta) sinh(mu) = dy,
/// by damped Newton in (a, mu) from the symmetric initial guess mu = 0.
CatenaryResult catenary_oracle(const Eigen::VectorXd& pin_a, const Eigen::VectorXd& pin_b,
                               double length, const Eigen::VectorXd& gravity, int samples);

} // namespace triodflow

#endif
