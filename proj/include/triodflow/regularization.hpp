#ifndef TRIODFLOW_REGULARIZATION_HPP
#define TRIODFLOW_REGULARIZATION_HPP

#include <Eigen/Core>
#include <cmath>

#include "triodflow/errors.hpp"

namespace triodflow {

/// Regularization parameter eps in (0,1] plus the tolerances of the radial
/// inversion used by g_eps.
struct RegularizationParams {
    double eps;
    double root_tol = 1e-12;   // absolute, on the radius
    int max_root_iters = 100;

    explicit RegularizationParams(double eps_, double root_tol_ = 1e-12,
                                  int max_root_iters_ = 100)
        : eps(eps_), root_tol(root_tol_), max_root_iters(max_root_iters_) {
        if (!(eps > 0.0) || !(eps <= 1.0))
            throw ValidationError("RegularizationParams: eps must lie in (0,1]");
        if (!(root_tol > 0.0))
            throw ValidationError("RegularizationParams: root_tol must be positive");
        if (max_root_iters < 1)
            throw ValidationError("RegularizationParams: max_root_iters must be >= 1");
    }
};

namespace detail {

// Radial profile of F_eps: phi(r) = eps*r + r/sqrt(eps + r^2).
// Strictly increasing, concave on r >= 0, phi(0) = 0, phi(r) >= eps*r.
inline double radial_forward(double eps, double r) {
    return eps * r + r / std::sqrt(eps + r * r);
}

inline double radial_forward_derivative(double eps, double r) {
    const double t = eps + r * r;
    return eps + eps / (t * std::sqrt(t));
}

// Solve phi(rho) = target for rho >= 0 by safeguarded Newton with bisection
// fallback on the bracket [0, target/eps + target].
inline double invert_radial(const RegularizationParams& p, double target) {
    if (target <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = target / p.eps + target;
    double rho = std::min(target, hi);
    for (int it = 0; it < p.max_root_iters; ++it) {
        const double f = radial_forward(p.eps, rho) - target;
        if (f > 0.0) hi = rho; else lo = rho;
        double step = f / radial_forward_derivative(p.eps, rho);
        double next = rho - step;
        if (!(next > lo) || !(next < hi)) {
            next = 0.5 * (lo + hi);
            step = rho - next;
        }
        rho = next;
        if (std::abs(step) <= p.root_tol || hi - lo <= p.root_tol) {
            // one more Newton step: quadratic convergence puts the result at
            // floating-point accuracy, well inside root_tol
            const double polish = rho - (radial_forward(p.eps, rho) - target) /
                                            radial_forward_derivative(p.eps, rho);
            return polish > 0.0 ? polish : rho;
        }
    }
    throw RootNotConverged("invert_radial: max_root_iters exceeded");
}

} // namespace detail

/// F_eps(psi) = eps*psi + psi/sqrt(eps + |psi|^2). Colinear with psi, radial
/// profile strictly increasing.
template <typename Derived>
typename Derived::PlainObject f_eps(const RegularizationParams& p,
                                    const Eigen::MatrixBase<Derived>& psi) {
    const double n2 = psi.squaredNorm();
    return (p.eps + 1.0 / std::sqrt(p.eps + n2)) * psi.derived();
}

/// G_eps = (F_eps)^{-1}, by inverting the scalar radial profile and rescaling
/// the direction. g_eps(0) = 0 exactly.
template <typename Derived>
typename Derived::PlainObject g_eps(const RegularizationParams& p,
                                    const Eigen::MatrixBase<Derived>& tau) {
    const double r = tau.norm();
    if (r < 1e-300) return Derived::PlainObject::Zero(tau.rows(), tau.cols());
    const double rho = detail::invert_radial(p, r);
    return (rho / r) * tau.derived();
}

/// Q_eps(tau) = eps*(|G|^2/2 - 1/sqrt(eps+|G|^2)) + sqrt(eps), evaluated in a
/// rearranged form whose terms are all nonnegative, so Q_eps >= 0 holds in
/// floating point and Q_eps(0) = 0 exactly.
template <typename Derived>
double q_eps(const RegularizationParams& p, const Eigen::MatrixBase<Derived>& tau) {
    const double rho2 = g_eps(p, tau).squaredNorm();
    const double e = p.eps;
    // sqrt(e) - e/sqrt(e+rho^2) == e*rho^2 / ((sqrt(e^2+e*rho^2)+e) * sqrt(e+rho^2))
    const double tail = e * rho2 / ((std::sqrt(e * e + e * rho2) + e) * std::sqrt(e + rho2));
    return 0.5 * e * rho2 + tail;
}

/// Tension sigma = G_eps(tau) . tau; nonnegative since G_eps(tau) is a
/// positive radial rescaling of tau.
template <typename Derived>
double tension_of_tangent(const RegularizationParams& p,
                          const Eigen::MatrixBase<Derived>& tau) {
    return g_eps(p, tau).dot(tau);
}

/// grad F_eps(psi) = (eps + s) I - s^3 psi psi^T with s = 1/sqrt(eps+|psi|^2).
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>
grad_f_eps(const RegularizationParams& p, const Eigen::MatrixBase<Derived>& psi) {
    using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>;
    const double s = 1.0 / std::sqrt(p.eps + psi.squaredNorm());
    Mat out = (p.eps + s) * Mat::Identity(psi.size(), psi.size());
    out.noalias() -= (s * s * s) * (psi.derived() * psi.derived().transpose());
    return out;
}

/// grad G_eps(tau): analytic (Sherman-Morrison) inverse of grad F_eps at
/// psi = g_eps(tau),
///   (aI - b psi psi^T)^{-1} = I/a + b/(a*eps*(1+s^3)) psi psi^T,
/// with a = eps + s, b = s^3. Symmetric positive-definite; eigenvalues are
/// 1/(eps+s) (orthogonal to tau) and 1/(eps*(1+s^3)) (along tau).
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>
grad_g_eps(const RegularizationParams& p, const Eigen::MatrixBase<Derived>& tau) {
    using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>;
    const typename Derived::PlainObject psi = g_eps(p, tau);
    const double s = 1.0 / std::sqrt(p.eps + psi.squaredNorm());
    const double a = p.eps + s;
    const double b = s * s * s;
    Mat out = (1.0 / a) * Mat::Identity(tau.size(), tau.size());
    out.noalias() += (b / (a * p.eps * (1.0 + b))) * (psi * psi.transpose());
    return out;
}

/// Spectral bounds of grad G_eps at tau,
///   lambda = 1/(eps + (eps+|G|^2)^{-1/2}),  Lambda = eps^{-1}/(1 + (eps+|G|^2)^{-3/2}).
inline std::pair<double, double> grad_g_eps_bounds(const RegularizationParams& p,
                                                   double g_norm) {
    const double s = 1.0 / std::sqrt(p.eps + g_norm * g_norm);
    return {1.0 / (p.eps + s), 1.0 / (p.eps * (1.0 + s * s * s))};
}

} // namespace triodflow

#endif
