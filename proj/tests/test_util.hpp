#ifndef TRIODFLOW_TEST_UTIL_HPP
#define TRIODFLOW_TEST_UTIL_HPP

#include <Eigen/Core>
#include <cmath>
#include <random>

namespace test_util {

inline Eigen::VectorXd random_vec(std::mt19937& rng, int d, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = u(rng);
    return v;
}

inline Eigen::VectorXd random_unit(std::mt19937& rng, int d) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd v(d);
    do {
        for (int i = 0; i < d; ++i) v[i] = n(rng);
    } while (v.norm() < 1e-8);
    return v.normalized();
}

inline Eigen::MatrixXd random_rotation(std::mt19937& rng, int d) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    if (d == 2) {
        const double t = u(rng);
        Eigen::Matrix2d r;
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        return r;
    }
    // Rodrigues formula about a random axis
    const Eigen::VectorXd axis = random_unit(rng, 3);
    const double t = u(rng);
    Eigen::Matrix3d k;
    k << 0, -axis[2], axis[1], axis[2], 0, -axis[0], -axis[1], axis[0], 0;
    return Eigen::Matrix3d::Identity() + std::sin(t) * k + (1 - std::cos(t)) * k * k;
}

// Random admissible perturbation: moves every free node (junction once),
// keeping pins and junction sharing intact.
template <typename State>
void perturb_free(State& s, std::mt19937& rng, double amplitude) {
    if (s.is_free(0, 0)) s.node(0, 0) += random_vec(rng, s.dim(), amplitude);
    for (int i = 0; i < s.arms(); ++i)
        for (int j = 1; j < s.m(); ++j) s.node(i, j) += random_vec(rng, s.dim(), amplitude);
}

// Independent radial inversion oracle: plain bisection on
// phi(r) = eps r + r/sqrt(eps + r^2), no Newton, no shared code path.
inline double bisect_g_radius(double eps, double target, double tol = 1e-13) {
    auto phi = [&](double r) { return eps * r + r / std::sqrt(eps + r * r); };
    double lo = 0.0, hi = target / eps + target + 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace test_util

#endif
