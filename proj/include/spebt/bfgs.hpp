#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace spebt {

struct BfgsOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double function_tolerance = 1e-16;  // relative decrease that counts as stalled
    double armijo_c1 = 1e-4;
    int max_backtracks = 60;
};

template <int Dim>
struct BfgsResult {
    Eigen::Matrix<double, Dim, 1> x;
    double value = 0.0;
    Eigen::Matrix<double, Dim, 1> gradient;
    int iterations = 0;
    bool converged = false;  // gradient norm reached the tolerance
};

// Quasi-Newton minimisation with an inverse-Hessian BFGS update and Armijo
// backtracking. `fg(x, grad)` returns f(x) and writes the gradient. Accepted
// steps always decrease f.
template <int Dim, typename Fn>
BfgsResult<Dim> minimize_bfgs(Fn&& fg, const Eigen::Matrix<double, Dim, 1>& x0,
                              const BfgsOptions& opts = {}) {
    using Vec = Eigen::Matrix<double, Dim, 1>;
    using Mat = Eigen::Matrix<double, Dim, Dim>;

    BfgsResult<Dim> res;
    res.x = x0;
    res.value = fg(res.x, res.gradient);
    Mat H = Mat::Identity();
    bool scaled = false;

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (!std::isfinite(res.value)) {
            break;
        }
        if (res.gradient.norm() <= opts.gradient_tolerance) {
            res.converged = true;
            break;
        }
        Vec dir = -H * res.gradient;
        double slope = res.gradient.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            dir = -res.gradient;
            slope = -res.gradient.squaredNorm();
        }

        double step = 1.0;
        Vec x_new;
        Vec g_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = res.x + step * dir;
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= res.value + opts.armijo_c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++res.iterations;
        if (!accepted || !(f_new < res.value)) {
            break;  // no further decrease representable
        }

        const Vec s = x_new - res.x;
        const Vec y = g_new - res.gradient;
        const double sy = s.dot(y);
        const double decrease = res.value - f_new;
        res.x = x_new;
        res.gradient = g_new;
        const double f_old = res.value;
        res.value = f_new;

        if (sy > 1e-300) {
            if (!scaled) {
                H = (sy / y.squaredNorm()) * Mat::Identity();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Mat I = Mat::Identity();
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }
        if (decrease <= opts.function_tolerance * std::max(1.0, std::abs(f_old))) {
            break;
        }
    }
    if (res.gradient.norm() <= opts.gradient_tolerance) {
        res.converged = true;
    }
    return res;
}

}  // namespace spebt
