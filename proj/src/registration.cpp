#include "spebt/registration.hpp"

#include <cmath>
#include <stdexcept>

#include "spebt/bfgs.hpp"
#include "spebt/spatial_hash.hpp"

namespace spebt {

double huber(double a, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("huber: delta must be positive");
    }
    const double m = std::abs(a);
    return m <= delta ? 0.5 * a * a : delta * (m - 0.5 * delta);
}

double huber_derivative(double a, double delta) {
    if (std::abs(a) <= delta) {
        return a;
    }
    return a > 0.0 ? delta : -delta;
}

std::vector<Correspondence> find_correspondences(const SurfaceRepresentation& cur,
                                                 const SurfaceRepresentation& prev,
                                                 const RelativePose& guess,
                                                 const OdometryConfig& cfg) {
    std::vector<Correspondence> pairs;
    if (cur.empty() || prev.empty()) {
        return pairs;
    }
    std::vector<Vec2> targets;
    targets.reserve(prev.size());
    for (const auto& sp : prev.items) {
        targets.push_back(sp.mu);
    }
    const SpatialHash grid(targets, cfg.d_D);
    const Mat2 R = rotation_from_yaw(guess.dtheta);
    const double cos_tol = std::cos(cfg.theta_tol);

    for (std::uint32_t i = 0; i < cur.size(); ++i) {
        const Vec2 q = R * cur.items[i].mu + guess.dr;
        const Vec2 n = R * cur.items[i].normal;
        double best = std::numeric_limits<double>::infinity();
        std::int64_t best_j = -1;
        grid.for_each_within(q, cfg.d_D, [&](std::uint32_t j) {
            if (n.dot(prev.items[j].normal) < cos_tol) {
                return;
            }
            const double dist = (prev.items[j].mu - q).norm();
            if (dist < best) {
                best = dist;
                best_j = j;
            }
        });
        if (best_j >= 0) {
            pairs.push_back({i, static_cast<std::uint32_t>(best_j)});
        }
    }
    return pairs;
}

double p2l_residual(const RelativePose& delta, const SurfacePoint& src, const SurfacePoint& dst) {
    const Mat2 R = rotation_from_yaw(delta.dtheta);
    return dst.normal.dot(R * src.mu + delta.dr - dst.mu);
}

double p2l_cost(const RelativePose& delta, const std::vector<Correspondence>& pairs,
                const SurfaceRepresentation& cur, const SurfaceRepresentation& prev,
                const OdometryConfig& cfg) {
    Eigen::Vector3d unused;
    return p2l_cost_gradient(delta, pairs, cur, prev, cfg, unused);
}

double p2l_cost_gradient(const RelativePose& delta, const std::vector<Correspondence>& pairs,
                         const SurfaceRepresentation& cur, const SurfaceRepresentation& prev,
                         const OdometryConfig& cfg, Eigen::Vector3d& gradient) {
    gradient.setZero();
    if (pairs.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const double c = std::cos(delta.dtheta);
    const double s = std::sin(delta.dtheta);
    Mat2 R;
    R << c, -s, s, c;
    Mat2 dR;  // d R / d theta
    dR << -s, -c, c, -s;

    double cost = 0.0;
    for (const auto& pr : pairs) {
        const SurfacePoint& src = cur.items[pr.src_index];
        const SurfacePoint& dst = prev.items[pr.dst_index];
        const double r = dst.normal.dot(R * src.mu + delta.dr - dst.mu);
        cost += huber(r, cfg.huber_delta);
        const double w = huber_derivative(r, cfg.huber_delta);
        gradient.x() += w * dst.normal.x();
        gradient.y() += w * dst.normal.y();
        gradient.z() += w * dst.normal.dot(dR * src.mu);
    }
    return cost;
}

RegistrationResult register_scans(const SurfaceRepresentation& prev,
                                  const SurfaceRepresentation& cur,
                                  const RelativePose& motion_prior, const OdometryConfig& cfg) {
    RegistrationResult result;
    result.estimated = motion_prior;
    if (prev.empty() || cur.empty()) {
        result.failed = true;
        return result;
    }

    BfgsOptions opts;
    opts.gradient_tolerance = 1e-10;

    Eigen::Vector3d x(motion_prior.dr.x(), motion_prior.dr.y(), motion_prior.dtheta);
    const auto to_pose = [](const Eigen::Vector3d& v) {
        return RelativePose{Vec2(v.x(), v.y()), v.z()};
    };

    std::vector<Correspondence> pairs;
    bool settled = false;
    for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
        auto found = find_correspondences(cur, prev, to_pose(x), cfg);
        if (found.size() < static_cast<std::size_t>(cfg.min_correspondences)) {
            if (outer == 0) {
                result.failed = true;
                result.correspondences_used = found.size();
                return result;
            }
            break;  // keep the last well-constrained iterate
        }
        pairs = std::move(found);
        ++result.iterations;

        auto fg = [&](const Eigen::Vector3d& v, Eigen::Vector3d& g) {
            return p2l_cost_gradient(to_pose(v), pairs, cur, prev, cfg, g);
        };
        const auto inner = minimize_bfgs<3>(fg, x, opts);
        const double change = (inner.x - x).norm();
        x = inner.x;
        if (change < cfg.outer_tolerance) {
            settled = true;
            break;
        }
    }

    Eigen::Vector3d g;
    result.estimated = to_pose(x);
    result.estimated.dtheta = wrap_angle(result.estimated.dtheta);
    result.final_cost = p2l_cost_gradient(to_pose(x), pairs, cur, prev, cfg, g);
    result.gradient_norm = g.norm();
    result.correspondences_used = pairs.size();
    result.converged = settled && result.gradient_norm <= kRegistrationGradientTolerance;
    return result;
}

}  // namespace spebt
