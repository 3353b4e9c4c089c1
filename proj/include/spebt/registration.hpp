#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "spebt/geometry.hpp"
#include "spebt/radar_pipeline.hpp"

namespace spebt {

// Pairs a surface point of the current scan with one of the previous scan.
struct Correspondence {
    std::uint32_t src_index;  // into the current representation
    std::uint32_t dst_index;  // into the previous representation

    bool operator==(const Correspondence&) const = default;
};

struct RegistrationResult {
    RelativePose estimated;
    double final_cost = std::numeric_limits<double>::infinity();
    double gradient_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;            // outer re-association rounds
    std::size_t correspondences_used = 0;
    bool converged = false;        // pose settled and final gradient within tolerance
    bool failed = false;           // too few correspondences at the prior
};

// Cost gradient per metre / per radian; with ~100 pairs this bounds the pose
// error to about 1e-6 m and 1e-9 rad. Tighter values sit below the rounding
// floor of the summed cost.
inline constexpr double kRegistrationGradientTolerance = 1e-4;

double huber(double a, double delta);
// dL/da of the Huber loss.
double huber_derivative(double a, double delta);

// Closest previous point within d_D of each transformed current point whose
// normal lies within theta_tol of the rotated current normal. At most one
// pair per current point; ties go to the lower previous index.
std::vector<Correspondence> find_correspondences(const SurfaceRepresentation& cur,
                                                 const SurfaceRepresentation& prev,
                                                 const RelativePose& guess,
                                                 const OdometryConfig& cfg);

// Point-to-line residual n_j^T (dR mu_i + dr - mu_j).
double p2l_residual(const RelativePose& delta, const SurfacePoint& src, const SurfacePoint& dst);

// Sum of Huber-robustified point-to-line residuals; +inf when `pairs` is empty.
double p2l_cost(const RelativePose& delta, const std::vector<Correspondence>& pairs,
                const SurfaceRepresentation& cur, const SurfaceRepresentation& prev,
                const OdometryConfig& cfg);

// Cost plus analytic gradient w.r.t. (dx, dy, dtheta).
double p2l_cost_gradient(const RelativePose& delta, const std::vector<Correspondence>& pairs,
                         const SurfaceRepresentation& cur, const SurfaceRepresentation& prev,
                         const OdometryConfig& cfg, Eigen::Vector3d& gradient);

// Relative pose D with T_k = T_{k-1} D that registers `cur` onto `prev`,
// starting from `motion_prior`.
RegistrationResult register_scans(const SurfaceRepresentation& prev,
                                  const SurfaceRepresentation& cur,
                                  const RelativePose& motion_prior, const OdometryConfig& cfg);

}  // namespace spebt
