#pragma once

#include <vector>

#include "spebt/geometry.hpp"
#include "spebt/tracker.hpp"

namespace spebt {

struct PoseErrorReport {
    double rmse_x = 0.0;               // m
    double rmse_y = 0.0;               // m
    double rmse_yaw_deg = 0.0;
    double kitti_trans_pct = 0.0;
    double kitti_rot_deg_per_m = 0.0;
    std::size_t kitti_segments = 0;
};

struct TrackingErrorReport {
    double gain_mag_rmse_pct = 0.0;
    double aod_rmse_deg = 0.0;
    double aoa_rmse_deg = 0.0;
    double reinit_fraction_pct = 0.0;
    std::size_t slot_count = 0;
    std::uint64_t reinit_count = 0;
};

// Rigidly moves `est` so that its first pose coincides with gt's first pose.
std::vector<Pose2> align_at_start(const std::vector<Pose2>& est, const std::vector<Pose2>& gt);

struct PoseRmse {
    double x = 0.0;
    double y = 0.0;
    double yaw_deg = 0.0;
};
PoseRmse pose_rmse(const std::vector<Pose2>& est, const std::vector<Pose2>& gt);

struct KittiOptions {
    std::vector<double> lengths{100, 200, 300, 400, 500, 600, 700, 800};  // m
    std::size_t stride = 10;                                              // slots
};

struct KittiError {
    double trans_pct = 0.0;
    double rot_deg_per_m = 0.0;
    std::size_t segments = 0;
};

// Average relative error over all (start, length) subsequences; throws when the
// ground truth is shorter than the smallest length.
KittiError kitti_relative_error(const std::vector<Pose2>& est, const std::vector<Pose2>& gt,
                                const KittiOptions& opts = {});

// Start-aligned RMSE plus KITTI metrics.
PoseErrorReport evaluate_poses(const std::vector<Pose2>& est, const std::vector<Pose2>& gt,
                               const KittiOptions& opts = {});

TrackingErrorReport tracking_rmse(const TrackTimeline& timeline);

// Euclidean position error per slot.
std::vector<double> position_errors(const std::vector<Pose2>& est, const std::vector<Pose2>& gt);

// Mean of `values` over `windows` equal consecutive chunks.
std::vector<double> windowed_means(const std::vector<double>& values, std::size_t windows);

// Cumulative path length per slot.
std::vector<double> path_lengths(const std::vector<Pose2>& poses);

}  // namespace spebt
