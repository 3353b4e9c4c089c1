#include "spebt/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace spebt {

namespace {

void require_same_length(const std::vector<Pose2>& est, const std::vector<Pose2>& gt) {
    if (est.size() != gt.size()) {
        throw std::invalid_argument("trajectory length mismatch: " + std::to_string(est.size()) +
                                    " estimated vs " + std::to_string(gt.size()) + " ground-truth");
    }
}

}  // namespace

std::vector<Pose2> align_at_start(const std::vector<Pose2>& est, const std::vector<Pose2>& gt) {
    require_same_length(est, gt);
    if (est.empty()) {
        throw std::invalid_argument("align_at_start: empty trajectories");
    }
    const Transform2 fix =
        compose(Transform2::from_pose(gt.front()), inverse(Transform2::from_pose(est.front())));
    std::vector<Pose2> out;
    out.reserve(est.size());
    for (const auto& p : est) {
        out.push_back(compose(fix, Transform2::from_pose(p)).to_pose());
    }
    return out;
}

PoseRmse pose_rmse(const std::vector<Pose2>& est, const std::vector<Pose2>& gt) {
    require_same_length(est, gt);
    PoseRmse r;
    if (est.empty()) {
        return r;
    }
    double sx = 0.0, sy = 0.0, st = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const Vec2 d = est[i].r - gt[i].r;
        const double dt = wrap_angle(est[i].theta - gt[i].theta);
        sx += d.x() * d.x();
        sy += d.y() * d.y();
        st += dt * dt;
    }
    const double n = static_cast<double>(est.size());
    r.x = std::sqrt(sx / n);
    r.y = std::sqrt(sy / n);
    r.yaw_deg = rad2deg(std::sqrt(st / n));
    return r;
}

std::vector<double> path_lengths(const std::vector<Pose2>& poses) {
    std::vector<double> dist(poses.size(), 0.0);
    for (std::size_t i = 1; i < poses.size(); ++i) {
        dist[i] = dist[i - 1] + (poses[i].r - poses[i - 1].r).norm();
    }
    return dist;
}

KittiError kitti_relative_error(const std::vector<Pose2>& est, const std::vector<Pose2>& gt,
                                const KittiOptions& opts) {
    require_same_length(est, gt);
    if (opts.lengths.empty() || opts.stride == 0) {
        throw std::invalid_argument("kitti_relative_error: need lengths and a positive stride");
    }
    const std::vector<double> dist = path_lengths(gt);
    double shortest = opts.lengths.front();
    for (double len : opts.lengths) {
        shortest = std::min(shortest, len);
    }
    if (dist.empty() || dist.back() <= shortest) {
        throw std::invalid_argument("kitti_relative_error: trajectory shorter than " +
                                    std::to_string(shortest) + " m");
    }

    KittiError out;
    double t_sum = 0.0;
    double r_sum = 0.0;
    for (std::size_t first = 0; first < gt.size(); first += opts.stride) {
        for (double len : opts.lengths) {
            std::size_t last = first;
            while (last < gt.size() && dist[last] <= dist[first] + len) {
                ++last;
            }
            if (last >= gt.size()) {
                continue;
            }
            const Transform2 d_gt =
                compose(inverse(Transform2::from_pose(gt[first])), Transform2::from_pose(gt[last]));
            const Transform2 d_est =
                compose(inverse(Transform2::from_pose(est[first])), Transform2::from_pose(est[last]));
            const Transform2 err = compose(inverse(d_est), d_gt);
            t_sum += err.t.norm() / len;
            r_sum += std::abs(err.yaw()) / len;
            ++out.segments;
        }
    }
    if (out.segments == 0) {
        throw std::invalid_argument("kitti_relative_error: no complete subsequence");
    }
    out.trans_pct = 100.0 * t_sum / static_cast<double>(out.segments);
    out.rot_deg_per_m = rad2deg(r_sum / static_cast<double>(out.segments));
    return out;
}

PoseErrorReport evaluate_poses(const std::vector<Pose2>& est, const std::vector<Pose2>& gt,
                               const KittiOptions& opts) {
    const auto aligned = align_at_start(est, gt);
    const auto rmse = pose_rmse(aligned, gt);
    const auto kitti = kitti_relative_error(aligned, gt, opts);
    PoseErrorReport rep;
    rep.rmse_x = rmse.x;
    rep.rmse_y = rmse.y;
    rep.rmse_yaw_deg = rmse.yaw_deg;
    rep.kitti_trans_pct = kitti.trans_pct;
    rep.kitti_rot_deg_per_m = kitti.rot_deg_per_m;
    rep.kitti_segments = kitti.segments;
    return rep;
}

TrackingErrorReport tracking_rmse(const TrackTimeline& timeline) {
    if (timeline.slots.empty()) {
        throw std::invalid_argument("tracking_rmse: empty timeline");
    }
    double g = 0.0, d = 0.0, a = 0.0;
    std::uint64_t reinits = 0;
    for (const auto& s : timeline.slots) {
        const double rel = (s.tracked.alpha_mag - s.truth.alpha_mag) / s.truth.alpha_mag * 100.0;
        const double dd = rad2deg(wrap_angle(s.tracked.aod - s.truth.aod));
        const double da = rad2deg(wrap_angle(s.tracked.aoa - s.truth.aoa));
        g += rel * rel;
        d += dd * dd;
        a += da * da;
        reinits += s.reinit ? 1 : 0;
    }
    const double n = static_cast<double>(timeline.slots.size());
    TrackingErrorReport rep;
    rep.gain_mag_rmse_pct = std::sqrt(g / n);
    rep.aod_rmse_deg = std::sqrt(d / n);
    rep.aoa_rmse_deg = std::sqrt(a / n);
    rep.slot_count = timeline.slots.size();
    rep.reinit_count = reinits;
    rep.reinit_fraction_pct = 100.0 * static_cast<double>(reinits) / n;
    return rep;
}

std::vector<double> position_errors(const std::vector<Pose2>& est, const std::vector<Pose2>& gt) {
    require_same_length(est, gt);
    std::vector<double> out(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) {
        out[i] = (est[i].r - gt[i].r).norm();
    }
    return out;
}

std::vector<double> windowed_means(const std::vector<double>& values, std::size_t windows) {
    if (windows == 0 || values.size() < windows) {
        throw std::invalid_argument("windowed_means: need at least one value per window");
    }
    std::vector<double> out(windows, 0.0);
    for (std::size_t w = 0; w < windows; ++w) {
        const std::size_t lo = w * values.size() / windows;
        const std::size_t hi = (w + 1) * values.size() / windows;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            sum += values[i];
        }
        out[w] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

}  // namespace spebt
