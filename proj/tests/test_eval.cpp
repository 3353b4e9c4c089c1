#include <gtest/gtest.h>

#include <cmath>

#include "spebt/eval.hpp"
#include "spebt/rng.hpp"

using namespace spebt;

namespace {

// Straight path along x with `step` metres per slot.
std::vector<Pose2> straight(std::size_t n, double step) {
    std::vector<Pose2> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back({double(k) * step, 0.0, 0.0});
    return out;
}

// Gentle S-curve for invariance checks.
std::vector<Pose2> wiggle(std::size_t n) {
    std::vector<Pose2> out;
    Pose2 p;
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(p);
        // Step chosen so no cumulative length lands on a segment boundary.
        p = apply_relative(p, {Vec2(1.13, 0.0), 0.01 * std::sin(0.01 * double(k))});
    }
    return out;
}

std::vector<Pose2> rigidly_moved(const std::vector<Pose2>& in, const Vec2& t, double yaw) {
    const Mat2 R = rotation_from_yaw(yaw);
    std::vector<Pose2> out;
    for (const auto& p : in) out.push_back({R * p.r + t, p.theta + yaw});
    return out;
}

TrackTimeline timeline_with(std::size_t n, double aod_offset, double alpha_scale) {
    TrackTimeline tl;
    for (std::size_t k = 0; k < n; ++k) {
        SlotRecord r;
        r.k = k;
        r.truth = {2e-6 + 1e-9 * double(k), 0.3 + 0.001 * double(k), 1.1};
        r.tracked = r.truth;
        r.tracked.aod += aod_offset;
        r.tracked.alpha_mag *= alpha_scale;
        tl.slots.push_back(r);
    }
    return tl;
}

// Mean of (L + 1) / L over all segments of a 1000 m, 1 m-step path with stride
// 10: a start s supports length L when s + L + 1 <= 1000.
double overshoot_ratio_1000m() {
    double sum = 0.0;
    std::size_t count = 0;
    for (double len : KittiOptions{}.lengths) {
        for (int start = 0; start + len + 1.0 <= 1000.0; start += 10) {
            sum += (len + 1.0) / len;
            ++count;
        }
    }
    return sum / double(count);
}

}  // namespace

TEST(Align, IdentityUnchanged) {
    const auto gt = wiggle(50);
    const auto out = align_at_start(gt, gt);
    for (std::size_t k = 0; k < gt.size(); ++k) {
        EXPECT_NEAR((out[k].r - gt[k].r).norm(), 0.0, 1e-12);
        EXPECT_NEAR(wrap_angle(out[k].theta - gt[k].theta), 0.0, 1e-12);
    }
}

TEST(Align, ShiftRemovedExactly) {
    const auto gt = wiggle(50);
    const auto est = rigidly_moved(gt, Vec2(10.0, 0.0), 0.0);
    const auto out = align_at_start(est, gt);
    for (std::size_t k = 0; k < gt.size(); ++k) EXPECT_NEAR((out[k].r - gt[k].r).norm(), 0.0, 1e-12);
}

TEST(Align, RigidRotationRemoved) {
    const auto gt = wiggle(80);
    const auto est = rigidly_moved(gt, Vec2(-3.0, 7.0), deg2rad(5.0));
    const auto out = align_at_start(est, gt);
    for (std::size_t k = 0; k < gt.size(); ++k) {
        EXPECT_NEAR((out[k].r - gt[k].r).norm(), 0.0, 1e-9);
        EXPECT_NEAR(wrap_angle(out[k].theta - gt[k].theta), 0.0, 1e-12);
    }
}

TEST(Align, HeadingErrorResidualGrowsWithDistance) {
    // Positions swung 5 degrees about the start while the start yaw agrees:
    // alignment cannot see it, and the residual is 2 sin(2.5 deg) times the distance.
    const auto gt = straight(101, 1.0);
    std::vector<Pose2> est;
    const Mat2 R = rotation_from_yaw(deg2rad(5.0));
    for (const auto& p : gt) est.push_back({R * p.r, 0.0});
    const auto out = align_at_start(est, gt);
    double last = -1.0;
    for (std::size_t k = 0; k < gt.size(); ++k) {
        const double err = (out[k].r - gt[k].r).norm();
        EXPECT_NEAR(err, 2.0 * std::sin(deg2rad(2.5)) * double(k), 1e-9);
        EXPECT_GE(err, last);
        last = err;
    }
}

TEST(Align, LengthMismatchThrows) {
    EXPECT_THROW(align_at_start(straight(3, 1.0), straight(4, 1.0)), std::invalid_argument);
    EXPECT_THROW(pose_rmse(straight(3, 1.0), straight(4, 1.0)), std::invalid_argument);
}

TEST(PoseRmse, Identity) {
    const auto gt = wiggle(30);
    const auto r = pose_rmse(gt, gt);
    EXPECT_EQ(r.x, 0.0);
    EXPECT_EQ(r.y, 0.0);
    EXPECT_EQ(r.yaw_deg, 0.0);
}

TEST(PoseRmse, ConstantOffset) {
    const auto gt = wiggle(30);
    const auto r = pose_rmse(rigidly_moved(gt, Vec2(1.0, 0.0), 0.0), gt);
    EXPECT_NEAR(r.x, 1.0, 1e-12);
    EXPECT_NEAR(r.y, 0.0, 1e-12);
}

TEST(PoseRmse, RandomPerturbations) {
    const auto gt = straight(10000, 1.0);
    Rng rng(6);
    std::vector<Pose2> est;
    for (const auto& p : gt) est.push_back({p.r + Vec2(rng.normal(0.0, 2.0), rng.normal(0.0, 2.0)), 0.0});
    const auto r = pose_rmse(est, gt);
    EXPECT_NEAR(r.x, 2.0, 0.1);
    EXPECT_NEAR(r.y, 2.0, 0.1);
}

TEST(PoseRmse, YawUsesShortestArc) {
    const std::vector<Pose2> gt{{0.0, 0.0, deg2rad(-179.0)}};
    const std::vector<Pose2> est{{0.0, 0.0, deg2rad(179.0)}};
    EXPECT_NEAR(pose_rmse(est, gt).yaw_deg, 2.0, 1e-9);
}

TEST(Kitti, IdentityIsZero) {
    const auto gt = wiggle(900);
    const auto e = kitti_relative_error(gt, gt);
    EXPECT_NEAR(e.trans_pct, 0.0, 1e-10);
    EXPECT_NEAR(e.rot_deg_per_m, 0.0, 1e-12);
    EXPECT_GT(e.segments, 0u);
}

TEST(Kitti, UniformScaleInflation) {
    const auto gt = straight(1001, 1.0);
    const auto est = straight(1001, 1.01);
    const auto e = kitti_relative_error(est, gt);
    // Segments end at the first pose strictly beyond the length (1 m overshoot
    // on this grid): each segment contributes (L + 1) / L percent.
    const double expected = overshoot_ratio_1000m();
    EXPECT_NEAR(e.trans_pct, expected, 1e-9);
    EXPECT_NEAR(e.trans_pct, 1.0, 0.01);
    EXPECT_NEAR(e.rot_deg_per_m, 0.0, 1e-12);
}

TEST(Kitti, YawRateBias) {
    const double b = 1e-4;  // rad per metre
    const auto gt = straight(1001, 1.0);
    std::vector<Pose2> est;
    Pose2 p;
    for (std::size_t k = 0; k < gt.size(); ++k) {
        est.push_back(p);
        p = apply_relative(p, {Vec2(1.0, 0.0), b});
    }
    const auto e = kitti_relative_error(est, gt);
    const double expected = overshoot_ratio_1000m();
    EXPECT_NEAR(e.rot_deg_per_m, rad2deg(b) * expected, 1e-9);
    EXPECT_NEAR(e.rot_deg_per_m, rad2deg(b), 0.01 * rad2deg(b));
}

TEST(Kitti, HandCountedSegments) {
    // 251 poses 1 m apart, stride 10, lengths {100, 200}. A segment needs a pose
    // strictly beyond start + length: starts 0..140 for 100 m (15), 0..40 for
    // 200 m (5).
    KittiOptions opts;
    opts.lengths = {100.0, 200.0};
    opts.stride = 10;
    const auto gt = straight(251, 1.0);
    EXPECT_EQ(kitti_relative_error(gt, gt, opts).segments, 20u);
}

TEST(Kitti, TooShortThrows) {
    EXPECT_THROW(kitti_relative_error(straight(50, 1.0), straight(50, 1.0)), std::invalid_argument);
}

TEST(Kitti, InvariantToGlobalRigidTransform) {
    const auto gt = wiggle(900);
    std::vector<Pose2> est;
    for (const auto& p : gt) est.push_back({p.r * 1.003, p.theta * 1.01});
    const auto e1 = kitti_relative_error(est, gt);
    const auto e2 = kitti_relative_error(rigidly_moved(est, Vec2(40.0, -7.0), 1.1),
                                         rigidly_moved(gt, Vec2(40.0, -7.0), 1.1));
    EXPECT_NEAR(e1.trans_pct, e2.trans_pct, 1e-9);
    EXPECT_NEAR(e1.rot_deg_per_m, e2.rot_deg_per_m, 1e-12);
    EXPECT_GT(e1.trans_pct, 0.0);
}

TEST(PoseRmse, InvariantToCommonTranslation) {
    const auto gt = wiggle(200);
    Rng rng(2);
    std::vector<Pose2> est;
    for (const auto& p : gt) est.push_back({p.r + Vec2(rng.normal(), rng.normal()), p.theta});
    const auto a = pose_rmse(est, gt);
    const auto b = pose_rmse(rigidly_moved(est, Vec2(500.0, 80.0), 0.0),
                             rigidly_moved(gt, Vec2(500.0, 80.0), 0.0));
    EXPECT_NEAR(a.x, b.x, 1e-9);
    EXPECT_NEAR(a.y, b.y, 1e-9);
}

TEST(EvaluatePoses, CombinesMetrics) {
    const auto gt = straight(1001, 1.0);
    const auto est = straight(1001, 1.01);
    const auto rep = evaluate_poses(est, gt);
    EXPECT_NEAR(rep.kitti_trans_pct, 1.0, 0.01);
    EXPECT_GT(rep.rmse_x, 0.0);
    EXPECT_NEAR(rep.rmse_y, 0.0, 1e-12);
}

TEST(TrackingRmse, PerfectTrackingIsZero) {
    const auto rep = tracking_rmse(timeline_with(100, 0.0, 1.0));
    EXPECT_EQ(rep.gain_mag_rmse_pct, 0.0);
    EXPECT_EQ(rep.aod_rmse_deg, 0.0);
    EXPECT_EQ(rep.aoa_rmse_deg, 0.0);
    EXPECT_EQ(rep.reinit_fraction_pct, 0.0);
    EXPECT_EQ(rep.slot_count, 100u);
}

TEST(TrackingRmse, ConstantAodOffset) {
    const auto rep = tracking_rmse(timeline_with(100, deg2rad(1.0), 1.0));
    EXPECT_NEAR(rep.aod_rmse_deg, 1.0, 1e-9);
    EXPECT_EQ(rep.aoa_rmse_deg, 0.0);
}

TEST(TrackingRmse, RelativeGainError) {
    const auto rep = tracking_rmse(timeline_with(100, 0.0, 1.02));
    EXPECT_NEAR(rep.gain_mag_rmse_pct, 2.0, 1e-9);
}

TEST(TrackingRmse, WrappedAngles) {
    TrackTimeline tl;
    SlotRecord r;
    r.truth = {1e-6, deg2rad(-179.0), 0.0};
    r.tracked = {1e-6, deg2rad(179.0), kTwoPi};
    tl.slots.push_back(r);
    const auto rep = tracking_rmse(tl);
    EXPECT_NEAR(rep.aod_rmse_deg, 2.0, 1e-9);
    EXPECT_NEAR(rep.aoa_rmse_deg, 0.0, 1e-9);
}

TEST(TrackingRmse, ReinitFraction) {
    auto tl = timeline_with(200, 0.0, 1.0);
    for (std::size_t k = 0; k < 200; k += 20) tl.slots[k].reinit = true;
    const auto rep = tracking_rmse(tl);
    EXPECT_EQ(rep.reinit_count, 10u);
    EXPECT_NEAR(rep.reinit_fraction_pct, 5.0, 1e-12);
    EXPECT_THROW(tracking_rmse(TrackTimeline{}), std::invalid_argument);
}

TEST(Drift, WindowedMeansAndPathLength) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6};
    const auto w = windowed_means(v, 3);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_DOUBLE_EQ(w[0], 1.5);
    EXPECT_DOUBLE_EQ(w[2], 5.5);
    EXPECT_THROW(windowed_means(v, 7), std::invalid_argument);
    const auto len = path_lengths(straight(5, 2.0));
    EXPECT_DOUBLE_EQ(len.front(), 0.0);
    EXPECT_DOUBLE_EQ(len.back(), 8.0);
    const auto err = position_errors(straight(3, 1.0), straight(3, 2.0));
    EXPECT_DOUBLE_EQ(err[2], 2.0);
}
