#pragma once

#include <Eigen/Core>

namespace spebt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

// SE(2) vehicle pose: position r = [x, y] and yaw theta, theta kept in (-pi, pi].
struct Pose2 {
    Vec2 r = Vec2::Zero();
    double theta = 0.0;

    Pose2() = default;
    Pose2(const Vec2& position, double yaw);
    Pose2(double x, double y, double yaw) : Pose2(Vec2(x, y), yaw) {}

    double x() const { return r.x(); }
    double y() const { return r.y(); }
};

// Homogeneous transform [R t; 0 1].
struct Transform2 {
    Mat2 R = Mat2::Identity();
    Vec2 t = Vec2::Zero();

    static Transform2 identity() { return {}; }
    static Transform2 from_pose(const Pose2& pose);

    Pose2 to_pose() const;
    double yaw() const;
    Vec2 apply(const Vec2& p) const { return R * p + t; }
    bool is_valid(double tol = 1e-12) const;
};

// Motion between consecutive slots: T_{k-1}^{-1} T_k = [dR(dtheta) dr; 0 1].
struct RelativePose {
    Vec2 dr = Vec2::Zero();
    double dtheta = 0.0;

    static RelativePose identity() { return {}; }
    Transform2 to_transform() const;
};

Mat2 rotation_from_yaw(double theta);

Transform2 compose(const Transform2& a, const Transform2& b);
Transform2 inverse(const Transform2& t);

RelativePose relative_pose(const Transform2& prev, const Transform2& cur);
RelativePose relative_pose(const Pose2& prev, const Pose2& cur);

// Pose reached by applying `delta` in the frame of `pose`.
Pose2 apply_relative(const Pose2& pose, const RelativePose& delta);

}  // namespace spebt
