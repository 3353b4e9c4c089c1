#include "spebt/geometry.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace spebt {

double wrap_angle(double rad) {
    if (!std::isfinite(rad)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    double w = std::remainder(rad, kTwoPi);  // [-pi, pi]
    if (w <= -kPi) {
        w += kTwoPi;
    }
    return w;
}

Pose2::Pose2(const Vec2& position, double yaw) : r(position), theta(wrap_angle(yaw)) {
    if (!r.allFinite()) {
        throw std::invalid_argument("Pose2: non-finite position");
    }
}

Mat2 rotation_from_yaw(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("rotation_from_yaw: non-finite yaw");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat2 R;
    R << c, -s, s, c;
    return R;
}

Transform2 Transform2::from_pose(const Pose2& pose) {
    return {rotation_from_yaw(pose.theta), pose.r};
}

double Transform2::yaw() const { return std::atan2(R(1, 0), R(0, 0)); }

Pose2 Transform2::to_pose() const { return {t, yaw()}; }

bool Transform2::is_valid(double tol) const {
    if (!R.allFinite() || !t.allFinite()) {
        return false;
    }
    return (R.transpose() * R - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
}

Transform2 RelativePose::to_transform() const { return {rotation_from_yaw(dtheta), dr}; }

Transform2 compose(const Transform2& a, const Transform2& b) {
    return {a.R * b.R, a.R * b.t + a.t};
}

Transform2 inverse(const Transform2& t) {
    const Mat2 Rt = t.R.transpose();
    return {Rt, -Rt * t.t};
}

RelativePose relative_pose(const Transform2& prev, const Transform2& cur) {
    const Transform2 d = compose(inverse(prev), cur);
    return {d.t, wrap_angle(cur.yaw() - prev.yaw())};
}

RelativePose relative_pose(const Pose2& prev, const Pose2& cur) {
    return relative_pose(Transform2::from_pose(prev), Transform2::from_pose(cur));
}

Pose2 apply_relative(const Pose2& pose, const RelativePose& delta) {
    return compose(Transform2::from_pose(pose), delta.to_transform()).to_pose();
}

}  // namespace spebt
