#include "spebt/odometry.hpp"

namespace spebt {

RadarOdometry::RadarOdometry(OdometryConfig cfg, Pose2 initial)
    : cfg_(cfg), pose_(initial) {
    cfg_.validate();
}

OdometryStep RadarOdometry::process(const RadarScan& scan) {
    return process(build_representation(scan, cfg_));
}

OdometryStep RadarOdometry::process(SurfaceRepresentation rep) {
    OdometryStep step;
    ++count_;
    if (!prev_) {
        prev_ = std::move(rep);
        step.pose = pose_;
        return step;
    }
    step.registration = register_scans(*prev_, rep, velocity_, cfg_);
    RelativePose delta = step.registration.estimated;
    if (step.registration.failed) {
        delta = velocity_;
        step.used_fallback = true;
        ++fallbacks_;
    }
    velocity_ = delta;
    pose_ = apply_relative(pose_, delta);
    prev_ = std::move(rep);
    step.pose = pose_;
    return step;
}

}  // namespace spebt
