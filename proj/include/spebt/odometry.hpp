#pragma once

#include <optional>

#include "spebt/geometry.hpp"
#include "spebt/radar_pipeline.hpp"
#include "spebt/registration.hpp"

namespace spebt {

struct OdometryStep {
    Pose2 pose;
    RegistrationResult registration;  // default-constructed for the first scan
    bool used_fallback = false;
};

// Scan-to-previous-scan radar odometry with a constant-velocity motion prior.
class RadarOdometry {
public:
    explicit RadarOdometry(OdometryConfig cfg, Pose2 initial = {});

    OdometryStep process(const RadarScan& scan);
    OdometryStep process(SurfaceRepresentation rep);

    const Pose2& pose() const { return pose_; }
    std::size_t scans_processed() const { return count_; }
    std::size_t fallback_count() const { return fallbacks_; }

private:
    OdometryConfig cfg_;
    Pose2 pose_;
    RelativePose velocity_;
    std::optional<SurfaceRepresentation> prev_;
    std::size_t count_ = 0;
    std::size_t fallbacks_ = 0;
};

}  // namespace spebt
