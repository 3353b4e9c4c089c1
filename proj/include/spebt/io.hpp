#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spebt/eval.hpp"
#include "spebt/geometry.hpp"
#include "spebt/tracker.hpp"

namespace spebt {

struct StampedTrajectory {
    std::vector<std::uint64_t> t_ns;
    std::vector<Pose2> poses;

    std::size_t size() const { return poses.size(); }
};

inline constexpr const char* kTrajectoryHeader = "k,t_ns,x_m,y_m,theta_rad";
inline constexpr const char* kTimelineHeader =
    "k,x_gt,y_gt,theta_gt,x_est,y_est,theta_est,alpha_gt,alpha_trk,aod_gt,aod_trk,aoa_gt,aoa_trk,reinit";

std::string trajectory_to_csv(const StampedTrajectory& traj);
// Throws IoError naming `source` and the offending line.
StampedTrajectory trajectory_from_csv(const std::string& text, const std::string& source);

void write_trajectory_csv(const std::string& path, const StampedTrajectory& traj);
StampedTrajectory read_trajectory_csv(const std::string& path);

// Angles in radians, wrapped; alpha columns hold |alpha|.
std::string timeline_to_csv(const TrackTimeline& timeline);
void write_timeline_csv(const std::string& path, const TrackTimeline& timeline);

std::string pose_report_json(const PoseErrorReport& report);
std::string tracking_report_json(const TrackingErrorReport& report);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Creates the directory (and parents); IoError on failure.
void ensure_directory(const std::string& path);

// Shortest-roundtrip-safe number formatting used by every writer.
std::string format_double(double v);

}  // namespace spebt
