#pragma once

#include <cstdint>
#include <string>

#include "spebt/channel.hpp"
#include "spebt/eval.hpp"
#include "spebt/radar_pipeline.hpp"
#include "spebt/synth.hpp"
#include "spebt/tracker.hpp"

namespace spebt {

enum class PoseSource { Odometry, GtNoise, Gt };

std::string to_string(PoseSource source);
PoseSource pose_source_from_string(const std::string& name);

struct SynthConfig {
    std::uint64_t seed = 1;
    TrajectorySpec trajectory;
    double world_margin = 150.0;  // m around the trajectory bounding box
    WorldSpec world;              // bounding box and road are filled from the trajectory
    RadarSimConfig radar;
};

struct EvalConfig {
    KittiOptions kitti;
    std::size_t replicates = 100;
    std::size_t workers = 0;        // 0 = hardware concurrency
    std::size_t drift_windows = 10;
    PoseSource pose_source = PoseSource::Odometry;
};

struct RunConfig {
    OdometryConfig odometry;
    ChannelConfig channel;
    TrackerConfig tracker;
    SynthConfig synth;
    EvalConfig eval;

    void validate() const;  // throws ConfigError
};

// Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

// FNV-1a 64 over the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace spebt
