#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spebt/geometry.hpp"
#include "spebt/radar_scan.hpp"
#include "spebt/rng.hpp"

namespace spebt {

struct PointLandmark {
    Vec2 position;
    double reflectivity;  // [1, 255]
};

struct SegmentLandmark {
    Vec2 a;
    Vec2 b;
    double reflectivity;  // [1, 255]
};

struct LandmarkMap {
    std::vector<PointLandmark> points;
    std::vector<SegmentLandmark> segments;

    std::size_t size() const { return points.size() + segments.size(); }
};

struct WorldSpec {
    Vec2 min{-200.0, -200.0};
    Vec2 max{200.0, 200.0};
    double building_density = 3.0;     // rectangular buildings per hectare
    double point_density = 4.0;        // isolated reflectors per hectare
    double building_size_min = 8.0;    // m
    double building_size_max = 30.0;   // m
    double reflectivity_min = 70.0;
    double reflectivity_max = 230.0;
    std::vector<Vec2> keep_clear;      // road polyline kept free of buildings
    double clearance = 8.0;            // m, half road width
};

// Deterministic in (spec, rng seed): building footprints (four wall segments
// each) plus scattered point reflectors inside the bounding box.
LandmarkMap generate_world(const WorldSpec& spec, Rng& rng);

// Bounding box of the trajectory grown by `margin`, with the path as road.
WorldSpec world_around(const std::vector<Pose2>& trajectory, double margin);

enum class TrajectoryPreset { UrbanLoop, Straight, Arc };

std::string to_string(TrajectoryPreset preset);
TrajectoryPreset trajectory_preset_from_string(const std::string& name);

struct TrajectorySpec {
    TrajectoryPreset preset = TrajectoryPreset::UrbanLoop;
    std::size_t slot_count = 6000;
    double slot_period = 0.25;    // s
    double speed = 6.0;           // m/s; the urban loop derives its own to close one lap
    double arc_radius = 200.0;    // m, Arc preset (left turn)
    double loop_width = 2500.0;   // m, extent along x
    double loop_height = 2000.0;  // m, extent along y
    double corner_radius = 20.0;  // m
    Pose2 start{};

    void validate() const;
};

// Poses at the start of every slot. Yaw follows the direction of motion.
std::vector<Pose2> generate_trajectory(const TrajectorySpec& spec);

// Arc length of the closed urban loop for `spec`.
double urban_loop_length(const TrajectorySpec& spec);

struct RadarSimConfig {
    std::uint32_t azimuth_count = 400;
    std::uint32_t range_bin_count = 1000;
    double range_resolution = 0.1;  // m per bin
    double range_min = 5.0;
    double range_max = 100.0;
    double pulse_sigma_bins = 1.0;  // width of the 3-bin pulse
    double segment_step = 0.5;      // m between points used to bin walls into index cells
    double noise_mean = 5.0;        // exponential background level
    double speckle_rate = 2e-5;     // per-cell probability of a false return
    double speckle_max = 180.0;

    void validate() const;
    bool noiseless() const { return noise_mean <= 0.0 && speckle_rate <= 0.0; }
};

// Renders polar scans of a map. Map samples are indexed once so each scan only
// touches landmarks near the sensor.
class ScanRenderer {
public:
    ScanRenderer(const LandmarkMap& map, RadarSimConfig cfg);
    ~ScanRenderer();
    ScanRenderer(ScanRenderer&&) noexcept;
    ScanRenderer& operator=(ScanRenderer&&) noexcept;

    RadarScan render(const Pose2& sensor_pose, Rng& rng, std::uint64_t timestamp_ns = 0) const;
    std::size_t sample_count() const;

private:
    struct Index;
    std::unique_ptr<Index> index_;
    RadarSimConfig cfg_;
};

RadarScan render_scan(const LandmarkMap& map, const Pose2& sensor_pose, const RadarSimConfig& cfg,
                      Rng& rng, std::uint64_t timestamp_ns = 0);

struct NoiseSpec {
    double sigma_r = 1.0;               // m
    double sigma_theta = deg2rad(3.0);  // rad
    std::uint64_t seed = 0;
};

// r_hat = r + eps_r, eps_r ~ N(0, sigma_r^2 I); theta_hat = theta + eps_theta.
Pose2 perturb_pose(const Pose2& pose, const NoiseSpec& noise, Rng& rng);

// Slot k uses stream noise.seed split by k.
std::vector<Pose2> perturb_trajectory(const std::vector<Pose2>& truth, const NoiseSpec& noise);

}  // namespace spebt
