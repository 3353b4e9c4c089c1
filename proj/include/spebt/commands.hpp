#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spebt/config.hpp"
#include "spebt/eval.hpp"
#include "spebt/io.hpp"
#include "spebt/synth.hpp"
#include "spebt/tracker.hpp"

namespace spebt {

// Random streams below a master seed.
namespace streams {
inline constexpr std::uint64_t kWorld = 1;
inline constexpr std::uint64_t kScans = 2;
inline constexpr std::uint64_t kPoseNoise = 3;
inline constexpr std::uint64_t kTracker = 4;
}  // namespace streams

// Ground-truth trajectory with slot timestamps (depends on config only).
StampedTrajectory simulate_trajectory(const RunConfig& cfg);

// Landmarks around the trajectory, drawn from the world stream of `seed`.
LandmarkMap simulate_world(const RunConfig& cfg, const std::vector<Pose2>& truth, std::uint64_t seed);

// Scan of slot k; its noise comes from the per-slot scan stream of `seed`.
RadarScan render_slot(const ScanRenderer& renderer, const Pose2& pose, std::uint64_t seed,
                      std::size_t k, std::uint64_t t_ns);

// Pose estimates fed to the tracker. `odometry` must be given for the
// odometry source and is start-aligned to the truth.
std::vector<Pose2> pose_estimates(PoseSource source, const std::vector<Pose2>& truth,
                                  const std::vector<Pose2>* odometry, const RunConfig& cfg,
                                  std::uint64_t seed);

TrackTimeline track_poses(const std::vector<Pose2>& truth, const std::vector<Pose2>& estimates,
                          const RunConfig& cfg, std::uint64_t seed);

std::string manifest_json(const std::string& command, const RunConfig& cfg, std::uint64_t seed);

// simulate: scans/NNNNNN.rscn, ground_truth.csv, manifest.json.
void cmd_simulate(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir);

// odometry: odometry.csv from a directory of RSCN scans.
StampedTrajectory cmd_odometry(const std::string& scan_dir, const RunConfig& cfg,
                               const std::string& out_dir);

// track: timeline.csv and tracking_report.json. `est_csv` is required for the
// odometry pose source and ignored otherwise.
TrackingErrorReport cmd_track(const std::string& gt_csv, const std::optional<std::string>& est_csv,
                              const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir);

// eval: pose_report.json with start-aligned RMSE and KITTI errors.
PoseErrorReport cmd_eval(const std::string& est_csv, const std::string& gt_csv, const RunConfig& cfg,
                         const std::string& out_dir);

struct MetricStats {
    double mean = 0.0;
    double std = 0.0;
};

struct McReport {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<TrackingErrorReport> replicates;
    MetricStats gain_mag_rmse_pct;
    MetricStats aod_rmse_deg;
    MetricStats aoa_rmse_deg;
    MetricStats reinit_fraction_pct;
    bool aod_below_aoa_all = false;
};

// Replicate r runs the tracker with seed derive_seed(master, r); replicates
// are spread over a worker pool and collected in index order.
McReport monte_carlo(const std::vector<Pose2>& truth, const std::vector<Pose2>* odometry,
                     const RunConfig& cfg, std::uint64_t master_seed, std::size_t replicates);

std::string mc_report_json(const McReport& report);

// mc: mc_report.json and replicates.csv. The trajectory is generated from the
// config unless `gt_csv` is given.
McReport cmd_mc(const RunConfig& cfg, std::uint64_t seed, std::size_t replicates, const std::string& out_dir,
                const std::optional<std::string>& gt_csv = std::nullopt,
                const std::optional<std::string>& est_csv = std::nullopt);

struct RunSummary {
    PoseErrorReport pose;
    TrackingErrorReport tracking;
    std::vector<double> drift_windows;  // windowed mean position error of odometry (m)
    double final_position_error = 0.0;  // m, start-aligned
    std::size_t odometry_fallbacks = 0;
};

// run: simulate -> odometry -> track -> eval. Scans stay in memory unless
// `write_scans` is set.
RunSummary cmd_run(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                   bool write_scans = false);

}  // namespace spebt
