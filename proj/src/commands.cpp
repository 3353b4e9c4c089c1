#include "spebt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <thread>

#include "json.hpp"
#include "spebt/error.hpp"
#include "spebt/log.hpp"
#include "spebt/odometry.hpp"
#include "spebt/radar_scan.hpp"

namespace spebt {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kProgressEvery = 100;

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string scan_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu.rscn", k);
    return buf;
}

void check_pose(const Pose2& p, const char* what, std::size_t k) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()) || !std::isfinite(p.theta)) {
        throw NumericError(std::string(what) + " diverged at slot " + std::to_string(k));
    }
}

}  // namespace

StampedTrajectory simulate_trajectory(const RunConfig& cfg) {
    StampedTrajectory traj;
    try {
        traj.poses = generate_trajectory(cfg.synth.trajectory);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto period_ns = static_cast<std::uint64_t>(std::llround(cfg.synth.trajectory.slot_period * 1e9));
    traj.t_ns.resize(traj.poses.size());
    for (std::size_t k = 0; k < traj.t_ns.size(); ++k) {
        traj.t_ns[k] = k * period_ns;
    }
    return traj;
}

LandmarkMap simulate_world(const RunConfig& cfg, const std::vector<Pose2>& truth, std::uint64_t seed) {
    WorldSpec spec = world_around(truth, cfg.synth.world_margin);
    const WorldSpec& w = cfg.synth.world;
    spec.building_density = w.building_density;
    spec.point_density = w.point_density;
    spec.building_size_min = w.building_size_min;
    spec.building_size_max = w.building_size_max;
    spec.reflectivity_min = w.reflectivity_min;
    spec.reflectivity_max = w.reflectivity_max;
    spec.clearance = w.clearance;
    Rng rng = Rng(seed).split(streams::kWorld);
    return generate_world(spec, rng);
}

RadarScan render_slot(const ScanRenderer& renderer, const Pose2& pose, std::uint64_t seed, std::size_t k,
                      std::uint64_t t_ns) {
    Rng rng = Rng(seed).split(streams::kScans).split(k);
    return renderer.render(pose, rng, t_ns);
}

std::vector<Pose2> pose_estimates(PoseSource source, const std::vector<Pose2>& truth,
                                  const std::vector<Pose2>* odometry, const RunConfig& cfg,
                                  std::uint64_t seed) {
    switch (source) {
        case PoseSource::Gt:
            return truth;
        case PoseSource::GtNoise: {
            NoiseSpec noise;
            noise.sigma_r = cfg.tracker.sigma_r;
            noise.sigma_theta = cfg.tracker.sigma_theta;
            noise.seed = derive_seed(seed, streams::kPoseNoise);
            return perturb_trajectory(truth, noise);
        }
        case PoseSource::Odometry:
            if (!odometry) throw ConfigError("pose source 'odometry' needs an estimated trajectory");
            if (odometry->size() != truth.size()) {
                throw ConfigError("estimated trajectory has " + std::to_string(odometry->size()) +
                                  " slots, ground truth has " + std::to_string(truth.size()));
            }
            return align_at_start(*odometry, truth);
    }
    return truth;
}

TrackTimeline track_poses(const std::vector<Pose2>& truth, const std::vector<Pose2>& estimates,
                          const RunConfig& cfg, std::uint64_t seed) {
    if (truth.size() != estimates.size()) {
        throw ConfigError("slot count mismatch: " + std::to_string(truth.size()) + " true vs " +
                          std::to_string(estimates.size()) + " estimated poses");
    }
    const Rng rng = Rng(seed).split(streams::kTracker);
    TrackTimeline tl;
    try {
        tl = run_tracker(truth, estimates, cfg.channel, cfg.tracker, rng);
    } catch (const std::invalid_argument& e) {
        throw NumericError(std::string("tracker: ") + e.what());
    }
    for (const auto& s : tl.slots) {
        if (!s.tracked.vec().allFinite()) {
            throw NumericError("tracker state became non-finite at slot " + std::to_string(s.k));
        }
    }
    return tl;
}

std::string manifest_json(const std::string& command, const RunConfig& cfg, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config_hash"] = config_hash(cfg);
    j["pose_source"] = to_string(cfg.eval.pose_source);
    j["innovation"] = to_string(cfg.tracker.innovation);
    j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    return j.dump(2) + "\n";
}

void cmd_simulate(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    cfg.validate();
    const std::string scan_dir = join(out_dir, "scans");
    ensure_directory(scan_dir);
    const StampedTrajectory truth = simulate_trajectory(cfg);
    const LandmarkMap map = simulate_world(cfg, truth.poses, seed);
    log_info("synth", std::to_string(map.size()) + " landmarks, " + std::to_string(truth.size()) + " slots");
    const ScanRenderer renderer(map, cfg.synth.radar);
    for (std::size_t k = 0; k < truth.size(); ++k) {
        write_rscn(join(scan_dir, scan_name(k)), render_slot(renderer, truth.poses[k], seed, k, truth.t_ns[k]));
        if ((k + 1) % kProgressEvery == 0 || k + 1 == truth.size()) {
            log_info("synth", "rendered " + std::to_string(k + 1) + "/" + std::to_string(truth.size()));
        }
    }
    write_trajectory_csv(join(out_dir, "ground_truth.csv"), truth);
    write_text_file(join(out_dir, "manifest.json"), manifest_json("simulate", cfg, seed));
}

StampedTrajectory cmd_odometry(const std::string& scan_dir, const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const auto files = list_scan_files(scan_dir);
    if (files.size() < 2) {
        throw IoError("'" + scan_dir + "' holds " + std::to_string(files.size()) + " scans, need at least 2");
    }
    ensure_directory(out_dir);
    RadarOdometry odo(cfg.odometry);
    StampedTrajectory est;
    for (std::size_t k = 0; k < files.size(); ++k) {
        const RadarScan scan = read_rscn(files[k]);
        const OdometryStep step = odo.process(scan);
        check_pose(step.pose, "odometry", k);
        if (step.used_fallback) {
            log_warn("odometry", "registration failed at " + files[k].filename().string() +
                                     ", constant-velocity fallback");
        }
        est.t_ns.push_back(scan.timestamp_ns);
        est.poses.push_back(step.pose);
        if ((k + 1) % kProgressEvery == 0 || k + 1 == files.size()) {
            log_info("odometry", "scan " + std::to_string(k + 1) + "/" + std::to_string(files.size()));
        }
    }
    write_trajectory_csv(join(out_dir, "odometry.csv"), est);
    return est;
}

TrackingErrorReport cmd_track(const std::string& gt_csv, const std::optional<std::string>& est_csv,
                              const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    cfg.validate();
    const StampedTrajectory gt = read_trajectory_csv(gt_csv);
    if (gt.size() == 0) throw IoError(gt_csv + ": no slots");
    std::optional<StampedTrajectory> est;
    if (cfg.eval.pose_source == PoseSource::Odometry) {
        if (!est_csv) throw ConfigError("pose source 'odometry' needs an estimated trajectory CSV");
        est = read_trajectory_csv(*est_csv);
    }
    ensure_directory(out_dir);
    const auto estimates =
        pose_estimates(cfg.eval.pose_source, gt.poses, est ? &est->poses : nullptr, cfg, seed);
    const TrackTimeline tl = track_poses(gt.poses, estimates, cfg, seed);
    const TrackingErrorReport report = tracking_rmse(tl);
    log_info("tracker", std::to_string(report.reinit_count) + " re-initialisations over " +
                            std::to_string(report.slot_count) + " slots");
    write_timeline_csv(join(out_dir, "timeline.csv"), tl);
    write_text_file(join(out_dir, "tracking_report.json"), tracking_report_json(report));
    write_text_file(join(out_dir, "manifest.json"), manifest_json("track", cfg, seed));
    return report;
}

PoseErrorReport cmd_eval(const std::string& est_csv, const std::string& gt_csv, const RunConfig& cfg,
                         const std::string& out_dir) {
    const StampedTrajectory est = read_trajectory_csv(est_csv);
    const StampedTrajectory gt = read_trajectory_csv(gt_csv);
    if (est.size() != gt.size()) {
        throw ConfigError("slot count mismatch: " + est_csv + " has " + std::to_string(est.size()) + ", " +
                          gt_csv + " has " + std::to_string(gt.size()));
    }
    if (gt.size() == 0) throw IoError(gt_csv + ": no slots");
    ensure_directory(out_dir);
    PoseErrorReport report;
    try {
        report = evaluate_poses(est.poses, gt.poses, cfg.eval.kitti);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("eval: ") + e.what());
    }
    write_text_file(join(out_dir, "pose_report.json"), pose_report_json(report));
    return report;
}

namespace {

MetricStats stats(const std::vector<TrackingErrorReport>& reps, double TrackingErrorReport::*field) {
    MetricStats s;
    const double n = static_cast<double>(reps.size());
    for (const auto& r : reps) s.mean += r.*field;
    s.mean /= n;
    if (reps.size() > 1) {
        double ss = 0.0;
        for (const auto& r : reps) ss += (r.*field - s.mean) * (r.*field - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

}  // namespace

McReport monte_carlo(const std::vector<Pose2>& truth, const std::vector<Pose2>* odometry, const RunConfig& cfg,
                     std::uint64_t master_seed, std::size_t replicates) {
    if (replicates == 0) throw ConfigError("replicates must be >= 1");
    McReport rep;
    rep.master_seed = master_seed;
    rep.seeds.resize(replicates);
    rep.replicates.resize(replicates);
    for (std::size_t r = 0; r < replicates; ++r) rep.seeds[r] = derive_seed(master_seed, r);

    std::size_t workers = cfg.eval.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, replicates);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::vector<std::exception_ptr> errors(workers);
    const auto work = [&](std::size_t w) {
        try {
            for (std::size_t r = next++; r < replicates; r = next++) {
                const auto est = pose_estimates(cfg.eval.pose_source, truth, odometry, cfg, rep.seeds[r]);
                rep.replicates[r] = tracking_rmse(track_poses(truth, est, cfg, rep.seeds[r]));
                const std::size_t n = ++done;
                if (n % 10 == 0 || n == replicates) {
                    log_info("mc", "replicate " + std::to_string(n) + "/" + std::to_string(replicates));
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
            next = replicates;
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    rep.gain_mag_rmse_pct = stats(rep.replicates, &TrackingErrorReport::gain_mag_rmse_pct);
    rep.aod_rmse_deg = stats(rep.replicates, &TrackingErrorReport::aod_rmse_deg);
    rep.aoa_rmse_deg = stats(rep.replicates, &TrackingErrorReport::aoa_rmse_deg);
    rep.reinit_fraction_pct = stats(rep.replicates, &TrackingErrorReport::reinit_fraction_pct);
    rep.aod_below_aoa_all = std::all_of(rep.replicates.begin(), rep.replicates.end(),
                                        [](const auto& r) { return r.aod_rmse_deg < r.aoa_rmse_deg; });
    return rep;
}

std::string mc_report_json(const McReport& report) {
    nlohmann::ordered_json j;
    j["master_seed"] = report.master_seed;
    j["replicates"] = report.replicates.size();
    const auto put = [&](const char* name, const MetricStats& s) { j[name] = {{"mean", s.mean}, {"std", s.std}}; };
    put("gain_mag_rmse_pct", report.gain_mag_rmse_pct);
    put("aod_rmse_deg", report.aod_rmse_deg);
    put("aoa_rmse_deg", report.aoa_rmse_deg);
    put("reinit_fraction_pct", report.reinit_fraction_pct);
    j["aod_below_aoa_all"] = report.aod_below_aoa_all;
    return j.dump(2) + "\n";
}

McReport cmd_mc(const RunConfig& cfg, std::uint64_t seed, std::size_t replicates, const std::string& out_dir,
                const std::optional<std::string>& gt_csv, const std::optional<std::string>& est_csv) {
    cfg.validate();
    const StampedTrajectory gt = gt_csv ? read_trajectory_csv(*gt_csv) : simulate_trajectory(cfg);
    std::optional<StampedTrajectory> est;
    if (cfg.eval.pose_source == PoseSource::Odometry) {
        if (!est_csv) throw ConfigError("mc with pose source 'odometry' needs an estimated trajectory CSV");
        est = read_trajectory_csv(*est_csv);
    }
    ensure_directory(out_dir);
    const McReport report = monte_carlo(gt.poses, est ? &est->poses : nullptr, cfg, seed, replicates);

    std::string csv = "replicate,seed,gain_mag_rmse_pct,aod_rmse_deg,aoa_rmse_deg,reinit_fraction_pct\n";
    for (std::size_t r = 0; r < report.replicates.size(); ++r) {
        const auto& x = report.replicates[r];
        csv += std::to_string(r) + ',' + std::to_string(report.seeds[r]) + ',' + format_double(x.gain_mag_rmse_pct) +
               ',' + format_double(x.aod_rmse_deg) + ',' + format_double(x.aoa_rmse_deg) + ',' +
               format_double(x.reinit_fraction_pct) + '\n';
    }
    write_text_file(join(out_dir, "replicates.csv"), csv);
    write_text_file(join(out_dir, "mc_report.json"), mc_report_json(report));
    write_text_file(join(out_dir, "manifest.json"), manifest_json("mc", cfg, seed));
    return report;
}

RunSummary cmd_run(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir, bool write_scans) {
    cfg.validate();
    ensure_directory(out_dir);
    const std::string scan_dir = join(out_dir, "scans");
    if (write_scans) ensure_directory(scan_dir);

    const StampedTrajectory truth = simulate_trajectory(cfg);
    const LandmarkMap map = simulate_world(cfg, truth.poses, seed);
    log_info("synth", std::to_string(map.size()) + " landmarks, " + std::to_string(truth.size()) + " slots");
    const ScanRenderer renderer(map, cfg.synth.radar);

    RunSummary summary;
    RadarOdometry odo(cfg.odometry);
    StampedTrajectory est;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const RadarScan scan = render_slot(renderer, truth.poses[k], seed, k, truth.t_ns[k]);
        if (write_scans) write_rscn(join(scan_dir, scan_name(k)), scan);
        const OdometryStep step = odo.process(scan);
        check_pose(step.pose, "odometry", k);
        if (step.used_fallback) {
            log_warn("odometry", "registration failed at slot " + std::to_string(k) + ", constant-velocity fallback");
        }
        est.t_ns.push_back(scan.timestamp_ns);
        est.poses.push_back(step.pose);
        if ((k + 1) % kProgressEvery == 0 || k + 1 == truth.size()) {
            log_info("odometry", "slot " + std::to_string(k + 1) + "/" + std::to_string(truth.size()));
        }
    }
    summary.odometry_fallbacks = odo.fallback_count();

    const auto estimates = pose_estimates(cfg.eval.pose_source, truth.poses, &est.poses, cfg, seed);
    const TrackTimeline tl = track_poses(truth.poses, estimates, cfg, seed);
    summary.tracking = tracking_rmse(tl);
    log_info("tracker", std::to_string(summary.tracking.reinit_count) + " re-initialisations over " +
                            std::to_string(summary.tracking.slot_count) + " slots");

    const auto aligned = align_at_start(est.poses, truth.poses);
    const std::vector<double> errors = position_errors(aligned, truth.poses);
    summary.drift_windows = windowed_means(errors, std::min(cfg.eval.drift_windows, errors.size()));
    summary.final_position_error = errors.back();
    try {
        summary.pose = evaluate_poses(est.poses, truth.poses, cfg.eval.kitti);
    } catch (const std::invalid_argument& e) {
        log_warn("eval", std::string("KITTI metrics skipped: ") + e.what());
        const PoseRmse r = pose_rmse(aligned, truth.poses);
        summary.pose.rmse_x = r.x;
        summary.pose.rmse_y = r.y;
        summary.pose.rmse_yaw_deg = r.yaw_deg;
    }

    write_trajectory_csv(join(out_dir, "ground_truth.csv"), truth);
    write_trajectory_csv(join(out_dir, "odometry.csv"), est);
    write_timeline_csv(join(out_dir, "timeline.csv"), tl);
    write_text_file(join(out_dir, "tracking_report.json"), tracking_report_json(summary.tracking));
    write_text_file(join(out_dir, "pose_report.json"), pose_report_json(summary.pose));
    nlohmann::ordered_json drift;
    drift["drift_windows_m"] = summary.drift_windows;
    drift["final_position_error_m"] = summary.final_position_error;
    drift["odometry_fallbacks"] = summary.odometry_fallbacks;
    write_text_file(join(out_dir, "drift_report.json"), drift.dump(2) + "\n");
    write_text_file(join(out_dir, "manifest.json"), manifest_json("run", cfg, seed));
    return summary;
}

}  // namespace spebt
