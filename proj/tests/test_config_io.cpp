#include <gtest/gtest.h>

#include <filesystem>

#include "spebt/commands.hpp"
#include "spebt/config.hpp"
#include "spebt/error.hpp"
#include "spebt/io.hpp"

using namespace spebt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("spebt_cfg_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig small_config(std::size_t slots = 40) {
    RunConfig cfg;
    cfg.synth.trajectory.preset = TrajectoryPreset::Arc;
    cfg.synth.trajectory.slot_count = slots;
    cfg.synth.trajectory.speed = 4.0;
    cfg.synth.trajectory.start = {Vec2(0.0, 0.0), 0.0};
    cfg.eval.workers = 2;
    return cfg;
}

}  // namespace

TEST(Config, DefaultsFromTable) {
    const RunConfig cfg = config_from_json("{}");
    EXPECT_EQ(cfg.channel.n_tx, 4);
    EXPECT_EQ(cfg.channel.n_rx, 4);
    EXPECT_DOUBLE_EQ(cfg.channel.wavelength, 6e-3);
    EXPECT_DOUBLE_EQ(cfg.channel.path_loss_exponent, 2.2);
    EXPECT_NEAR(cfg.channel.noise_power, 1e-12, 1e-24);
    EXPECT_DOUBLE_EQ(cfg.tracker.sigma_r, 1.0);
    EXPECT_DOUBLE_EQ(cfg.tracker.sigma_theta, deg2rad(3.0));
    EXPECT_DOUBLE_EQ(cfg.tracker.alpha_tilde, 5e-7);
    EXPECT_EQ(cfg.eval.pose_source, PoseSource::Odometry);
    EXPECT_EQ(cfg.synth.trajectory.slot_count, 6000u);
}

TEST(Config, ReadsValuesAndUnits) {
    const RunConfig cfg = config_from_json(R"({
        "channel": {"noise_power_dbm": -80, "n_tx": 8},
        "tracker": {"sigma_theta_deg": 1.5, "innovation": "paper-literal"},
        "eval": {"pose_source": "gt-noise", "replicates": 7},
        "synth": {"seed": 99, "trajectory": {"preset": "straight", "slot_count": 10}}
    })");
    EXPECT_NEAR(cfg.channel.noise_power, 1e-11, 1e-23);
    EXPECT_EQ(cfg.channel.n_tx, 8);
    EXPECT_DOUBLE_EQ(cfg.tracker.sigma_theta, deg2rad(1.5));
    EXPECT_EQ(cfg.tracker.innovation, InnovationMode::PaperLiteral);
    EXPECT_EQ(cfg.eval.pose_source, PoseSource::GtNoise);
    EXPECT_EQ(cfg.eval.replicates, 7u);
    EXPECT_EQ(cfg.synth.seed, 99u);
    EXPECT_EQ(cfg.synth.trajectory.preset, TrajectoryPreset::Straight);
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(config_from_json(R"({"trackr": {}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"tracker": {"sigma": 1}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"synth": {"radar": {"beams": 3}}})"), ConfigError);
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(config_from_json(R"({"tracker": {"sigma_r": "one"}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"synth": {"trajectory": {"slot_count": 0}}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"channel": {"n_tx": 0}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"eval": {"pose_source": "lidar"}})"), ConfigError);
    EXPECT_THROW(config_from_json("{not json"), ConfigError);
    EXPECT_THROW(config_from_json("[1, 2]"), ConfigError);
}

TEST(Config, RoundTrip) {
    RunConfig cfg = small_config();
    cfg.tracker.sigma_theta = deg2rad(2.25);
    cfg.channel.noise_power = dbm_to_watts(-87.5);
    cfg.eval.kitti.lengths = {50.0, 75.0};
    const std::string once = config_to_json(cfg);
    const RunConfig back = config_from_json(once);
    EXPECT_EQ(config_to_json(back), once);
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);
    cfg.synth.seed += 1;
    EXPECT_NE(config_hash(cfg), config_hash(back));
}

TEST(Config, MissingFileIsIoError) {
    EXPECT_THROW(load_config("/nonexistent/spebt.json"), IoError);
}

TEST(TrajectoryCsv, RoundTrip) {
    StampedTrajectory t;
    t.t_ns = {0, 250000000, 500000000};
    t.poses = {{0.0, 0.0, 0.0}, {1.0 / 3.0, -2.0, 0.1}, {2.5, 1e-9, -3.0}};
    const std::string text = trajectory_to_csv(t);
    EXPECT_EQ(text.substr(0, text.find('\n')), "k,t_ns,x_m,y_m,theta_rad");
    const auto back = trajectory_from_csv(text, "mem");
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.t_ns[i], t.t_ns[i]);
        EXPECT_EQ(back.poses[i].r, t.poses[i].r);
        EXPECT_EQ(back.poses[i].theta, t.poses[i].theta);
    }
}

TEST(TrajectoryCsv, ErrorsCarryLineNumbers) {
    const std::string header = "k,t_ns,x_m,y_m,theta_rad\n";
    try {
        trajectory_from_csv(header + "0,0,0,0,0\n1,5,abc,0,0\n", "traj.csv");
        FAIL() << "no error";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("traj.csv:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(trajectory_from_csv("k,t,x,y,theta\n", "bad.csv"), IoError);
    EXPECT_THROW(trajectory_from_csv(header + "0,0,0,0\n", "short.csv"), IoError);
    EXPECT_THROW(trajectory_from_csv(header + "1,0,0,0,0\n", "index.csv"), IoError);
}

TEST(TimelineCsv, HeaderAndRows) {
    TrackTimeline tl;
    SlotRecord r;
    r.truth = {2e-6, 0.5, 1.0};
    r.tracked = {2.1e-6, 0.5 + kTwoPi, 1.0};
    r.reinit = true;
    tl.slots.push_back(r);
    const std::string csv = timeline_to_csv(tl);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "k,x_gt,y_gt,theta_gt,x_est,y_est,theta_est,alpha_gt,alpha_trk,aod_gt,aod_trk,aoa_gt,"
              "aoa_trk,reinit");
    const std::string row = csv.substr(csv.find('\n') + 1);
    EXPECT_EQ(row.back(), '\n');
    EXPECT_EQ(row.substr(row.size() - 2, 1), "1");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 13);
}

TEST(Commands, SimulateIsDeterministic) {
    const RunConfig cfg = small_config(12);
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    cmd_simulate(cfg, 5, a.string());
    cmd_simulate(cfg, 5, b.string());
    std::size_t scans = 0;
    for (const auto& e : fs::directory_iterator(a / "scans")) {
        ++scans;
        EXPECT_EQ(read_text_file(e.path().string()),
                  read_text_file((b / "scans" / e.path().filename()).string()));
    }
    EXPECT_EQ(scans, 12u);
    EXPECT_EQ(read_text_file((a / "ground_truth.csv").string()),
              read_text_file((b / "ground_truth.csv").string()));
    EXPECT_EQ(read_text_file((a / "manifest.json").string()),
              read_text_file((b / "manifest.json").string()));
    const std::string manifest = read_text_file((a / "manifest.json").string());
    EXPECT_NE(manifest.find(config_hash(cfg)), std::string::npos);
}

TEST(Commands, OdometryOnIdenticalScans) {
    const RunConfig cfg = small_config(2);
    const auto dir = scratch("odo_same");
    cmd_simulate(cfg, 3, dir.string());
    // Replace the second scan by a copy of the first.
    fs::copy_file(dir / "scans" / "000000.rscn", dir / "scans" / "000001.rscn",
                  fs::copy_options::overwrite_existing);
    const auto est = cmd_odometry((dir / "scans").string(), cfg, dir.string());
    ASSERT_EQ(est.size(), 2u);
    EXPECT_NEAR((est.poses[1].r - est.poses[0].r).norm(), 0.0, 1e-6);
    EXPECT_NEAR(est.poses[1].theta, est.poses[0].theta, 1e-8);
    EXPECT_TRUE(fs::exists(dir / "odometry.csv"));
}

TEST(Commands, OdometryNeedsTwoScans) {
    const RunConfig cfg = small_config(1);
    const auto dir = scratch("odo_one");
    cmd_simulate(cfg, 3, dir.string());
    EXPECT_THROW(cmd_odometry((dir / "scans").string(), cfg, dir.string()), IoError);
}

TEST(Commands, CorruptScanNamesFile) {
    const RunConfig cfg = small_config(3);
    const auto dir = scratch("odo_corrupt");
    cmd_simulate(cfg, 3, dir.string());
    write_text_file((dir / "scans" / "000001.rscn").string(), "RSCN garbage");
    try {
        cmd_odometry((dir / "scans").string(), cfg, dir.string());
        FAIL() << "no error";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("000001.rscn"), std::string::npos) << e.what();
    }
}

TEST(Commands, TrackExactPosesIsExact) {
    // Short enough that the true AoD moves less than the 7.5 degree threshold.
    RunConfig cfg = small_config(10);
    cfg.eval.pose_source = PoseSource::GtNoise;
    cfg.tracker.sigma_r = 0.0;
    cfg.tracker.sigma_theta = 0.0;
    cfg.channel.noise_power = 1e-30;
    const auto dir = scratch("track_exact");
    write_trajectory_csv((dir / "gt.csv").string(), simulate_trajectory(cfg));
    const auto rep = cmd_track((dir / "gt.csv").string(), std::nullopt, cfg, 1, dir.string());
    EXPECT_LT(rep.aod_rmse_deg, 1e-6);
    EXPECT_LT(rep.aoa_rmse_deg, 1e-6);
    EXPECT_LT(rep.gain_mag_rmse_pct, 1e-4);
    EXPECT_EQ(rep.reinit_count, 0u);
    EXPECT_TRUE(fs::exists(dir / "timeline.csv"));
    EXPECT_TRUE(fs::exists(dir / "tracking_report.json"));
}

TEST(Commands, TrackAodBeatsAoaWithYawNoise) {
    RunConfig cfg = small_config(400);
    cfg.eval.pose_source = PoseSource::GtNoise;
    const auto dir = scratch("track_noise");
    write_trajectory_csv((dir / "gt.csv").string(), simulate_trajectory(cfg));
    const auto rep = cmd_track((dir / "gt.csv").string(), std::nullopt, cfg, 8, dir.string());
    EXPECT_LT(rep.aod_rmse_deg, rep.aoa_rmse_deg);
}

TEST(Commands, TrackRejectsSlotMismatch) {
    RunConfig cfg = small_config(20);
    const auto dir = scratch("track_mismatch");
    write_trajectory_csv((dir / "gt.csv").string(), simulate_trajectory(cfg));
    cfg.synth.trajectory.slot_count = 10;
    write_trajectory_csv((dir / "est.csv").string(), simulate_trajectory(cfg));
    EXPECT_THROW(cmd_track((dir / "gt.csv").string(), (dir / "est.csv").string(), cfg, 1, dir.string()),
                 ConfigError);
    EXPECT_THROW(cmd_track((dir / "gt.csv").string(), std::nullopt, cfg, 1, dir.string()), ConfigError);
}

TEST(Commands, EvalIdentityAndShift) {
    RunConfig cfg = small_config(200);
    cfg.eval.kitti.lengths = {100.0};
    const auto dir = scratch("eval");
    const auto gt = simulate_trajectory(cfg);
    write_trajectory_csv((dir / "gt.csv").string(), gt);
    auto rep = cmd_eval((dir / "gt.csv").string(), (dir / "gt.csv").string(), cfg, dir.string());
    EXPECT_NEAR(rep.rmse_x, 0.0, 1e-12);
    EXPECT_NEAR(rep.kitti_trans_pct, 0.0, 1e-9);
    EXPECT_TRUE(fs::exists(dir / "pose_report.json"));
    // A shifted estimate is start-aligned back onto the truth.
    StampedTrajectory shifted = gt;
    for (auto& p : shifted.poses) p.r += Vec2(10.0, 0.0);
    write_trajectory_csv((dir / "est.csv").string(), shifted);
    rep = cmd_eval((dir / "est.csv").string(), (dir / "gt.csv").string(), cfg, dir.string());
    EXPECT_NEAR(rep.rmse_x, 0.0, 1e-9);
    EXPECT_NEAR(rep.rmse_y, 0.0, 1e-9);
}

TEST(Commands, SingleReplicateEqualsTrackRun) {
    RunConfig cfg = small_config(60);
    cfg.eval.pose_source = PoseSource::GtNoise;
    const auto dir = scratch("mc_one");
    write_trajectory_csv((dir / "gt.csv").string(), simulate_trajectory(cfg));
    const auto mc = cmd_mc(cfg, 42, 1, dir.string(), (dir / "gt.csv").string());
    const auto single = cmd_track((dir / "gt.csv").string(), std::nullopt, cfg, derive_seed(42, 0),
                                  (dir / "single").string());
    ASSERT_EQ(mc.replicates.size(), 1u);
    EXPECT_EQ(mc.replicates[0].aod_rmse_deg, single.aod_rmse_deg);
    EXPECT_EQ(mc.replicates[0].aoa_rmse_deg, single.aoa_rmse_deg);
    EXPECT_EQ(mc.replicates[0].gain_mag_rmse_pct, single.gain_mag_rmse_pct);
    EXPECT_EQ(mc.aod_rmse_deg.mean, single.aod_rmse_deg);
    EXPECT_EQ(mc.aod_rmse_deg.std, 0.0);
}

TEST(Commands, MonteCarloIndependentOfWorkerCount) {
    RunConfig cfg = small_config(60);
    cfg.eval.pose_source = PoseSource::GtNoise;
    const auto truth = simulate_trajectory(cfg).poses;
    cfg.eval.workers = 1;
    const auto a = monte_carlo(truth, nullptr, cfg, 9, 8);
    cfg.eval.workers = 3;
    const auto b = monte_carlo(truth, nullptr, cfg, 9, 8);
    EXPECT_EQ(mc_report_json(a), mc_report_json(b));
    EXPECT_EQ(a.seeds[3], derive_seed(9, 3));
}

TEST(Commands, MonteCarloMeansStable) {
    // Two disjoint replicate sets agree within 3 standard errors.
    RunConfig cfg = small_config(120);
    cfg.eval.pose_source = PoseSource::GtNoise;
    const auto truth = simulate_trajectory(cfg).poses;
    const auto a = monte_carlo(truth, nullptr, cfg, 100, 30);
    const auto b = monte_carlo(truth, nullptr, cfg, 200, 30);
    const double se = std::sqrt((a.aoa_rmse_deg.std * a.aoa_rmse_deg.std +
                                 b.aoa_rmse_deg.std * b.aoa_rmse_deg.std) / 30.0);
    EXPECT_LE(std::abs(a.aoa_rmse_deg.mean - b.aoa_rmse_deg.mean), 3.0 * se + 1e-12);
}

TEST(Commands, RunIsDeterministic) {
    const RunConfig cfg = small_config(30);
    const auto a = scratch("run_a");
    const auto b = scratch("run_b");
    cmd_run(cfg, 4, a.string());
    cmd_run(cfg, 4, b.string());
    for (const char* f : {"ground_truth.csv", "odometry.csv", "timeline.csv", "tracking_report.json",
                          "pose_report.json", "drift_report.json", "manifest.json"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(read_text_file((a / f).string()), read_text_file((b / f).string())) << f;
    }
}
