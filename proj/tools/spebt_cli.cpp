// spebt command-line driver.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "spebt/commands.hpp"
#include "spebt/config.hpp"
#include "spebt/error.hpp"
#include "spebt/log.hpp"

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string pose_source;
    std::string innovation;
    std::optional<std::size_t> replicates;
    bool quiet = false;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON configuration file");
    cmd->add_option("--seed", c.seed, "master seed (overrides synth.seed)");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--pose-source", c.pose_source, "pose estimates fed to the tracker")
        ->check(CLI::IsMember({"odometry", "gt-noise", "gt"}));
    cmd->add_option("--innovation", c.innovation, "EKF innovation form")
        ->check(CLI::IsMember({"ekf", "paper-literal"}));
    cmd->add_option("--replicates", c.replicates, "Monte Carlo replicates (overrides eval.replicates)");
    cmd->add_flag("-q,--quiet", c.quiet, "only report errors");
    cmd->add_flag("-v,--verbose", c.verbose, "debug logging");
}

spebt::RunConfig resolve(const Common& c, std::uint64_t& seed) {
    spebt::RunConfig cfg = c.config_path.empty() ? spebt::RunConfig{} : spebt::load_config(c.config_path);
    if (!c.pose_source.empty()) cfg.eval.pose_source = spebt::pose_source_from_string(c.pose_source);
    if (!c.innovation.empty()) cfg.tracker.innovation = spebt::innovation_mode_from_string(c.innovation);
    if (c.replicates) cfg.eval.replicates = *c.replicates;
    if (c.seed) cfg.synth.seed = *c.seed;
    cfg.validate();
    seed = cfg.synth.seed;
    if (c.quiet) spebt::set_log_level(spebt::LogLevel::Quiet);
    if (c.verbose) spebt::set_log_level(spebt::LogLevel::Debug);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pose-estimation-based beam tracking: synthetic radar odometry and EKF beam tracking"};
    app.require_subcommand(1);
    Common c;

    auto* sim = app.add_subcommand("simulate", "render a synthetic scan sequence and its ground truth");
    add_common(sim, c);

    std::string scan_dir;
    auto* odo = app.add_subcommand("odometry", "estimate the trajectory from a directory of RSCN scans");
    add_common(odo, c);
    odo->add_option("--scans", scan_dir, "scan directory")->required();

    std::string gt_csv;
    std::optional<std::string> est_csv;
    auto* trk = app.add_subcommand("track", "run the beam tracker along a trajectory");
    add_common(trk, c);
    trk->add_option("--gt", gt_csv, "ground-truth trajectory CSV")->required();
    trk->add_option("--est", est_csv, "estimated trajectory CSV (odometry pose source)");

    std::string eval_est;
    std::string eval_gt;
    auto* ev = app.add_subcommand("eval", "pose error report for an estimated trajectory");
    add_common(ev, c);
    ev->add_option("--est", eval_est, "estimated trajectory CSV")->required();
    ev->add_option("--gt", eval_gt, "ground-truth trajectory CSV")->required();

    std::optional<std::string> mc_gt;
    std::optional<std::string> mc_est;
    auto* mc = app.add_subcommand("mc", "Monte Carlo tracking replicates");
    add_common(mc, c);
    mc->add_option("--gt", mc_gt, "ground-truth trajectory CSV (default: generated from the config)");
    mc->add_option("--est", mc_est, "estimated trajectory CSV (odometry pose source)");

    bool write_scans = false;
    auto* run = app.add_subcommand("run", "simulate, odometry, track and eval in one go");
    add_common(run, c);
    run->add_flag("--write-scans", write_scans, "also write the rendered scans to OUT/scans");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        std::uint64_t seed = 0;
        const spebt::RunConfig cfg = resolve(c, seed);
        if (*sim) {
            spebt::cmd_simulate(cfg, seed, c.out);
        } else if (*odo) {
            spebt::cmd_odometry(scan_dir, cfg, c.out);
        } else if (*trk) {
            const auto r = spebt::cmd_track(gt_csv, est_csv, cfg, seed, c.out);
            std::printf("gain %.3f%%  aod %.3f deg  aoa %.3f deg  reinit %.2f%%\n", r.gain_mag_rmse_pct,
                        r.aod_rmse_deg, r.aoa_rmse_deg, r.reinit_fraction_pct);
        } else if (*ev) {
            const auto r = spebt::cmd_eval(eval_est, eval_gt, cfg, c.out);
            std::printf("rmse (%.3f, %.3f) m  yaw %.3f deg  kitti %.3f%%  %.5f deg/m\n", r.rmse_x, r.rmse_y,
                        r.rmse_yaw_deg, r.kitti_trans_pct, r.kitti_rot_deg_per_m);
        } else if (*mc) {
            const auto r = spebt::cmd_mc(cfg, seed, cfg.eval.replicates, c.out, mc_gt, mc_est);
            std::printf("%zu replicates: aod %.3f +- %.3f deg  aoa %.3f +- %.3f deg  reinit %.2f +- %.2f%%\n",
                        r.replicates.size(), r.aod_rmse_deg.mean, r.aod_rmse_deg.std, r.aoa_rmse_deg.mean,
                        r.aoa_rmse_deg.std, r.reinit_fraction_pct.mean, r.reinit_fraction_pct.std);
        } else if (*run) {
            const auto r = spebt::cmd_run(cfg, seed, c.out, write_scans);
            std::printf("odometry: rmse (%.3f, %.3f) m  kitti %.3f%%\n", r.pose.rmse_x, r.pose.rmse_y,
                        r.pose.kitti_trans_pct);
            std::printf("tracking: aod %.3f deg  aoa %.3f deg  reinit %.2f%%\n", r.tracking.aod_rmse_deg,
                        r.tracking.aoa_rmse_deg, r.tracking.reinit_fraction_pct);
        }
    } catch (const spebt::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const spebt::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const spebt::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
