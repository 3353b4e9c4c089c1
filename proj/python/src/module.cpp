#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "spebt/commands.hpp"
#include "spebt/config.hpp"
#include "spebt/error.hpp"
#include "spebt/eval.hpp"
#include "spebt/log.hpp"

namespace py = pybind11;
using namespace spebt;

namespace {

using PoseArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Pose2> to_poses(const PoseArray& a) {
    if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("poses must have shape (n, 3)");
    const auto v = a.unchecked<2>();
    std::vector<Pose2> out;
    out.reserve(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out.emplace_back(v(i, 0), v(i, 1), v(i, 2));
    return out;
}

PoseArray from_poses(const std::vector<Pose2>& poses) {
    PoseArray a({static_cast<py::ssize_t>(poses.size()), py::ssize_t{3}});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const auto k = static_cast<py::ssize_t>(i);
        v(k, 0) = poses[i].x();
        v(k, 1) = poses[i].y();
        v(k, 2) = poses[i].theta;
    }
    return a;
}

RunConfig parse(const std::optional<std::string>& config_json) {
    RunConfig cfg = config_json ? config_from_json(*config_json) : RunConfig{};
    cfg.validate();
    return cfg;
}

py::dict pose_dict(const PoseErrorReport& r) {
    py::dict d;
    d["rmse_x"] = r.rmse_x;
    d["rmse_y"] = r.rmse_y;
    d["rmse_yaw_deg"] = r.rmse_yaw_deg;
    d["kitti_trans_pct"] = r.kitti_trans_pct;
    d["kitti_rot_deg_per_m"] = r.kitti_rot_deg_per_m;
    d["kitti_segments"] = r.kitti_segments;
    return d;
}

py::dict tracking_dict(const TrackingErrorReport& r) {
    py::dict d;
    d["gain_mag_rmse_pct"] = r.gain_mag_rmse_pct;
    d["aod_rmse_deg"] = r.aod_rmse_deg;
    d["aoa_rmse_deg"] = r.aoa_rmse_deg;
    d["reinit_fraction_pct"] = r.reinit_fraction_pct;
    d["slot_count"] = r.slot_count;
    d["reinit_count"] = r.reinit_count;
    return d;
}

}  // namespace

PYBIND11_MODULE(_spebt, m) {
    m.doc() = "Radar odometry and beam tracking";
    set_log_level(LogLevel::Quiet);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("default_config", [] { return config_to_json(RunConfig{}); },
          "Default configuration as a JSON string.");
    m.def("config_hash", [](const std::optional<std::string>& c) { return config_hash(parse(c)); },
          py::arg("config_json") = py::none());

    m.def("simulate_trajectory",
          [](const std::optional<std::string>& c) { return from_poses(simulate_trajectory(parse(c)).poses); },
          py::arg("config_json") = py::none(), "Ground-truth poses as an (n, 3) array of x, y, theta.");

    m.def("evaluate_poses",
          [](const PoseArray& est, const PoseArray& gt) {
              const auto e = to_poses(est), g = to_poses(gt);
              if (e.size() != g.size()) throw py::value_error("est and gt lengths differ");
              return pose_dict(evaluate_poses(e, g));
          },
          py::arg("est"), py::arg("gt"), "Start-aligned RMSE and KITTI relative errors.");

    m.def("track",
          [](const PoseArray& gt, const PoseArray& est, std::uint64_t seed, const std::optional<std::string>& c) {
              const auto g = to_poses(gt), e = to_poses(est);
              if (e.size() != g.size()) throw py::value_error("est and gt lengths differ");
              const RunConfig cfg = parse(c);
              TrackingErrorReport r;
              {
                  py::gil_scoped_release release;
                  r = tracking_rmse(track_poses(g, e, cfg, seed));
              }
              return tracking_dict(r);
          },
          py::arg("gt"), py::arg("est"), py::arg("seed") = 1, py::arg("config_json") = py::none());

    m.def("monte_carlo",
          [](std::uint64_t seed, std::size_t replicates, const std::optional<std::string>& c) {
              const RunConfig cfg = parse(c);
              const auto truth = simulate_trajectory(cfg).poses;
              McReport r;
              {
                  py::gil_scoped_release release;
                  r = monte_carlo(truth, nullptr, cfg, seed, replicates);
              }
              py::dict d;
              d["seeds"] = r.seeds;
              py::list reps;
              for (const auto& t : r.replicates) reps.append(tracking_dict(t));
              d["replicates"] = reps;
              d["aod_below_aoa_all"] = r.aod_below_aoa_all;
              return d;
          },
          py::arg("seed"), py::arg("replicates"), py::arg("config_json") = py::none(),
          "Monte Carlo over tracker noise with gt-noise or gt pose sources.");

    m.def("run",
          [](const std::string& out_dir, std::uint64_t seed, const std::optional<std::string>& c, bool write_scans) {
              const RunConfig cfg = parse(c);
              RunSummary s;
              {
                  py::gil_scoped_release release;
                  s = cmd_run(cfg, seed, out_dir, write_scans);
              }
              py::dict d;
              d["pose"] = pose_dict(s.pose);
              d["tracking"] = tracking_dict(s.tracking);
              d["drift_windows"] = s.drift_windows;
              d["final_position_error"] = s.final_position_error;
              d["odometry_fallbacks"] = s.odometry_fallbacks;
              return d;
          },
          py::arg("out_dir"), py::arg("seed") = 1, py::arg("config_json") = py::none(),
          py::arg("write_scans") = false, "Full simulate, odometry, track and eval pipeline.");
}
