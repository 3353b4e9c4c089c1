#include "spebt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <set>
#include <sstream>

#include "spebt/error.hpp"

namespace spebt {

using nlohmann::json;

std::string to_string(PoseSource source) {
    switch (source) {
        case PoseSource::Odometry: return "odometry";
        case PoseSource::GtNoise: return "gt-noise";
        case PoseSource::Gt: return "gt";
    }
    return "odometry";
}

PoseSource pose_source_from_string(const std::string& name) {
    if (name == "odometry") return PoseSource::Odometry;
    if (name == "gt-noise") return PoseSource::GtNoise;
    if (name == "gt") return PoseSource::Gt;
    throw ConfigError("unknown pose source '" + name + "' (expected odometry, gt-noise or gt)");
}

namespace {

// Reads known keys from one JSON object and rejects the rest.
class Section {
public:
    Section(const json& parent, const std::string& key, std::string path)
        : path_(std::move(path)) {
        const auto it = parent.find(key);
        if (it == parent.end()) {
            return;
        }
        if (!it->is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
        obj_ = &*it;
    }
    ~Section() = default;

    template <typename T>
    void get(const char* key, T& out) {
        known_.insert(key);
        if (!obj_) return;
        const auto it = obj_->find(key);
        if (it == obj_->end()) return;
        try {
            if constexpr (std::is_unsigned_v<T> && std::is_integral_v<T>) {
                if (!it->is_number_unsigned()) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError("");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError("");
            }
            out = it->get<T>();
        } catch (const std::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong type");
        }
    }

    void degrees(const char* key, double& radians) {
        double deg = rad2deg(radians);
        const double before = deg;
        get(key, deg);
        if (deg != before) radians = deg2rad(deg);
    }

    void vec2(const char* key, Vec2& out) {
        std::vector<double> v{out.x(), out.y()};
        get(key, v);
        if (v.size() != 2) throw ConfigError(path_ + "." + key + ": expected [x, y]");
        out = Vec2(v[0], v[1]);
    }

    const json* child(const char* key) {
        known_.insert(key);
        return obj_;
    }

    void finish() const {
        if (!obj_) return;
        for (const auto& [key, value] : obj_->items()) {
            if (!known_.count(key)) {
                throw ConfigError(path_ + ": unknown key '" + key + "'");
            }
        }
    }

    const std::string& path() const { return path_; }

private:
    const json* obj_ = nullptr;
    std::string path_;
    std::set<std::string> known_;
};

void read_odometry(const json& root, OdometryConfig& c) {
    Section s(root, "odometry", "odometry");
    s.get("k_strongest", c.k_strongest);
    s.get("kappa_min", c.kappa_min);
    s.get("d_D", c.d_D);
    s.get("f_D", c.f_D);
    s.degrees("theta_tol_deg", c.theta_tol);
    s.get("huber_delta", c.huber_delta);
    s.get("range_min", c.range_min);
    s.get("range_max", c.range_max);
    s.get("min_neighbors", c.min_neighbors);
    s.get("min_correspondences", c.min_correspondences);
    s.get("max_outer_iterations", c.max_outer_iterations);
    s.get("outer_tolerance", c.outer_tolerance);
    s.finish();
}

void read_channel(const json& root, ChannelConfig& c) {
    Section s(root, "channel", "channel");
    s.get("n_tx", c.n_tx);
    s.get("n_rx", c.n_rx);
    s.get("wavelength", c.wavelength);
    s.get("spacing", c.spacing);
    s.get("carrier_hz", c.carrier_hz);
    s.get("path_loss_exponent", c.path_loss_exponent);
    Vec2 a(c.alpha_ref.real(), c.alpha_ref.imag());
    s.vec2("alpha_ref", a);
    c.alpha_ref = cdouble(a.x(), a.y());
    s.get("d0", c.d0);
    double dbm = watts_to_dbm(c.noise_power);
    const double before = dbm;
    s.get("noise_power_dbm", dbm);
    if (dbm != before) c.noise_power = dbm_to_watts(dbm);
    s.vec2("bs_position", c.bs_position);
    s.finish();
}

void read_tracker(const json& root, TrackerConfig& c) {
    Section s(root, "tracker", "tracker");
    s.get("sigma_r", c.sigma_r);
    s.degrees("sigma_theta_deg", c.sigma_theta);
    s.get("alpha_tilde", c.alpha_tilde);
    s.degrees("phi_tilde_deg", c.phi_tilde);
    s.degrees("psi_tilde_deg", c.psi_tilde);
    std::string mode = to_string(c.innovation);
    s.get("innovation", mode);
    try {
        c.innovation = innovation_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("tracker.innovation: ") + e.what());
    }
    s.finish();
}

void read_synth(const json& root, SynthConfig& c) {
    Section s(root, "synth", "synth");
    s.get("seed", c.seed);
    if (const json* obj = s.child("trajectory")) {
        Section t(*obj, "trajectory", "synth.trajectory");
        auto& tr = c.trajectory;
        std::string preset = to_string(tr.preset);
        t.get("preset", preset);
        try {
            tr.preset = trajectory_preset_from_string(preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("synth.trajectory.preset: ") + e.what());
        }
        t.get("slot_count", tr.slot_count);
        t.get("slot_period", tr.slot_period);
        t.get("speed", tr.speed);
        t.get("arc_radius", tr.arc_radius);
        t.get("loop_width", tr.loop_width);
        t.get("loop_height", tr.loop_height);
        t.get("corner_radius", tr.corner_radius);
        Vec2 start = tr.start.r;
        t.vec2("start_position", start);
        double yaw = tr.start.theta;
        t.degrees("start_yaw_deg", yaw);
        tr.start = Pose2(start, yaw);
        t.finish();
    }
    if (const json* obj = s.child("world")) {
        Section w(*obj, "world", "synth.world");
        w.get("margin", c.world_margin);
        w.get("building_density", c.world.building_density);
        w.get("point_density", c.world.point_density);
        w.get("building_size_min", c.world.building_size_min);
        w.get("building_size_max", c.world.building_size_max);
        w.get("reflectivity_min", c.world.reflectivity_min);
        w.get("reflectivity_max", c.world.reflectivity_max);
        w.get("clearance", c.world.clearance);
        w.finish();
    }
    if (const json* obj = s.child("radar")) {
        Section r(*obj, "radar", "synth.radar");
        auto& rc = c.radar;
        r.get("azimuth_count", rc.azimuth_count);
        r.get("range_bin_count", rc.range_bin_count);
        r.get("range_resolution", rc.range_resolution);
        r.get("range_min", rc.range_min);
        r.get("range_max", rc.range_max);
        r.get("pulse_sigma_bins", rc.pulse_sigma_bins);
        r.get("segment_step", rc.segment_step);
        r.get("noise_mean", rc.noise_mean);
        r.get("speckle_rate", rc.speckle_rate);
        r.get("speckle_max", rc.speckle_max);
        r.finish();
    }
    s.finish();
}

void read_eval(const json& root, EvalConfig& c) {
    Section s(root, "eval", "eval");
    s.get("kitti_lengths", c.kitti.lengths);
    s.get("kitti_stride", c.kitti.stride);
    s.get("replicates", c.replicates);
    s.get("workers", c.workers);
    s.get("drift_windows", c.drift_windows);
    std::string source = to_string(c.pose_source);
    s.get("pose_source", source);
    c.pose_source = pose_source_from_string(source);
    s.finish();
}

// Degrees for output, rounded to 12 significant digits so that 7.5 prints as 7.5.
double out_deg(double radians) {
    const double deg = rad2deg(radians);
    if (deg == 0.0 || !std::isfinite(deg)) return deg;
    const double scale = std::pow(10.0, 11 - std::floor(std::log10(std::abs(deg))));
    return std::round(deg * scale) / scale;
}

json to_json(const RunConfig& cfg) {
    json j;
    const auto& o = cfg.odometry;
    j["odometry"] = {{"k_strongest", o.k_strongest},
                     {"kappa_min", o.kappa_min},
                     {"d_D", o.d_D},
                     {"f_D", o.f_D},
                     {"theta_tol_deg", out_deg(o.theta_tol)},
                     {"huber_delta", o.huber_delta},
                     {"range_min", o.range_min},
                     {"range_max", o.range_max},
                     {"min_neighbors", o.min_neighbors},
                     {"min_correspondences", o.min_correspondences},
                     {"max_outer_iterations", o.max_outer_iterations},
                     {"outer_tolerance", o.outer_tolerance}};
    const auto& c = cfg.channel;
    j["channel"] = {{"n_tx", c.n_tx},
                    {"n_rx", c.n_rx},
                    {"wavelength", c.wavelength},
                    {"spacing", c.spacing},
                    {"carrier_hz", c.carrier_hz},
                    {"path_loss_exponent", c.path_loss_exponent},
                    {"alpha_ref", {c.alpha_ref.real(), c.alpha_ref.imag()}},
                    {"d0", c.d0},
                    {"noise_power_dbm", watts_to_dbm(c.noise_power)},
                    {"bs_position", {c.bs_position.x(), c.bs_position.y()}}};
    const auto& t = cfg.tracker;
    j["tracker"] = {{"sigma_r", t.sigma_r},
                    {"sigma_theta_deg", out_deg(t.sigma_theta)},
                    {"alpha_tilde", t.alpha_tilde},
                    {"phi_tilde_deg", out_deg(t.phi_tilde)},
                    {"psi_tilde_deg", out_deg(t.psi_tilde)},
                    {"innovation", to_string(t.innovation)}};
    const auto& s = cfg.synth;
    const auto& tr = s.trajectory;
    const auto& w = s.world;
    const auto& r = s.radar;
    j["synth"] = {{"seed", s.seed},
                  {"trajectory",
                   {{"preset", to_string(tr.preset)},
                    {"slot_count", tr.slot_count},
                    {"slot_period", tr.slot_period},
                    {"speed", tr.speed},
                    {"arc_radius", tr.arc_radius},
                    {"loop_width", tr.loop_width},
                    {"loop_height", tr.loop_height},
                    {"corner_radius", tr.corner_radius},
                    {"start_position", {tr.start.x(), tr.start.y()}},
                    {"start_yaw_deg", out_deg(tr.start.theta)}}},
                  {"world",
                   {{"margin", s.world_margin},
                    {"building_density", w.building_density},
                    {"point_density", w.point_density},
                    {"building_size_min", w.building_size_min},
                    {"building_size_max", w.building_size_max},
                    {"reflectivity_min", w.reflectivity_min},
                    {"reflectivity_max", w.reflectivity_max},
                    {"clearance", w.clearance}}},
                  {"radar",
                   {{"azimuth_count", r.azimuth_count},
                    {"range_bin_count", r.range_bin_count},
                    {"range_resolution", r.range_resolution},
                    {"range_min", r.range_min},
                    {"range_max", r.range_max},
                    {"pulse_sigma_bins", r.pulse_sigma_bins},
                    {"segment_step", r.segment_step},
                    {"noise_mean", r.noise_mean},
                    {"speckle_rate", r.speckle_rate},
                    {"speckle_max", r.speckle_max}}}};
    const auto& e = cfg.eval;
    j["eval"] = {{"kitti_lengths", e.kitti.lengths},
                 {"kitti_stride", e.kitti.stride},
                 {"replicates", e.replicates},
                 {"workers", e.workers},
                 {"drift_windows", e.drift_windows},
                 {"pose_source", to_string(e.pose_source)}};
    return j;
}

}  // namespace

void RunConfig::validate() const {
    try {
        odometry.validate();
        channel.validate();
        tracker.validate();
        synth.trajectory.validate();
        synth.radar.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto& w = synth.world;
    if (w.building_density < 0.0 || w.point_density < 0.0)
        throw ConfigError("synth.world: densities must be non-negative");
    if (!(w.building_size_min > 0.0) || w.building_size_min > w.building_size_max)
        throw ConfigError("synth.world: need 0 < building_size_min <= building_size_max");
    if (w.reflectivity_min < 1.0 || w.reflectivity_max > 255.0 || w.reflectivity_min > w.reflectivity_max)
        throw ConfigError("synth.world: reflectivities must lie in [1, 255]");
    if (w.clearance < 0.0 || synth.world_margin < 0.0)
        throw ConfigError("synth.world: margin and clearance must be non-negative");
    if (eval.kitti.lengths.empty() || eval.kitti.stride == 0)
        throw ConfigError("eval: kitti_lengths must be non-empty and kitti_stride >= 1");
    for (double len : eval.kitti.lengths) {
        if (!(len > 0.0)) throw ConfigError("eval.kitti_lengths: lengths must be positive");
    }
    if (eval.replicates == 0) throw ConfigError("eval.replicates must be >= 1");
    if (eval.drift_windows == 0) throw ConfigError("eval.drift_windows must be >= 1");
}

RunConfig config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> sections{"odometry", "channel", "tracker", "synth", "eval"};
    for (const auto& [key, value] : root.items()) {
        if (!sections.count(key)) throw ConfigError("unknown config section '" + key + "'");
    }
    RunConfig cfg;
    read_odometry(root, cfg.odometry);
    read_channel(root, cfg.channel);
    read_tracker(root, cfg.tracker);
    read_synth(root, cfg.synth);
    read_eval(root, cfg.eval);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return config_from_json(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace spebt
