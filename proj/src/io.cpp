#include "spebt/io.hpp"

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spebt/error.hpp"

namespace spebt {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, bool& ok) {
    const std::string f = trim(field);
    if (f.empty()) {
        ok = false;
        return 0.0;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(f.c_str(), &end);
    ok = end == f.c_str() + f.size() && errno == 0 && std::isfinite(v);
    return v;
}

std::uint64_t parse_u64(const std::string& field, bool& ok) {
    const std::string f = trim(field);
    std::uint64_t v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    ok = !f.empty() && res.ec == std::errc() && res.ptr == f.data() + f.size();
    return v;
}

}  // namespace

std::string trajectory_to_csv(const StampedTrajectory& traj) {
    if (traj.t_ns.size() != traj.poses.size()) {
        throw std::invalid_argument("trajectory_to_csv: timestamp and pose counts differ");
    }
    std::string out = kTrajectoryHeader;
    out += '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Pose2& p = traj.poses[k];
        out += std::to_string(k) + ',' + std::to_string(traj.t_ns[k]) + ',' + format_double(p.x()) + ',' +
               format_double(p.y()) + ',' + format_double(p.theta) + '\n';
    }
    return out;
}

StampedTrajectory trajectory_from_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& what) {
        throw IoError(source + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!std::getline(in, line)) {
        line_no = 1;
        fail("empty file, expected header '" + std::string(kTrajectoryHeader) + "'");
    }
    ++line_no;
    if (trim(line) != kTrajectoryHeader) {
        fail("bad header, expected '" + std::string(kTrajectoryHeader) + "'");
    }
    StampedTrajectory traj;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) fail("expected 5 fields, got " + std::to_string(f.size()));
        bool ok = true;
        const std::uint64_t k = parse_u64(f[0], ok);
        if (!ok || k != traj.size()) fail("slot index must be " + std::to_string(traj.size()));
        const std::uint64_t t = parse_u64(f[1], ok);
        if (!ok) fail("bad t_ns '" + f[1] + "'");
        double v[3];
        for (int i = 0; i < 3; ++i) {
            v[i] = parse_double(f[2 + i], ok);
            if (!ok) fail("bad number '" + f[2 + i] + "'");
        }
        traj.t_ns.push_back(t);
        traj.poses.emplace_back(Vec2(v[0], v[1]), v[2]);
    }
    return traj;
}

void write_trajectory_csv(const std::string& path, const StampedTrajectory& traj) {
    write_text_file(path, trajectory_to_csv(traj));
}

StampedTrajectory read_trajectory_csv(const std::string& path) {
    return trajectory_from_csv(read_text_file(path), path);
}

std::string timeline_to_csv(const TrackTimeline& timeline) {
    std::string out = kTimelineHeader;
    out += '\n';
    for (const auto& s : timeline.slots) {
        const double fields[] = {s.true_pose.x(), s.true_pose.y(), s.true_pose.theta,
                                 s.est_pose.x(),  s.est_pose.y(),  s.est_pose.theta,
                                 s.truth.alpha_mag, s.tracked.alpha_mag,
                                 wrap_angle(s.truth.aod), wrap_angle(s.tracked.aod),
                                 wrap_angle(s.truth.aoa), wrap_angle(s.tracked.aoa)};
        out += std::to_string(s.k);
        for (double v : fields) {
            out += ',';
            out += format_double(v);
        }
        out += s.reinit ? ",1\n" : ",0\n";
    }
    return out;
}

void write_timeline_csv(const std::string& path, const TrackTimeline& timeline) {
    write_text_file(path, timeline_to_csv(timeline));
}

std::string pose_report_json(const PoseErrorReport& r) {
    nlohmann::ordered_json j;
    j["rmse_xy"] = {r.rmse_x, r.rmse_y};
    j["rmse_yaw"] = r.rmse_yaw_deg;
    j["kitti_trans_pct"] = r.kitti_trans_pct;
    j["kitti_rot_deg_per_m"] = r.kitti_rot_deg_per_m;
    j["kitti_segments"] = r.kitti_segments;
    return j.dump(2) + "\n";
}

std::string tracking_report_json(const TrackingErrorReport& r) {
    nlohmann::ordered_json j;
    j["gain_mag_rmse_pct"] = r.gain_mag_rmse_pct;
    j["aod_rmse_deg"] = r.aod_rmse_deg;
    j["aoa_rmse_deg"] = r.aoa_rmse_deg;
    j["reinit_fraction_pct"] = r.reinit_fraction_pct;
    j["slot_count"] = r.slot_count;
    j["reinit_count"] = r.reinit_count;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec || !fs::is_directory(path)) {
        throw IoError("cannot create directory '" + path + "': " + ec.message());
    }
}

}  // namespace spebt
