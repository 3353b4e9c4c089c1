#include "spebt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "spebt/spatial_hash.hpp"

namespace spebt {

// ---------------------------------------------------------------- world

namespace {

std::vector<Vec2> densify(const std::vector<Vec2>& polyline, double step) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec2 a = polyline[i];
        const Vec2 b = polyline[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
        for (int j = 0; j < n; ++j) {
            out.push_back(a + (b - a) * (static_cast<double>(j) / n));
        }
    }
    if (!polyline.empty()) {
        out.push_back(polyline.back());
    }
    return out;
}

class Clearance {
public:
    Clearance(const std::vector<Vec2>& road, double radius)
        : samples_(densify(road, std::max(0.5, radius / 4.0))), radius_(radius) {
        if (!samples_.empty() && radius > 0.0) {
            grid_ = std::make_unique<SpatialHash>(samples_, radius);
        }
    }

    bool blocked(const Vec2& p, double radius) const {
        if (!grid_) {
            return false;
        }
        bool hit = false;
        grid_->for_each_within(p, std::min(radius, radius_), [&](std::uint32_t) { hit = true; });
        return hit;
    }

private:
    std::vector<Vec2> samples_;
    double radius_;
    std::unique_ptr<SpatialHash> grid_;
};

}  // namespace

LandmarkMap generate_world(const WorldSpec& spec, Rng& rng) {
    if (!(spec.max.x() > spec.min.x()) || !(spec.max.y() > spec.min.y())) {
        throw std::invalid_argument("generate_world: empty bounding box");
    }
    if (spec.building_density < 0.0 || spec.point_density < 0.0) {
        throw std::invalid_argument("generate_world: densities must be non-negative");
    }
    if (spec.reflectivity_min < 1.0 || spec.reflectivity_max > 255.0 ||
        spec.reflectivity_min > spec.reflectivity_max) {
        throw std::invalid_argument("generate_world: reflectivity range must lie in [1, 255]");
    }
    const double hectares = (spec.max - spec.min).prod() / 1e4;
    const auto n_buildings = static_cast<std::size_t>(std::llround(spec.building_density * hectares));
    const auto n_points = static_cast<std::size_t>(std::llround(spec.point_density * hectares));
    const Clearance road(spec.keep_clear, spec.clearance);

    LandmarkMap map;
    for (std::size_t i = 0; i < n_buildings; ++i) {
        const Vec2 c(rng.uniform(spec.min.x(), spec.max.x()), rng.uniform(spec.min.y(), spec.max.y()));
        const double w = rng.uniform(spec.building_size_min, spec.building_size_max);
        const double h = rng.uniform(spec.building_size_min, spec.building_size_max);
        const double yaw = rng.uniform(-kPi, kPi);
        const double refl = rng.uniform(spec.reflectivity_min, spec.reflectivity_max);
        const Mat2 R = rotation_from_yaw(yaw);
        const Vec2 corners[4] = {c + R * Vec2(-w / 2, -h / 2), c + R * Vec2(w / 2, -h / 2),
                                 c + R * Vec2(w / 2, h / 2), c + R * Vec2(-w / 2, h / 2)};
        bool clear = true;
        for (int s = 0; s < 4 && clear; ++s) {
            const Vec2 a = corners[s];
            const Vec2 b = corners[(s + 1) % 4];
            for (const Vec2& p : densify({a, b}, 2.0)) {
                if (road.blocked(p, spec.clearance)) {
                    clear = false;
                    break;
                }
            }
        }
        if (!clear) {
            continue;
        }
        for (int s = 0; s < 4; ++s) {
            map.segments.push_back({corners[s], corners[(s + 1) % 4], refl});
        }
    }
    for (std::size_t i = 0; i < n_points; ++i) {
        const Vec2 p(rng.uniform(spec.min.x(), spec.max.x()), rng.uniform(spec.min.y(), spec.max.y()));
        const double refl = rng.uniform(spec.reflectivity_min, spec.reflectivity_max);
        if (road.blocked(p, spec.clearance / 2.0)) {
            continue;
        }
        map.points.push_back({p, refl});
    }
    return map;
}

WorldSpec world_around(const std::vector<Pose2>& trajectory, double margin) {
    WorldSpec spec;
    if (trajectory.empty()) {
        return spec;
    }
    Vec2 lo = trajectory.front().r;
    Vec2 hi = lo;
    spec.keep_clear.reserve(trajectory.size());
    for (const auto& p : trajectory) {
        lo = lo.cwiseMin(p.r);
        hi = hi.cwiseMax(p.r);
        spec.keep_clear.push_back(p.r);
    }
    spec.min = lo - Vec2::Constant(margin);
    spec.max = hi + Vec2::Constant(margin);
    return spec;
}

// ---------------------------------------------------------------- trajectory

std::string to_string(TrajectoryPreset preset) {
    switch (preset) {
        case TrajectoryPreset::UrbanLoop: return "urban_loop";
        case TrajectoryPreset::Straight: return "straight";
        case TrajectoryPreset::Arc: return "arc";
    }
    return "urban_loop";
}

TrajectoryPreset trajectory_preset_from_string(const std::string& name) {
    if (name == "urban_loop") return TrajectoryPreset::UrbanLoop;
    if (name == "straight") return TrajectoryPreset::Straight;
    if (name == "arc") return TrajectoryPreset::Arc;
    throw std::invalid_argument("unknown trajectory preset '" + name + "'");
}

void TrajectorySpec::validate() const {
    if (slot_count == 0) throw std::invalid_argument("trajectory: slot_count must be >= 1");
    if (!(slot_period > 0.0)) throw std::invalid_argument("trajectory: slot_period must be positive");
    if (preset == TrajectoryPreset::UrbanLoop) {
        if (!(corner_radius > 0.0) || !(loop_width > 4.0 * corner_radius) ||
            !(loop_height > 4.0 * corner_radius)) {
            throw std::invalid_argument("trajectory: loop must be larger than its rounded corners");
        }
        if (urban_loop_length(*this) / static_cast<double>(slot_count) >= 5.0) {
            throw std::invalid_argument("trajectory: loop too long for slot_count (step >= 5 m)");
        }
        return;
    }
    if (!(speed > 0.0)) throw std::invalid_argument("trajectory: speed must be positive");
    if (speed * slot_period >= 5.0) throw std::invalid_argument("trajectory: step must be < 5 m/slot");
    if (preset == TrajectoryPreset::Arc && !(arc_radius > 0.0)) {
        throw std::invalid_argument("trajectory: arc radius must be positive");
    }
}

namespace {

// Constant-curvature piece of a path.
struct PathPiece {
    double length;
    double curvature;  // 1/m, positive turns left
};

Pose2 advance(const Pose2& p, double s, double curvature) {
    if (std::abs(curvature) < 1e-15) {
        return {p.r + s * Vec2(std::cos(p.theta), std::sin(p.theta)), p.theta};
    }
    const double radius = 1.0 / curvature;
    const double dth = s * curvature;
    const Vec2 d(radius * (std::sin(p.theta + dth) - std::sin(p.theta)),
                 -radius * (std::cos(p.theta + dth) - std::cos(p.theta)));
    return {p.r + d, p.theta + dth};
}

// Rounded rectangle with a chicane on the bottom and top sides, counter-clockwise
// from the start of the bottom side.
std::vector<PathPiece> urban_loop_pieces(const TrajectorySpec& spec) {
    const double R = spec.corner_radius;
    const double chicane_radius = 150.0;
    const double chicane_angle = deg2rad(30.0);
    const double chicane_extent = 4.0 * chicane_radius * std::sin(chicane_angle);
    const double chicane_arc = chicane_radius * chicane_angle;
    const double kappa = 1.0 / chicane_radius;
    const double corner = kPi / 2.0 * R;

    const double bottom = spec.loop_width - 2.0 * R;
    const double side = spec.loop_height - 2.0 * R;

    std::vector<PathPiece> pieces;
    auto chicane_side = [&](double total, double lead) {
        if (total < chicane_extent + 2.0 * lead) {
            pieces.push_back({total, 0.0});
            return;
        }
        pieces.push_back({lead, 0.0});
        pieces.push_back({chicane_arc, kappa});
        pieces.push_back({chicane_arc, -kappa});
        pieces.push_back({chicane_arc, -kappa});
        pieces.push_back({chicane_arc, kappa});
        pieces.push_back({total - lead - chicane_extent, 0.0});
    };
    chicane_side(bottom, std::min(600.0, 0.25 * bottom));
    pieces.push_back({corner, 1.0 / R});
    pieces.push_back({side, 0.0});
    pieces.push_back({corner, 1.0 / R});
    chicane_side(bottom, 0.5 * (bottom - chicane_extent));
    pieces.push_back({corner, 1.0 / R});
    pieces.push_back({side, 0.0});
    pieces.push_back({corner, 1.0 / R});
    return pieces;
}

}  // namespace

double urban_loop_length(const TrajectorySpec& spec) {
    double total = 0.0;
    for (const auto& piece : urban_loop_pieces(spec)) {
        total += piece.length;
    }
    return total;
}

std::vector<Pose2> generate_trajectory(const TrajectorySpec& spec) {
    spec.validate();
    std::vector<Pose2> poses;
    poses.reserve(spec.slot_count);
    const double step = spec.speed * spec.slot_period;

    switch (spec.preset) {
        case TrajectoryPreset::Straight:
            for (std::size_t k = 0; k < spec.slot_count; ++k) {
                poses.push_back(advance(spec.start, step * static_cast<double>(k), 0.0));
            }
            break;
        case TrajectoryPreset::Arc:
            for (std::size_t k = 0; k < spec.slot_count; ++k) {
                poses.push_back(advance(spec.start, step * static_cast<double>(k), 1.0 / spec.arc_radius));
            }
            break;
        case TrajectoryPreset::UrbanLoop: {
            const auto pieces = urban_loop_pieces(spec);
            const double lap = urban_loop_length(spec);
            const double loop_step = lap / static_cast<double>(spec.slot_count);
            std::size_t piece = 0;
            Pose2 piece_start = spec.start;
            double piece_offset = 0.0;  // arc length where `piece` begins
            for (std::size_t k = 0; k < spec.slot_count; ++k) {
                const double s = loop_step * static_cast<double>(k);
                while (piece + 1 < pieces.size() && s >= piece_offset + pieces[piece].length) {
                    piece_start = advance(piece_start, pieces[piece].length, pieces[piece].curvature);
                    piece_offset += pieces[piece].length;
                    ++piece;
                }
                poses.push_back(advance(piece_start, s - piece_offset, pieces[piece].curvature));
            }
            break;
        }
    }
    return poses;
}

// ---------------------------------------------------------------- rendering

void RadarSimConfig::validate() const {
    if (azimuth_count == 0 || range_bin_count == 0)
        throw std::invalid_argument("radar: grid dimensions must be positive");
    if (!(range_resolution > 0.0)) throw std::invalid_argument("radar: range resolution must be positive");
    if (!(range_min >= 0.0) || !(range_min < range_max))
        throw std::invalid_argument("radar: need 0 <= range_min < range_max");
    if (!(pulse_sigma_bins > 0.0)) throw std::invalid_argument("radar: pulse width must be positive");
    if (!(segment_step > 0.0)) throw std::invalid_argument("radar: segment step must be positive");
    if (noise_mean < 0.0 || speckle_rate < 0.0 || speckle_rate > 1.0)
        throw std::invalid_argument("radar: noise parameters out of range");
}

struct ScanRenderer::Index {
    struct Sample {
        Vec2 p;
        double reflectivity;
    };
    double cell = 50.0;
    std::unordered_map<std::uint64_t, std::vector<Sample>> points;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> segment_cells;
    std::vector<SegmentLandmark> segments;

    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    }
    std::uint64_t key_of(const Vec2& p) const {
        return key(static_cast<std::int64_t>(std::floor(p.x() / cell)),
                   static_cast<std::int64_t>(std::floor(p.y() / cell)));
    }
};

ScanRenderer::ScanRenderer(const LandmarkMap& map, RadarSimConfig cfg)
    : index_(std::make_unique<Index>()), cfg_(cfg) {
    cfg_.validate();
    for (const auto& pt : map.points) {
        index_->points[index_->key_of(pt.position)].push_back({pt.position, pt.reflectivity});
    }
    index_->segments = map.segments;
    for (std::uint32_t id = 0; id < map.segments.size(); ++id) {
        const auto& seg = map.segments[id];
        const double len = (seg.b - seg.a).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / cfg_.segment_step)));
        for (int i = 0; i <= n; ++i) {
            auto& ids = index_->segment_cells[index_->key_of(seg.a + (seg.b - seg.a) * (static_cast<double>(i) / n))];
            if (ids.empty() || ids.back() != id) {
                ids.push_back(id);
            }
        }
    }
}

ScanRenderer::~ScanRenderer() = default;
ScanRenderer::ScanRenderer(ScanRenderer&&) noexcept = default;
ScanRenderer& ScanRenderer::operator=(ScanRenderer&&) noexcept = default;

std::size_t ScanRenderer::sample_count() const {
    std::size_t n = index_->segments.size();
    for (const auto& [key, pts] : index_->points) {
        n += pts.size();
    }
    return n;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Fast uniform stream for per-cell background noise.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : state_(seed) {}
    // Uniform in (0, 1].
    double next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return (static_cast<double>(mix64(state_) >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace

RadarScan ScanRenderer::render(const Pose2& sensor_pose, Rng& rng, std::uint64_t timestamp_ns) const {
    const std::uint32_t A = cfg_.azimuth_count;
    const std::uint32_t B = cfg_.range_bin_count;
    std::vector<float> grid(static_cast<std::size_t>(A) * B, 0.0f);

    const Mat2 Rt = rotation_from_yaw(sensor_pose.theta).transpose();
    const double az_step = kTwoPi / A;
    const double inv_two_var = 1.0 / (2.0 * cfg_.pulse_sigma_bins * cfg_.pulse_sigma_bins);

    // 3-bin pulse centred on `range`, peak = reflectivity; overlapping returns keep the maximum.
    const auto splat = [&](std::uint32_t row, double range, double reflectivity) {
        if (range < cfg_.range_min || range > cfg_.range_max) {
            return;
        }
        const double centre = range / cfg_.range_resolution - 0.5;
        const auto peak = static_cast<std::int64_t>(std::lround(centre));
        for (std::int64_t b = peak - 1; b <= peak + 1; ++b) {
            if (b < 0 || b >= static_cast<std::int64_t>(B)) {
                continue;
            }
            const double d = static_cast<double>(b) - centre;
            const auto v = static_cast<float>(reflectivity * std::exp(-d * d * inv_two_var));
            float& cellv = grid[static_cast<std::size_t>(row) * B + static_cast<std::size_t>(b)];
            cellv = std::max(cellv, v);
        }
    };

    const double cell = index_->cell;
    const auto c0x = static_cast<std::int64_t>(std::floor((sensor_pose.x() - cfg_.range_max) / cell));
    const auto c1x = static_cast<std::int64_t>(std::floor((sensor_pose.x() + cfg_.range_max) / cell));
    const auto c0y = static_cast<std::int64_t>(std::floor((sensor_pose.y() - cfg_.range_max) / cell));
    const auto c1y = static_cast<std::int64_t>(std::floor((sensor_pose.y() + cfg_.range_max) / cell));

    std::vector<std::uint32_t> segment_ids;
    for (std::int64_t cx = c0x; cx <= c1x; ++cx) {
        for (std::int64_t cy = c0y; cy <= c1y; ++cy) {
            const auto key = Index::key(cx, cy);
            if (const auto it = index_->points.find(key); it != index_->points.end()) {
                for (const auto& s : it->second) {
                    const Vec2 local = Rt * (s.p - sensor_pose.r);
                    double az = std::atan2(local.y(), local.x());
                    if (az < 0.0) {
                        az += kTwoPi;
                    }
                    splat(static_cast<std::uint32_t>(std::lround(az / az_step) % A), local.norm(),
                          s.reflectivity);
                }
            }
            if (const auto it = index_->segment_cells.find(key); it != index_->segment_cells.end()) {
                segment_ids.insert(segment_ids.end(), it->second.begin(), it->second.end());
            }
        }
    }
    std::sort(segment_ids.begin(), segment_ids.end());
    segment_ids.erase(std::unique(segment_ids.begin(), segment_ids.end()), segment_ids.end());

    // Walls: each azimuth beam crossing the segment returns at the intersection range.
    for (std::uint32_t id : segment_ids) {
        const auto& seg = index_->segments[id];
        const Vec2 p = Rt * (seg.a - sensor_pose.r);
        const Vec2 d = Rt * (seg.b - sensor_pose.r) - p;
        double a0 = std::atan2(p.y(), p.x());
        double a1 = a0 + wrap_angle(std::atan2(p.y() + d.y(), p.x() + d.x()) - a0);
        if (a1 < a0) {
            std::swap(a0, a1);
        }
        const auto r0 = static_cast<std::int64_t>(std::ceil(a0 / az_step));
        const auto r1 = static_cast<std::int64_t>(std::floor(a1 / az_step));
        for (std::int64_t r = r0; r <= r1; ++r) {
            const double ang = static_cast<double>(r) * az_step;
            const Vec2 u(std::cos(ang), std::sin(ang));
            const double denom = cross2(u, d);
            if (std::abs(denom) < 1e-12) {
                continue;
            }
            const double t = cross2(p, u) / denom;
            const double range = cross2(p, d) / denom;
            if (t < 0.0 || t > 1.0 || !(range > 0.0)) {
                continue;
            }
            const auto row = static_cast<std::uint32_t>(((r % A) + A) % A);
            splat(row, range, seg.reflectivity);
        }
    }

    if (cfg_.noise_mean > 0.0) {
        NoiseStream stream(rng.engine()());
        const auto mean = static_cast<float>(cfg_.noise_mean);
        for (float& v : grid) {
            v -= mean * static_cast<float>(std::log(stream.next()));
        }
    }
    if (cfg_.speckle_rate > 0.0) {
        std::binomial_distribution<std::size_t> count_dist(grid.size(), cfg_.speckle_rate);
        const std::size_t n = count_dist(rng.engine());
        std::uniform_int_distribution<std::size_t> where(0, grid.size() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            float& v = grid[where(rng.engine())];
            v = std::max(v, static_cast<float>(rng.uniform(0.0, cfg_.speckle_max)));
        }
    }

    RadarScan scan(A, B, cfg_.range_resolution, timestamp_ns);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        scan.intensities[i] = static_cast<std::uint8_t>(std::clamp(std::lround(grid[i]), 0L, 255L));
    }
    return scan;
}

RadarScan render_scan(const LandmarkMap& map, const Pose2& sensor_pose, const RadarSimConfig& cfg,
                      Rng& rng, std::uint64_t timestamp_ns) {
    return ScanRenderer(map, cfg).render(sensor_pose, rng, timestamp_ns);
}

// ---------------------------------------------------------------- pose noise

Pose2 perturb_pose(const Pose2& pose, const NoiseSpec& noise, Rng& rng) {
    if (noise.sigma_r < 0.0 || noise.sigma_theta < 0.0) {
        throw std::invalid_argument("perturb_pose: noise standard deviations must be non-negative");
    }
    const double ex = rng.normal(0.0, noise.sigma_r);
    const double ey = rng.normal(0.0, noise.sigma_r);
    const double et = rng.normal(0.0, noise.sigma_theta);
    return {pose.r + Vec2(ex, ey), pose.theta + et};
}

std::vector<Pose2> perturb_trajectory(const std::vector<Pose2>& truth, const NoiseSpec& noise) {
    const Rng master(noise.seed);
    std::vector<Pose2> out;
    out.reserve(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        Rng slot = master.split(k);
        out.push_back(perturb_pose(truth[k], noise, slot));
    }
    return out;
}

}  // namespace spebt
