#include "spebt/radar_pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "spebt/spatial_hash.hpp"

namespace spebt {

void OdometryConfig::validate() const {
    if (k_strongest < 1) throw std::invalid_argument("odometry.k_strongest must be >= 1");
    if (kappa_min < 0 || kappa_min > 255)
        throw std::invalid_argument("odometry.kappa_min must lie in [0, 255]");
    if (!(d_D > 0.0)) throw std::invalid_argument("odometry.d_D must be positive");
    if (!(f_D > 0.0)) throw std::invalid_argument("odometry.f_D must be positive");
    if (!(theta_tol > 0.0) || theta_tol > kPi)
        throw std::invalid_argument("odometry.theta_tol must lie in (0, 180] deg");
    if (!(huber_delta > 0.0)) throw std::invalid_argument("odometry.huber_delta must be positive");
    if (!(range_min >= 0.0) || !(range_min < range_max))
        throw std::invalid_argument("odometry.range_min must be >= 0 and below range_max");
    if (min_neighbors < 2) throw std::invalid_argument("odometry.min_neighbors must be >= 2");
    if (min_correspondences < 1)
        throw std::invalid_argument("odometry.min_correspondences must be >= 1");
    if (max_outer_iterations < 1)
        throw std::invalid_argument("odometry.max_outer_iterations must be >= 1");
    if (!(outer_tolerance > 0.0))
        throw std::invalid_argument("odometry.outer_tolerance must be positive");
}

std::vector<Vec2> FilteredCloud::positions() const {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& fp : points) {
        out.push_back(fp.p);
    }
    return out;
}

FilteredCloud k_strongest_filter(const RadarScan& scan, const OdometryConfig& cfg) {
    scan.validate();
    const auto k = static_cast<std::size_t>(cfg.k_strongest);

    // Range gate first, then threshold.
    std::uint32_t first_bin = 0;
    while (first_bin < scan.range_bin_count && scan.bin_range(first_bin) < cfg.range_min) {
        ++first_bin;
    }
    std::uint32_t end_bin = first_bin;
    while (end_bin < scan.range_bin_count && scan.bin_range(end_bin) <= cfg.range_max) {
        ++end_bin;
    }

    FilteredCloud cloud;
    std::vector<std::uint32_t> candidates;
    candidates.reserve(end_bin - first_bin);
    const auto stronger = [&](std::uint32_t a, std::uint32_t b, std::span<const std::uint8_t> row) {
        return row[a] != row[b] ? row[a] > row[b] : a < b;
    };

    for (std::uint32_t az = 0; az < scan.azimuth_count; ++az) {
        const auto row = scan.row(az);
        candidates.clear();
        for (std::uint32_t b = first_bin; b < end_bin; ++b) {
            if (row[b] > cfg.kappa_min) {
                candidates.push_back(b);
            }
        }
        if (candidates.size() > k) {
            std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             candidates.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return stronger(a, b, row); });
            candidates.resize(k);
        }
        std::sort(candidates.begin(), candidates.end());
        for (std::uint32_t b : candidates) {
            cloud.points.push_back({polar_to_cartesian(az, b, scan), row[b], az, b});
        }
    }
    return cloud;
}

DownsampledCloud downsample(const std::vector<Vec2>& points, double cell_side) {
    if (!(cell_side > 0.0)) {
        throw std::invalid_argument("downsample: cell side must be positive");
    }
    struct Accum {
        Vec2 sum = Vec2::Zero();
        std::size_t count = 0;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, Accum> cells;
    for (const auto& p : points) {
        const std::pair<std::int64_t, std::int64_t> key{
            static_cast<std::int64_t>(std::floor(p.x() / cell_side)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_side))};
        auto& acc = cells[key];
        acc.sum += p;
        ++acc.count;
    }
    DownsampledCloud out;
    out.points.reserve(cells.size());
    for (const auto& [key, acc] : cells) {
        out.points.push_back(acc.sum / static_cast<double>(acc.count));
    }
    return out;
}

DownsampledCloud downsample(const FilteredCloud& cloud, const OdometryConfig& cfg) {
    return downsample(cloud.positions(), cfg.grid_side());
}

NeighborhoodStats neighborhood_stats(const std::vector<Vec2>& neighbors) {
    if (neighbors.size() < 2) {
        throw std::invalid_argument("neighborhood_stats: need at least two points");
    }
    Vec2 mean = Vec2::Zero();
    for (const auto& p : neighbors) {
        mean += p;
    }
    mean /= static_cast<double>(neighbors.size());
    Mat2 cov = Mat2::Zero();
    for (const auto& p : neighbors) {
        const Vec2 d = p - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(neighbors.size() - 1);
    return {mean, cov};
}

Vec2 smallest_eigenvector(const Mat2& sym) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver;
    solver.computeDirect(sym);
    // Eigenvalues come sorted ascending.
    return solver.eigenvectors().col(0).normalized();
}

SurfaceRepresentation estimate_surface_points(const DownsampledCloud& down,
                                              const FilteredCloud& filtered,
                                              const OdometryConfig& cfg) {
    const std::vector<Vec2> source = filtered.positions();
    SurfaceRepresentation rep;
    if (source.empty()) {
        return rep;
    }
    const SpatialHash grid(source, cfg.d_D);
    std::vector<Vec2> neighbors;
    for (const auto& p : down.points) {
        neighbors.clear();
        grid.for_each_within(p, cfg.d_D, [&](std::uint32_t j) { neighbors.push_back(source[j]); });
        if (neighbors.size() < static_cast<std::size_t>(cfg.min_neighbors)) {
            continue;
        }
        const auto stats = neighborhood_stats(neighbors);
        const double scale = stats.covariance.trace();
        if (!(scale > 1e-18) || !std::isfinite(scale)) {
            continue;  // all neighbours coincide
        }
        Vec2 n = smallest_eigenvector(stats.covariance);
        if (n.dot(stats.mean) > 0.0) {
            n = -n;
        }
        rep.items.push_back({stats.mean, n});
    }
    return rep;
}

SurfaceRepresentation build_representation(const RadarScan& scan, const OdometryConfig& cfg) {
    const FilteredCloud filtered = k_strongest_filter(scan, cfg);
    const DownsampledCloud down = downsample(filtered, cfg);
    return estimate_surface_points(down, filtered, cfg);
}

}  // namespace spebt
