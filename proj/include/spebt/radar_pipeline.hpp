#pragma once

#include <cstdint>
#include <vector>

#include "spebt/geometry.hpp"
#include "spebt/radar_scan.hpp"

namespace spebt {

// Radar odometry parameters. Defaults are the published simulation settings.
struct OdometryConfig {
    int k_strongest = 3;
    int kappa_min = 55;               // intensities must exceed this
    double d_D = 3.5;                 // neighbourhood radius / base grid side (m)
    double f_D = 1.0;                 // resampling factor, grid side = d_D / f_D
    double theta_tol = deg2rad(30.0); // normal angle tolerance for correspondences
    double huber_delta = 0.1;
    double range_min = 5.0;
    double range_max = 100.0;
    int min_neighbors = 3;
    int min_correspondences = 10;
    int max_outer_iterations = 50;
    double outer_tolerance = 1e-6;    // pose change that ends re-association

    void validate() const;
    double grid_side() const { return d_D / f_D; }
};

struct FilteredPoint {
    Vec2 p;
    std::uint8_t intensity;
    std::uint32_t azimuth;
    std::uint32_t bin;
};

// P_F: conservatively filtered returns in the sensor frame.
struct FilteredCloud {
    std::vector<FilteredPoint> points;

    std::vector<Vec2> positions() const;
};

// P_D: centroids of occupied grid cells.
struct DownsampledCloud {
    std::vector<Vec2> points;
};

struct SurfacePoint {
    Vec2 mu;
    Vec2 normal;  // unit, oriented towards the sensor origin
};

// M: sparse oriented-surface-point representation of one scan.
struct SurfaceRepresentation {
    std::vector<SurfacePoint> items;

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }
};

// Keeps, per azimuth, the K strongest in-range bins whose intensity exceeds
// kappa_min. Equal intensities prefer the nearer bin. Output is ordered by
// azimuth, then by bin.
FilteredCloud k_strongest_filter(const RadarScan& scan, const OdometryConfig& cfg);

// Grid of side d_D/f_D anchored at the origin (floor indexing); one centroid
// per occupied cell, ordered by cell index.
DownsampledCloud downsample(const FilteredCloud& cloud, const OdometryConfig& cfg);
DownsampledCloud downsample(const std::vector<Vec2>& points, double cell_side);

// Sample mean and unbiased covariance of a neighbourhood (|N| >= 2).
struct NeighborhoodStats {
    Vec2 mean;
    Mat2 covariance;
};
NeighborhoodStats neighborhood_stats(const std::vector<Vec2>& neighbors);

// Unit eigenvector of the smallest eigenvalue of a symmetric 2x2 matrix.
Vec2 smallest_eigenvector(const Mat2& sym);

SurfaceRepresentation estimate_surface_points(const DownsampledCloud& down,
                                              const FilteredCloud& filtered,
                                              const OdometryConfig& cfg);

// Scan -> filter -> downsample -> surface points.
SurfaceRepresentation build_representation(const RadarScan& scan, const OdometryConfig& cfg);

}  // namespace spebt
