#include "spebt/spatial_hash.hpp"

#include <stdexcept>

namespace spebt {

SpatialHash::SpatialHash(std::span<const Vec2> points, double cell_size)
    : points_(points), cell_size_(cell_size) {
    if (!(cell_size > 0.0)) {
        throw std::invalid_argument("SpatialHash: cell size must be positive");
    }
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [cx, cy] = cell_of(points[i]);
        cells_[key(cx, cy)].push_back(static_cast<std::uint32_t>(i));
    }
}

}  // namespace spebt
