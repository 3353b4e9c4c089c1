#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "spebt/geometry.hpp"

namespace spebt {

// Uniform grid over 2-D points for fixed-radius queries. Cell side equals the
// query radius, so a query only inspects the 3x3 block around its cell.
class SpatialHash {
public:
    SpatialHash(std::span<const Vec2> points, double cell_size);

    // Calls fn(index) for every stored point within `radius` (<= cell size) of q,
    // in ascending index order.
    template <typename Fn>
    void for_each_within(const Vec2& q, double radius, Fn&& fn) const {
        const auto [cx, cy] = cell_of(q);
        scratch_.clear();
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) {
                    continue;
                }
                for (std::uint32_t idx : it->second) {
                    if ((points_[idx] - q).norm() <= radius) {
                        scratch_.push_back(idx);
                    }
                }
            }
        }
        std::sort(scratch_.begin(), scratch_.end());
        for (std::uint32_t idx : scratch_) {
            fn(idx);
        }
    }

    double cell_size() const { return cell_size_; }

private:
    std::pair<std::int64_t, std::int64_t> cell_of(const Vec2& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x() / cell_size_)),
                static_cast<std::int64_t>(std::floor(p.y() / cell_size_))};
    }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    }

    std::span<const Vec2> points_;
    double cell_size_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
    mutable std::vector<std::uint32_t> scratch_;
};

}  // namespace spebt
