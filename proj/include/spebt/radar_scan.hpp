#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spebt/geometry.hpp"

namespace spebt {

// Polar intensity grid, azimuth-major. Azimuth row a covers angle 2*pi*a/A,
// range bin b is centred at (b + 0.5) * range_resolution.
struct RadarScan {
    std::uint32_t azimuth_count = 0;
    std::uint32_t range_bin_count = 0;
    double range_resolution = 0.0;  // m per bin
    std::uint64_t timestamp_ns = 0;
    std::vector<std::uint8_t> intensities;

    RadarScan() = default;
    RadarScan(std::uint32_t azimuths, std::uint32_t bins, double resolution,
              std::uint64_t timestamp = 0);

    std::uint8_t at(std::uint32_t azimuth, std::uint32_t bin) const {
        return intensities[static_cast<std::size_t>(azimuth) * range_bin_count + bin];
    }
    std::uint8_t& at(std::uint32_t azimuth, std::uint32_t bin) {
        return intensities[static_cast<std::size_t>(azimuth) * range_bin_count + bin];
    }
    std::span<const std::uint8_t> row(std::uint32_t azimuth) const {
        return {intensities.data() + static_cast<std::size_t>(azimuth) * range_bin_count,
                range_bin_count};
    }

    double bin_range(std::uint32_t bin) const { return (bin + 0.5) * range_resolution; }
    double azimuth_angle(std::uint32_t azimuth) const {
        return kTwoPi * azimuth / azimuth_count;
    }

    void validate() const;
};

// Cartesian sensor-frame position of a polar cell.
Vec2 polar_to_cartesian(std::uint32_t azimuth_index, std::uint32_t bin_index,
                        const RadarScan& scan);

// RSCN v1: "RSCN", u16 version, u32 azimuths, u32 bins, f64 resolution,
// u64 timestamp_ns, then azimuths*bins intensity bytes. Little-endian.
inline constexpr std::uint16_t kRscnVersion = 1;
inline constexpr std::size_t kRscnHeaderSize = 4 + 2 + 4 + 4 + 8 + 8;

std::vector<std::uint8_t> encode_rscn(const RadarScan& scan);
RadarScan decode_rscn(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

void write_rscn(const std::filesystem::path& path, const RadarScan& scan);
RadarScan read_rscn(const std::filesystem::path& path);

// `.rscn` files of a scan directory, sorted lexicographically by file name.
std::vector<std::filesystem::path> list_scan_files(const std::filesystem::path& dir);

}  // namespace spebt
