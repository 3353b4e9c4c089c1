#include "spebt/radar_scan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "spebt/error.hpp"

namespace spebt {

static_assert(std::endian::native == std::endian::little,
              "RSCN I/O assumes a little-endian host");

RadarScan::RadarScan(std::uint32_t azimuths, std::uint32_t bins, double resolution,
                     std::uint64_t timestamp)
    : azimuth_count(azimuths),
      range_bin_count(bins),
      range_resolution(resolution),
      timestamp_ns(timestamp),
      intensities(static_cast<std::size_t>(azimuths) * bins, 0) {
    validate();
}

void RadarScan::validate() const {
    if (azimuth_count == 0 || range_bin_count == 0) {
        throw std::invalid_argument("RadarScan: azimuth and range bin counts must be positive");
    }
    if (!(range_resolution > 0.0) || !std::isfinite(range_resolution)) {
        throw std::invalid_argument("RadarScan: range resolution must be positive");
    }
    if (intensities.size() != static_cast<std::size_t>(azimuth_count) * range_bin_count) {
        throw std::invalid_argument("RadarScan: intensity grid size mismatch");
    }
}

Vec2 polar_to_cartesian(std::uint32_t azimuth_index, std::uint32_t bin_index,
                        const RadarScan& scan) {
    if (azimuth_index >= scan.azimuth_count || bin_index >= scan.range_bin_count) {
        throw std::out_of_range("polar_to_cartesian: index outside the scan grid");
    }
    const double range = scan.bin_range(bin_index);
    const double angle = scan.azimuth_angle(azimuth_index);
    return {range * std::cos(angle), range * std::sin(angle)};
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    T value;
    std::memcpy(&value, bytes.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

}  // namespace

std::vector<std::uint8_t> encode_rscn(const RadarScan& scan) {
    scan.validate();
    std::vector<std::uint8_t> out;
    out.reserve(kRscnHeaderSize + scan.intensities.size());
    for (char c : {'R', 'S', 'C', 'N'}) {
        out.push_back(static_cast<std::uint8_t>(c));
    }
    put<std::uint16_t>(out, kRscnVersion);
    put<std::uint32_t>(out, scan.azimuth_count);
    put<std::uint32_t>(out, scan.range_bin_count);
    put<double>(out, scan.range_resolution);
    put<std::uint64_t>(out, scan.timestamp_ns);
    out.insert(out.end(), scan.intensities.begin(), scan.intensities.end());
    return out;
}

RadarScan decode_rscn(std::span<const std::uint8_t> bytes, const std::string& source) {
    if (bytes.size() < kRscnHeaderSize) {
        throw IoError(source + ": truncated RSCN header");
    }
    if (std::memcmp(bytes.data(), "RSCN", 4) != 0) {
        throw IoError(source + ": bad magic, not an RSCN file");
    }
    std::size_t offset = 4;
    const auto version = get<std::uint16_t>(bytes, offset);
    if (version != kRscnVersion) {
        throw IoError(source + ": unsupported RSCN version " + std::to_string(version));
    }
    RadarScan scan;
    scan.azimuth_count = get<std::uint32_t>(bytes, offset);
    scan.range_bin_count = get<std::uint32_t>(bytes, offset);
    scan.range_resolution = get<double>(bytes, offset);
    scan.timestamp_ns = get<std::uint64_t>(bytes, offset);
    const std::size_t cells = static_cast<std::size_t>(scan.azimuth_count) * scan.range_bin_count;
    if (bytes.size() - offset != cells) {
        throw IoError(source + ": payload holds " + std::to_string(bytes.size() - offset) +
                      " bytes, header declares " + std::to_string(cells));
    }
    scan.intensities.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
    try {
        scan.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError(source + ": " + e.what());
    }
    return scan;
}

void write_rscn(const std::filesystem::path& path, const RadarScan& scan) {
    const auto bytes = encode_rscn(scan);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

RadarScan read_rscn(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_rscn(bytes, path.string());
}

std::vector<std::filesystem::path> list_scan_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError(dir.string() + ": not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".rscn") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return a.filename().string() < b.filename().string();
    });
    return files;
}

}  // namespace spebt
