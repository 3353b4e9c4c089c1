#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "spebt/channel.hpp"
#include "spebt/radar_pipeline.hpp"
#include "spebt/radar_scan.hpp"
#include "spebt/registration.hpp"

namespace oracle {

using spebt::Mat2;
using spebt::Vec2;

// (azimuth, bin) kept per azimuth: gate by bin-centre range, keep bins strictly
// above the threshold, sort all by (intensity desc, bin asc), take K, order by bin.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> k_strongest(const spebt::RadarScan& scan,
                                                                       const spebt::OdometryConfig& cfg) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t a = 0; a < scan.azimuth_count; ++a) {
        std::vector<std::tuple<int, std::uint32_t>> all;
        for (std::uint32_t b = 0; b < scan.range_bin_count; ++b) {
            const double r = (b + 0.5) * scan.range_resolution;
            if (r < cfg.range_min || r > cfg.range_max) continue;
            const int v = scan.at(a, b);
            if (v > cfg.kappa_min) all.emplace_back(-v, b);
        }
        std::sort(all.begin(), all.end());
        if (all.size() > static_cast<std::size_t>(cfg.k_strongest)) all.resize(cfg.k_strongest);
        std::vector<std::uint32_t> bins;
        for (const auto& [v, b] : all) bins.push_back(b);
        std::sort(bins.begin(), bins.end());
        for (auto b : bins) out.emplace_back(a, b);
    }
    return out;
}

// Exhaustive nearest valid neighbour per current point.
inline std::vector<spebt::Correspondence> correspondences(const spebt::SurfaceRepresentation& cur,
                                                          const spebt::SurfaceRepresentation& prev,
                                                          const spebt::RelativePose& guess,
                                                          const spebt::OdometryConfig& cfg) {
    const double c = std::cos(guess.dtheta);
    const double s = std::sin(guess.dtheta);
    const auto rot = [&](const Vec2& v) { return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y()); };
    std::vector<spebt::Correspondence> out;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        const Vec2 p = rot(cur.items[i].mu) + guess.dr;
        const Vec2 n = rot(cur.items[i].normal);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            const double d = std::hypot(p.x() - prev.items[j].mu.x(), p.y() - prev.items[j].mu.y());
            if (d > cfg.d_D) continue;
            const double cosang = n.x() * prev.items[j].normal.x() + n.y() * prev.items[j].normal.y();
            if (cosang < std::cos(cfg.theta_tol)) continue;
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (std::isfinite(best)) {
            out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(best_j)});
        }
    }
    return out;
}

// Closed-form smallest eigenpair of [[a, b], [b, c]].
inline std::pair<double, Vec2> smallest_eigen_2x2(const Mat2& m) {
    const double a = m(0, 0);
    const double b = 0.5 * (m(0, 1) + m(1, 0));
    const double c = m(1, 1);
    const double half = 0.5 * (a - c);
    const double lam = 0.5 * (a + c) - std::sqrt(half * half + b * b);
    Vec2 v1(b, lam - a);
    Vec2 v2(lam - c, b);
    Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() == 0.0) v = Vec2(1.0, 0.0);
    return {lam, v.normalized()};
}

// h_bar via the explicit M x N channel matrix.
inline double measurement_full_matrix(const spebt::ReducedChannelState& s, const spebt::CVec& f,
                                      const spebt::CVec& g, spebt::cdouble b, const spebt::ChannelConfig& ch) {
    const double k = 2.0 * spebt::kPi * ch.spacing / ch.wavelength;
    spebt::CMat H(ch.n_rx, ch.n_tx);
    for (int m = 0; m < ch.n_rx; ++m) {
        for (int n = 0; n < ch.n_tx; ++n) {
            const double phase = -k * (m * std::cos(s.aoa) - n * std::cos(s.aod));
            H(m, n) = s.alpha_mag / std::sqrt(double(ch.n_rx * ch.n_tx)) * std::polar(1.0, phase);
        }
    }
    spebt::cdouble acc = 0.0;
    for (int m = 0; m < ch.n_rx; ++m) {
        for (int n = 0; n < ch.n_tx; ++n) acc += std::conj(g[m]) * H(m, n) * f[n];
    }
    return std::norm(acc * b);
}

}  // namespace oracle
