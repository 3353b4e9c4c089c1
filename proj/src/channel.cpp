#include "spebt/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace spebt {

void ChannelConfig::validate() const {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("channel: antenna counts must be >= 1");
    if (!(wavelength > 0.0)) throw std::invalid_argument("channel: wavelength must be positive");
    if (!(spacing > 0.0)) throw std::invalid_argument("channel: antenna spacing must be positive");
    if (!(d0 > 0.0)) throw std::invalid_argument("channel: reference distance must be positive");
    if (!(path_loss_exponent > 0.0))
        throw std::invalid_argument("channel: path loss exponent must be positive");
    if (!(noise_power > 0.0)) throw std::invalid_argument("channel: noise power must be positive");
    if (!bs_position.allFinite()) throw std::invalid_argument("channel: BS position must be finite");
}

CVec array_response(double angle, int n, double spacing, double wavelength) {
    if (n < 1) {
        throw std::invalid_argument("array_response: need at least one element");
    }
    const double k = kTwoPi * spacing / wavelength * std::cos(angle);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CVec a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = std::polar(scale, -k * i);
    }
    return a;
}

cdouble path_gain(const Vec2& r_from_bs, const ChannelConfig& cfg) {
    const double dist = r_from_bs.norm();
    if (!(dist > 0.0)) {
        throw std::invalid_argument("path_gain: vehicle coincides with the BS");
    }
    const double mag = std::abs(cfg.alpha_ref) * std::pow(cfg.d0 / dist, cfg.path_loss_exponent / 2.0);
    const double phase = std::arg(cfg.alpha_ref) + kTwoPi / cfg.wavelength * (dist - cfg.d0);
    return std::polar(mag, phase);
}

double aod_from_position(const Vec2& r_from_bs) {
    return std::atan2(r_from_bs.x(), r_from_bs.y());
}

FullChannelState pose_to_channel(const Pose2& vehicle, const ChannelConfig& cfg) {
    const Vec2 r = bs_relative(vehicle.r, cfg);
    if (!(r.norm() > 0.0)) {
        throw std::invalid_argument("pose_to_channel: vehicle coincides with the BS");
    }
    const double dist = r.norm();
    FullChannelState s;
    s.alpha_mag = std::abs(cfg.alpha_ref) * std::pow(cfg.d0 / dist, cfg.path_loss_exponent / 2.0);
    s.alpha_arg = wrap_angle(std::arg(cfg.alpha_ref) + kTwoPi / cfg.wavelength * (dist - cfg.d0));
    s.aod = aod_from_position(r);
    s.aoa = wrap_angle(kPi + s.aod - vehicle.theta);
    return s;
}

CMat los_channel_matrix(const FullChannelState& state, const ChannelConfig& cfg) {
    const CVec ar = array_response(state.aoa, cfg.n_rx, cfg.spacing, cfg.wavelength);
    const CVec at = array_response(state.aod, cfg.n_tx, cfg.spacing, cfg.wavelength);
    return state.alpha() * ar * at.adjoint();
}

cdouble noiseless_sample(const FullChannelState& state, const CVec& f, const CVec& g, cdouble b,
                         const ChannelConfig& cfg) {
    const CVec ar = array_response(state.aoa, cfg.n_rx, cfg.spacing, cfg.wavelength);
    const CVec at = array_response(state.aod, cfg.n_tx, cfg.spacing, cfg.wavelength);
    // g^H a_r and a_t^H f
    const cdouble rx = g.dot(ar);
    const cdouble tx = at.dot(f);
    return state.alpha() * rx * tx * b;
}

Measurement received_signal(const FullChannelState& state, const CVec& f, const CVec& g, cdouble b,
                            double noise_power, const ChannelConfig& cfg, Rng& rng) {
    Measurement m;
    m.pilot = b;
    m.z = noiseless_sample(state, f, g, b, cfg);
    if (noise_power > 0.0) {
        m.z += rng.complex_normal(noise_power);
    }
    m.z_bar = std::norm(m.z) - noise_power;
    return m;
}

double measurement_variance(double h_bar, double noise_power) {
    return (noise_power + 2.0 * h_bar) * noise_power;
}

}  // namespace spebt
