#pragma once

#include <Eigen/Core>
#include <complex>

#include "spebt/geometry.hpp"
#include "spebt/rng.hpp"

namespace spebt {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// LoS downlink parameters; defaults follow the published simulation table.
struct ChannelConfig {
    int n_tx = 4;                      // BS antennas N
    int n_rx = 4;                      // vehicle antennas M
    double wavelength = 6e-3;          // m
    double spacing = 3e-3;             // m, half wavelength
    double carrier_hz = 50e9;          // informational; wavelength drives the model
    double path_loss_exponent = 2.2;
    cdouble alpha_ref{5e-4, 0.0};      // complex gain at d0
    double d0 = 1.0;                   // m
    double noise_power = 1e-12;        // W (-90 dBm)
    Vec2 bs_position{-30.0, -125.0};   // world frame, m

    void validate() const;
};

// s_k = [|alpha|, arg alpha, AoD, AoA].
struct FullChannelState {
    double alpha_mag = 0.0;
    double alpha_arg = 0.0;
    double aod = 0.0;
    double aoa = 0.0;

    cdouble alpha() const { return std::polar(alpha_mag, alpha_arg); }
};

// Tracked state s_bar_k = [|alpha|, AoD, AoA] (the phase is not trackable).
struct ReducedChannelState {
    double alpha_mag = 0.0;
    double aod = 0.0;
    double aoa = 0.0;

    Eigen::Vector3d vec() const { return {alpha_mag, aod, aoa}; }
    static ReducedChannelState from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

inline ReducedChannelState reduce(const FullChannelState& s) { return {s.alpha_mag, s.aod, s.aoa}; }

struct Measurement {
    cdouble z;          // raw received sample
    double z_bar = 0.0; // |z|^2 - noise power
    cdouble pilot{1.0, 0.0};
};

// ULA response (1/sqrt(n)) [1, e^{-j k cos a}, ..., e^{-j (n-1) k cos a}], k = 2 pi d / lambda.
CVec array_response(double angle, int n, double spacing, double wavelength);

// Simplified path-loss gain alpha_ref (d0/|r|)^{gamma/2} e^{j 2pi/lambda (|r| - d0)}.
cdouble path_gain(const Vec2& r_from_bs, const ChannelConfig& cfg);

// Vehicle position relative to the BS.
inline Vec2 bs_relative(const Vec2& world_position, const ChannelConfig& cfg) {
    return world_position - cfg.bs_position;
}

// AoD is measured from the BS array axis (world +y): phi = atan2(x, y) for the
// BS-relative position (x, y). AoA follows theta - phi + psi = pi.
double aod_from_position(const Vec2& r_from_bs);
FullChannelState pose_to_channel(const Pose2& vehicle, const ChannelConfig& cfg);

// H = alpha a_r(psi) a_t(phi)^H, M x N.
CMat los_channel_matrix(const FullChannelState& state, const ChannelConfig& cfg);

// Noise-free g^H H f b.
cdouble noiseless_sample(const FullChannelState& state, const CVec& f, const CVec& g, cdouble b,
                         const ChannelConfig& cfg);

// z = g^H H f b + v, v ~ CN(0, noise_power); z_bar = |z|^2 - noise_power.
Measurement received_signal(const FullChannelState& state, const CVec& f, const CVec& g, cdouble b,
                            double noise_power, const ChannelConfig& cfg, Rng& rng);

// Variance of z_bar - h_bar: (sigma_v^2 + 2 h_bar) sigma_v^2.
double measurement_variance(double h_bar, double noise_power);

}  // namespace spebt
