#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spebt/channel.hpp"
#include "spebt/geometry.hpp"
#include "spebt/rng.hpp"

namespace spebt {

enum class InnovationMode {
    Ekf,           // z_bar - h_bar(s_pred)
    PaperLiteral,  // z_bar - grad h_bar(s_pred)^T s_pred, as printed in the algorithm listing
};

std::string to_string(InnovationMode mode);
InnovationMode innovation_mode_from_string(const std::string& name);

struct TrackerConfig {
    double sigma_r = 1.0;                // pose position error std (m)
    double sigma_theta = deg2rad(3.0);   // pose yaw error std (rad)
    double alpha_tilde = 5e-7;           // re-initialisation threshold on |alpha|
    double phi_tilde = deg2rad(7.5);
    double psi_tilde = deg2rad(7.5);
    InnovationMode innovation = InnovationMode::Ekf;

    void validate() const;
};

// Estimated poses of two consecutive slots, positions relative to the BS.
struct EvolutionInputs {
    Vec2 r_prev;
    Vec2 r_cur;
    double theta_prev = 0.0;
    double theta_cur = 0.0;
};

EvolutionInputs make_evolution_inputs(const Pose2& prev, const Pose2& cur, const ChannelConfig& ch);

// s_bar_k ~ F s_bar_{k-1} + u + w, w ~ N(0, Q).
struct EvolutionModel {
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
    double rho = 1.0;
    double beta = 0.0;
    double zeta = 0.0;
};

// Reduced evolution model; Q depends on the current |alpha| estimate.
EvolutionModel evolution(const EvolutionInputs& in, double alpha_mag_est, const ChannelConfig& ch,
                         const TrackerConfig& tc);

enum class ArgNoiseConvention {
    Printed,     // arg-alpha variance (2 pi / lambda)^2 sigma_r^2 as published
    FirstOrder,  // covariance of the first-order error terms: twice the printed value
};

// 4x4 process-noise covariance of the full state [|alpha|, arg alpha, AoD, AoA].
Eigen::Matrix4d full_process_noise(const EvolutionInputs& in, double alpha_mag_est,
                                   const ChannelConfig& ch, const TrackerConfig& tc,
                                   ArgNoiseConvention convention = ArgNoiseConvention::Printed);
Eigen::Vector4d full_process_noise_diag(const EvolutionInputs& in, double alpha_mag_est,
                                        const ChannelConfig& ch, const TrackerConfig& tc);

// First-order process-noise sample for given pose errors (used to check Q by simulation).
Eigen::Vector4d process_noise_sample(const EvolutionInputs& in, double alpha_mag_est,
                                     const ChannelConfig& ch, const Vec2& eps_r_prev,
                                     const Vec2& eps_r_cur, double eps_theta_prev,
                                     double eps_theta_cur);

// Std of arg(alpha) per slot from the printed model, (2 pi / lambda) sigma_r.
double arg_alpha_noise_std(double wavelength, double sigma_r);

// Hermitian Toeplitz matrix with sub-diagonal entries
// eta_n = n exp(-j (n 2 pi d / lambda cos(angle) - pi/2)).
CMat steering_derivative_matrix(double angle, int n, double spacing, double wavelength);

// h_bar = |b|^2 |alpha|^2 |g^H a_r(psi)|^2 |f^H a_t(phi)|^2.
double measurement_fn(const ReducedChannelState& s, const CVec& f, const CVec& g, cdouble b,
                      const ChannelConfig& ch);

// Analytic gradient of measurement_fn w.r.t. [|alpha|, phi, psi].
Eigen::Vector3d measurement_gradient(const ReducedChannelState& s, const CVec& f, const CVec& g,
                                     cdouble b, const ChannelConfig& ch);

struct TrackerState {
    Eigen::Vector3d s = Eigen::Vector3d::Zero();  // [|alpha|, phi, psi], angles unwrapped
    Eigen::Matrix3d P = Eigen::Matrix3d::Zero();
    ReducedChannelState s_init;                   // last (re-)initialisation
    std::uint64_t reinit_count = 0;

    ReducedChannelState reduced() const { return ReducedChannelState::from_vec(s); }
};

struct Prediction {
    Eigen::Vector3d s;
    Eigen::Matrix3d P;
};

Prediction predict(const TrackerState& state, const EvolutionModel& model);

struct UpdateResult {
    Eigen::Vector3d s;
    Eigen::Matrix3d P;
    Eigen::Vector3d gain = Eigen::Vector3d::Zero();
    double innovation = 0.0;
    bool skipped = false;  // degenerate innovation variance; prediction returned
};

UpdateResult update(const Prediction& pred, double z_bar, const CVec& f, const CVec& g, cdouble b,
                    const ChannelConfig& ch, InnovationMode mode);

bool check_reinit(const TrackerState& state, const TrackerConfig& tc);

// Initial state s_bar_I with P = Q_0, Q_0 built with r_{-1} := r_0.
TrackerState initialize_tracker(const ReducedChannelState& s_init, const Pose2& pose_est0,
                                const ChannelConfig& ch, const TrackerConfig& tc);

struct SlotRecord {
    std::size_t k = 0;
    Pose2 true_pose;
    Pose2 est_pose;
    ReducedChannelState truth;
    ReducedChannelState tracked;  // filter output after any re-initialisation
    Measurement measurement;
    double innovation = 0.0;
    bool reinit = false;
    bool update_skipped = false;
};

// One slot of the tracking loop: steer beams from the previous posterior,
// synthesise the true measurement, predict, update, and re-initialise from
// the true pose when the deviation check fires.
SlotRecord track_step(TrackerState& state, const Pose2& pose_est_prev, const Pose2& pose_est_cur,
                      const Pose2& true_pose_cur, std::size_t k, const ChannelConfig& ch,
                      const TrackerConfig& tc, Rng& rng);

struct TrackTimeline {
    std::vector<SlotRecord> slots;
    std::uint64_t reinit_count = 0;
};

// Runs the tracker over aligned true/estimated trajectories. Slot 0 is the
// initial access from the true pose. The measurement noise stream of slot k is
// rng.split(k).
TrackTimeline run_tracker(const std::vector<Pose2>& truth, const std::vector<Pose2>& estimates,
                          const ChannelConfig& ch, const TrackerConfig& tc, const Rng& rng);

}  // namespace spebt
