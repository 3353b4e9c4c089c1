#include "spebt/tracker.hpp"

#include <cmath>
#include <stdexcept>

namespace spebt {

std::string to_string(InnovationMode mode) {
    return mode == InnovationMode::Ekf ? "ekf" : "paper-literal";
}

InnovationMode innovation_mode_from_string(const std::string& name) {
    if (name == "ekf") return InnovationMode::Ekf;
    if (name == "paper-literal") return InnovationMode::PaperLiteral;
    throw std::invalid_argument("unknown innovation mode '" + name + "' (expected ekf|paper-literal)");
}

void TrackerConfig::validate() const {
    // zero pose noise is allowed (exact-pose runs)
    if (!(sigma_r >= 0.0) || !std::isfinite(sigma_r))
        throw std::invalid_argument("tracker.sigma_r must be non-negative");
    if (!(sigma_theta >= 0.0) || !std::isfinite(sigma_theta))
        throw std::invalid_argument("tracker.sigma_theta must be non-negative");
    if (!(alpha_tilde > 0.0)) throw std::invalid_argument("tracker.alpha_tilde must be positive");
    if (!(phi_tilde > 0.0) || !(psi_tilde > 0.0))
        throw std::invalid_argument("tracker angle thresholds must be positive");
}

EvolutionInputs make_evolution_inputs(const Pose2& prev, const Pose2& cur, const ChannelConfig& ch) {
    return {bs_relative(prev.r, ch), bs_relative(cur.r, ch), prev.theta, cur.theta};
}

namespace {

struct Distances {
    double prev;
    double cur;
};

Distances checked_distances(const EvolutionInputs& in) {
    const Distances d{in.r_prev.norm(), in.r_cur.norm()};
    if (!(d.prev > 0.0) || !(d.cur > 0.0)) {
        throw std::invalid_argument("evolution: vehicle position coincides with the BS");
    }
    return d;
}

}  // namespace

EvolutionModel evolution(const EvolutionInputs& in, double alpha_mag_est, const ChannelConfig& ch,
                         const TrackerConfig& tc) {
    const auto [dp, dc] = checked_distances(in);
    const double gamma = ch.path_loss_exponent;

    EvolutionModel m;
    m.rho = std::pow(dp / dc, gamma / 2.0);
    m.beta = 1.0 / (dp * dp) + 1.0 / (dc * dc);
    m.zeta = 1.0 / dp + 1.0 / dc;

    const double u3 = wrap_angle(aod_from_position(in.r_cur) - aod_from_position(in.r_prev));
    const double dtheta = wrap_angle(in.theta_cur - in.theta_prev);
    m.F = Eigen::Vector3d(m.rho, 1.0, 1.0).asDiagonal();
    m.u = Eigen::Vector3d(0.0, u3, u3 - dtheta);

    const double sr2 = tc.sigma_r * tc.sigma_r;
    const double mag_scale = gamma / 2.0 * m.rho * alpha_mag_est;
    const double bsr2 = m.beta * sr2;
    m.Q.setZero();
    m.Q(0, 0) = mag_scale * mag_scale * bsr2;
    m.Q(1, 1) = bsr2;
    m.Q(1, 2) = bsr2;
    m.Q(2, 1) = bsr2;
    m.Q(2, 2) = bsr2 + 2.0 * tc.sigma_theta * tc.sigma_theta;
    return m;
}

Eigen::Matrix4d full_process_noise(const EvolutionInputs& in, double alpha_mag_est,
                                   const ChannelConfig& ch, const TrackerConfig& tc,
                                   ArgNoiseConvention convention) {
    const EvolutionModel m = evolution(in, alpha_mag_est, ch, tc);
    const double sr2 = tc.sigma_r * tc.sigma_r;
    const double k = kTwoPi / ch.wavelength;
    const double cross = -(kPi / ch.wavelength) * ch.path_loss_exponent * m.rho * alpha_mag_est *
                         m.zeta * sr2;

    Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
    Q(0, 0) = m.Q(0, 0);
    Q(0, 1) = cross;
    Q(1, 0) = cross;
    Q(1, 1) = k * k * sr2 * (convention == ArgNoiseConvention::FirstOrder ? 2.0 : 1.0);
    Q.block<2, 2>(2, 2) = m.Q.block<2, 2>(1, 1);
    return Q;
}

Eigen::Vector4d full_process_noise_diag(const EvolutionInputs& in, double alpha_mag_est,
                                        const ChannelConfig& ch, const TrackerConfig& tc) {
    return full_process_noise(in, alpha_mag_est, ch, tc).diagonal();
}

Eigen::Vector4d process_noise_sample(const EvolutionInputs& in, double alpha_mag_est,
                                     const ChannelConfig& ch, const Vec2& eps_r_prev,
                                     const Vec2& eps_r_cur, double eps_theta_prev,
                                     double eps_theta_cur) {
    const auto [dp, dc] = checked_distances(in);
    const double rho = std::pow(dp / dc, ch.path_loss_exponent / 2.0);
    const Vec2 perp_prev(in.r_prev.y(), -in.r_prev.x());
    const Vec2 perp_cur(in.r_cur.y(), -in.r_cur.x());

    Eigen::Vector4d w;
    w[0] = ch.path_loss_exponent / 2.0 * rho * alpha_mag_est *
           (in.r_cur.dot(eps_r_cur) / (dc * dc) - in.r_prev.dot(eps_r_prev) / (dp * dp));
    w[1] = kTwoPi / ch.wavelength * (in.r_prev.dot(eps_r_prev) / dp - in.r_cur.dot(eps_r_cur) / dc);
    w[2] = perp_prev.dot(eps_r_prev) / (dp * dp) - perp_cur.dot(eps_r_cur) / (dc * dc);
    w[3] = w[2] + (eps_theta_cur - eps_theta_prev);
    return w;
}

double arg_alpha_noise_std(double wavelength, double sigma_r) {
    return kTwoPi / wavelength * sigma_r;
}

CMat steering_derivative_matrix(double angle, int n, double spacing, double wavelength) {
    const double k = kTwoPi * spacing / wavelength * std::cos(angle);
    CVec eta(n);
    for (int p = 0; p < n; ++p) {
        eta[p] = std::polar(static_cast<double>(p), -(p * k - kPi / 2.0));
    }
    CMat M(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            M(r, c) = r >= c ? eta[r - c] : std::conj(eta[c - r]);
        }
    }
    return M;
}

namespace {

struct ArrayGains {
    double rx;  // |g^H a_r(psi)|^2
    double tx;  // |f^H a_t(phi)|^2
};

ArrayGains array_gains(const ReducedChannelState& s, const CVec& f, const CVec& g,
                       const ChannelConfig& ch) {
    if (f.size() != ch.n_tx || g.size() != ch.n_rx) {
        throw std::invalid_argument("beamformer dimensions do not match the array sizes");
    }
    const CVec ar = array_response(s.aoa, ch.n_rx, ch.spacing, ch.wavelength);
    const CVec at = array_response(s.aod, ch.n_tx, ch.spacing, ch.wavelength);
    return {std::norm(g.dot(ar)), std::norm(f.dot(at))};
}

}  // namespace

double measurement_fn(const ReducedChannelState& s, const CVec& f, const CVec& g, cdouble b,
                      const ChannelConfig& ch) {
    const auto gains = array_gains(s, f, g, ch);
    return std::norm(b) * s.alpha_mag * s.alpha_mag * gains.rx * gains.tx;
}

Eigen::Vector3d measurement_gradient(const ReducedChannelState& s, const CVec& f, const CVec& g,
                                     cdouble b, const ChannelConfig& ch) {
    const auto gains = array_gains(s, f, g, ch);
    const double b2 = std::norm(b);
    const double a2 = s.alpha_mag * s.alpha_mag;

    const CMat Phi = steering_derivative_matrix(s.aod, ch.n_tx, ch.spacing, ch.wavelength);
    const CMat Psi = steering_derivative_matrix(s.aoa, ch.n_rx, ch.spacing, ch.wavelength);
    // Hermitian forms; imaginary parts are rounding noise.
    const double f_form = f.dot(Phi * f).real();
    const double g_form = g.dot(Psi * g).real();

    const double k = kTwoPi * ch.spacing / ch.wavelength;
    Eigen::Vector3d grad;
    grad[0] = 2.0 * b2 * s.alpha_mag * gains.rx * gains.tx;
    grad[1] = k * std::sin(s.aod) / ch.n_tx * b2 * a2 * gains.rx * f_form;
    grad[2] = k * std::sin(s.aoa) / ch.n_rx * b2 * a2 * gains.tx * g_form;
    return grad;
}

Prediction predict(const TrackerState& state, const EvolutionModel& model) {
    Prediction p;
    p.s = model.F * state.s + model.u;
    p.s[0] = std::max(p.s[0], 0.0);
    p.P = model.F * state.P * model.F.transpose() + model.Q;
    p.P = (0.5 * (p.P + p.P.transpose())).eval();
    return p;
}

UpdateResult update(const Prediction& pred, double z_bar, const CVec& f, const CVec& g, cdouble b,
                    const ChannelConfig& ch, InnovationMode mode) {
    UpdateResult out;
    out.s = pred.s;
    out.P = pred.P;

    const auto s_pred = ReducedChannelState::from_vec(pred.s);
    const Eigen::Vector3d H = measurement_gradient(s_pred, f, g, b, ch);
    const double h_pred = measurement_fn(s_pred, f, g, b, ch);
    const double S = H.dot(pred.P * H) + measurement_variance(h_pred, ch.noise_power);
    const Eigen::Vector3d K = pred.P * H / S;
    if (!std::isfinite(S) || !(S > 0.0) || !K.allFinite()) {
        out.skipped = true;
        return out;
    }

    out.innovation = mode == InnovationMode::Ekf ? z_bar - h_pred : z_bar - H.dot(pred.s);
    out.gain = K;
    out.s = pred.s + K * out.innovation;
    out.s[0] = std::max(out.s[0], 0.0);
    out.P = (Eigen::Matrix3d::Identity() - K * H.transpose()) * pred.P;
    out.P = (0.5 * (out.P + out.P.transpose())).eval();
    return out;
}

bool check_reinit(const TrackerState& state, const TrackerConfig& tc) {
    const auto& init = state.s_init;
    return std::abs(state.s[0] - init.alpha_mag) > tc.alpha_tilde ||
           std::abs(wrap_angle(state.s[1] - init.aod)) > tc.phi_tilde ||
           std::abs(wrap_angle(state.s[2] - init.aoa)) > tc.psi_tilde;
}

TrackerState initialize_tracker(const ReducedChannelState& s_init, const Pose2& pose_est0,
                                const ChannelConfig& ch, const TrackerConfig& tc) {
    TrackerState st;
    st.s = s_init.vec();
    st.s_init = s_init;
    st.P = evolution(make_evolution_inputs(pose_est0, pose_est0, ch), s_init.alpha_mag, ch, tc).Q;
    return st;
}

SlotRecord track_step(TrackerState& state, const Pose2& pose_est_prev, const Pose2& pose_est_cur,
                      const Pose2& true_pose_cur, std::size_t k, const ChannelConfig& ch,
                      const TrackerConfig& tc, Rng& rng) {
    SlotRecord rec;
    rec.k = k;
    rec.true_pose = true_pose_cur;
    rec.est_pose = pose_est_cur;

    // Beams steered along the previous posterior.
    const CVec f = array_response(state.s[1], ch.n_tx, ch.spacing, ch.wavelength);
    const CVec g = array_response(state.s[2], ch.n_rx, ch.spacing, ch.wavelength);
    const cdouble pilot{1.0, 0.0};

    const FullChannelState truth = pose_to_channel(true_pose_cur, ch);
    rec.truth = reduce(truth);
    rec.measurement = received_signal(truth, f, g, pilot, ch.noise_power, ch, rng);

    const EvolutionModel model =
        evolution(make_evolution_inputs(pose_est_prev, pose_est_cur, ch), state.s[0], ch, tc);
    const Prediction pred = predict(state, model);
    const UpdateResult post = update(pred, rec.measurement.z_bar, f, g, pilot, ch, tc.innovation);
    state.s = post.s;
    state.P = post.P;
    rec.innovation = post.innovation;
    rec.update_skipped = post.skipped;

    if (check_reinit(state, tc)) {
        state.s_init = rec.truth;
        state.s = rec.truth.vec();
        state.P = model.Q;
        ++state.reinit_count;
        rec.reinit = true;
    }
    rec.tracked = state.reduced();
    return rec;
}

TrackTimeline run_tracker(const std::vector<Pose2>& truth, const std::vector<Pose2>& estimates,
                          const ChannelConfig& ch, const TrackerConfig& tc, const Rng& rng) {
    if (truth.size() != estimates.size()) {
        throw std::invalid_argument("run_tracker: true and estimated trajectories differ in length");
    }
    ch.validate();
    tc.validate();
    TrackTimeline tl;
    if (truth.empty()) {
        return tl;
    }
    tl.slots.reserve(truth.size());

    const ReducedChannelState init = reduce(pose_to_channel(truth[0], ch));
    TrackerState state = initialize_tracker(init, estimates[0], ch, tc);
    SlotRecord first;
    first.k = 0;
    first.true_pose = truth[0];
    first.est_pose = estimates[0];
    first.truth = init;
    first.tracked = init;
    tl.slots.push_back(first);

    for (std::size_t k = 1; k < truth.size(); ++k) {
        Rng slot_rng = rng.split(k);
        tl.slots.push_back(
            track_step(state, estimates[k - 1], estimates[k], truth[k], k, ch, tc, slot_rng));
    }
    tl.reinit_count = state.reinit_count;
    return tl;
}

}  // namespace spebt
