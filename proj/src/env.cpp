#include "quadtune/env.hpp"

#include "quadtune/errors.hpp"
#include "quadtune/mixer.hpp"

#include <cctype>
#include <cmath>

namespace quadtune {

TrackingEnv::TrackingEnv(const RunConfig& cfg)
    : cfg_(cfg),
      phys_per_ctrl_(cfg.physics_per_ctrl()),
      ctrl_per_agent_(cfg.ctrl_per_agent()),
      total_steps_(cfg.agent_steps()),
      dist_rng_(cfg.seed) {
    cfg_.validate();
    active_inner_ = cfg_.gains.inner;
    reset();
}

Observation TrackingEnv::reset() {
    ++episode_index_;
    k_ = 0;
    fault_ = false;
    last_action_ = Action{};
    last_reward_ = 0.0;
    last_sat_flag_ = 0;
    active_inner_ = cfg_.gains.inner;

    const ReferencePoint r0 = reference_at(0.0, cfg_.trajectory);
    state_ = RigidBodyState{};
    state_.position = r0.position;
    mem_.reset(r0.yaw);

    trace_ = SimTrace{};
    trace_.dt_ctrl = cfg_.dt_ctrl;
    trace_.dt_agent = cfg_.agent.dt_agent;
    trace_.duration = cfg_.trajectory.total_duration();

    // Per-episode disturbance stream, deterministic in (seed, episode).
    dist_rng_.seed(cfg_.seed ^ (0xd1b54a32d192ed03ull * std::uint64_t(episode_index_)));

    return observe(state_, r0, mem_.last_setpoint);
}

Disturbance TrackingEnv::draw_disturbance() {
    Disturbance d;
    if (cfg_.disturbance.enabled) {
        std::normal_distribution<double> nf(0.0, cfg_.disturbance.force_sigma);
        std::normal_distribution<double> nm(0.0, cfg_.disturbance.moment_sigma);
        d.force_world = {nf(dist_rng_), nf(dist_rng_), nf(dist_rng_)};
        d.moment_body = {nm(dist_rng_), nm(dist_rng_), nm(dist_rng_)};
    }
    return d;
}

void TrackingEnv::record_row(double t, const ReferencePoint& ref,
                             const AttitudeSetpoint& sp, int sat_flag) {
    TraceRow r;
    r.t = t;
    r.x = state_.position.x;
    r.y = state_.position.y;
    r.z = state_.position.z;
    r.phi = state_.euler.x;
    r.theta = state_.euler.y;
    r.psi = state_.euler.z;
    r.x_r = ref.position.x;
    r.y_r = ref.position.y;
    r.z_r = ref.position.z;
    r.psi_r = ref.yaw;
    r.e_px = ref.position.x - state_.position.x;
    r.e_py = ref.position.y - state_.position.y;
    r.e_pz = ref.position.z - state_.position.z;
    r.e_phi = sp.roll - state_.euler.x;
    r.e_theta = sp.pitch - state_.euler.y;
    r.e_psi = sp.yaw - state_.euler.z;
    r.e_eta_norm = std::sqrt(r.e_phi * r.e_phi + r.e_theta * r.e_theta +
                             r.e_psi * r.e_psi);
    r.kp1_pt = active_inner_.kp1_rollpitch;
    r.kp1_psi = active_inner_.kp1_yaw;
    r.kp2_pt = active_inner_.kp2_rollpitch;
    r.kp2_psi = active_inner_.kp2_yaw;
    r.kd_pt = active_inner_.kd_rollpitch;
    r.n = last_action_.n;
    r.reward = last_reward_;
    r.sat_flag = sat_flag;
    trace_.rows.push_back(r);
}

TrackingEnv::StepResult TrackingEnv::step(const Action& a) {
    if (fault_)
        throw SimulationFault("step() called after a simulation fault");
    if (k_ >= total_steps_)
        throw SimulationFault("step() called past the end of the mission");

    active_inner_ = apply_action(cfg_.gains.inner, a, cfg_.agent.search_rate);
    last_action_ = a;
    GainSet gains = cfg_.gains;
    gains.inner = active_inner_;

    StepResult out;
    std::string fault_reason;
    for (int j = 0; j < ctrl_per_agent_ && !fault_; ++j) {
        const long tick = long(k_) * ctrl_per_agent_ + j;
        const double t = double(tick) * cfg_.dt_ctrl;
        const ReferencePoint ref = reference_at(t, cfg_.trajectory);
        try {
            const ControlCommand cmd = controller_step(
                state_, ref, gains, mem_, cfg_.quad, cfg_.control, cfg_.dt_ctrl);
            last_sat_flag_ = (cmd.saturated ? 1 : 0) |
                             (cmd.thrust_degenerate ? 2 : 0);
            if (recording_) record_row(t, ref, cmd.setpoint, last_sat_flag_);
            const BodyWrench u = thrusts_to_wrench(cmd.thrusts, cfg_.quad);
            for (int i = 0; i < phys_per_ctrl_; ++i)
                state_ = step_rk4(state_, u, cfg_.dt_physics, cfg_.quad,
                                  draw_disturbance());
        } catch (const SimulationFault& e) {
            fault_ = true;
            fault_reason = e.what();
        }
    }

    ++k_;
    if (fault_) {
        trace_.fault = true;
        // single-token annotation for the CSV header
        std::string token;
        for (char c : fault_reason)
            token += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
        trace_.fault_reason = token.empty() ? "fault" : token;
        out.reward = reward_level(0); // diverged: bottom band
        out.done = true;
        out.fault = true;
        out.e_eta_norm = k_diverge_eta;
        // Observation from the last valid state against the boundary ref.
        const double t1 = mission_complete()
                              ? cfg_.trajectory.total_duration()
                              : double(k_) * cfg_.agent.dt_agent;
        out.obs = observe(state_, reference_at(t1, cfg_.trajectory),
                          mem_.last_setpoint);
        last_reward_ = out.reward;
        return out;
    }

    const double t1 = mission_complete() ? cfg_.trajectory.total_duration()
                                         : double(k_) * cfg_.agent.dt_agent;
    const ReferencePoint ref1 = reference_at(t1, cfg_.trajectory);
    out.obs = observe(state_, ref1, mem_.last_setpoint);
    out.e_eta_norm = out.obs.attitude_error_norm();
    out.reward = reward_from_error(out.e_eta_norm);
    out.done = diverged(out.obs);
    last_reward_ = out.reward;

    if (mission_complete() && recording_)
        record_row(t1, ref1, mem_.last_setpoint, last_sat_flag_);
    return out;
}

SimTrace TrackingEnv::take_trace() {
    SimTrace t = std::move(trace_);
    trace_ = SimTrace{};
    trace_.dt_ctrl = cfg_.dt_ctrl;
    trace_.dt_agent = cfg_.agent.dt_agent;
    trace_.duration = cfg_.trajectory.total_duration();
    return t;
}

EpisodeLog run_episode(const RunConfig& cfg, const DdpgAgent& agent,
                       bool explore, std::uint64_t seed, bool record_trace,
                       double sigma) {
    TrackingEnv env(cfg);
    env.set_recording(record_trace);
    std::mt19937_64 noise_rng(seed);
    const double s = explore ? (sigma < 0.0 ? cfg.agent.sigma0 : sigma) : 0.0;

    EpisodeLog log;
    Observation obs = env.reset();
    while (!env.mission_complete()) {
        const Action a = explore ? agent.act_noisy(obs, s, noise_rng)
                                 : agent.act(obs);
        const TrackingEnv::StepResult r = env.step(a);
        log.episode_return += r.reward;
        ++log.steps;
        ++log.band_counts[std::size_t(reward_band(r.e_eta_norm))];
        obs = r.obs;
        if (r.done) {
            log.fault = r.fault;
            break;
        }
    }
    SimTrace tr = env.take_trace();
    if (tr.fault) log.fault_reason = tr.fault_reason;
    if (record_trace) log.trace = std::move(tr);
    return log;
}

} // namespace quadtune
