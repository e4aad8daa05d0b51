#pragma once

#include "quadtune/agent.hpp"
#include "quadtune/config.hpp"
#include "quadtune/trace.hpp"

#include <cstdint>
#include <random>
#include <string>

// Episodic tracking environment: one agent step holds a gain action for
// dt_agent, running the controller at dt_ctrl and the plant at dt_physics
// underneath. Rewards, divergence checks, and replay observations all live
// at the agent boundaries; the optional trace records every control tick.

namespace quadtune {

class TrackingEnv {
public:
    explicit TrackingEnv(const RunConfig& cfg);

    void set_recording(bool on) { recording_ = on; }

    // Rebuilds the initial state (on the reference, at rest) and clears the
    // episode. Each reset reseeds the disturbance stream deterministically.
    Observation reset();

    struct StepResult {
        Observation obs;
        double reward = 0.0;
        bool done = false;  // divergence guard or simulation fault
        bool fault = false; // integrator/controller fault (subset of done)
        double e_eta_norm = 0.0;
    };

    StepResult step(const Action& a);

    int total_agent_steps() const { return total_steps_; }
    int steps_taken() const { return k_; }
    bool mission_complete() const { return k_ == total_steps_; }
    double time() const { return double(k_) * cfg_.agent.dt_agent; }
    const RigidBodyState& state() const { return state_; }
    const RunConfig& config() const { return cfg_; }

    SimTrace take_trace();

private:
    void record_row(double t, const ReferencePoint& ref,
                    const AttitudeSetpoint& sp, int sat_flag);
    Disturbance draw_disturbance();

    RunConfig cfg_;
    int phys_per_ctrl_;
    int ctrl_per_agent_;
    int total_steps_;
    int k_ = 0;
    long episode_index_ = 0;
    bool recording_ = false;
    bool fault_ = false;

    RigidBodyState state_;
    ControllerMemory mem_;
    InnerGains active_inner_;
    Action last_action_;
    double last_reward_ = 0.0;
    int last_sat_flag_ = 0;
    SimTrace trace_;
    std::mt19937_64 dist_rng_;
};

struct EpisodeLog {
    double episode_return = 0.0;
    int steps = 0;
    bool fault = false;
    std::string fault_reason;
    std::array<long, 6> band_counts{};
    SimTrace trace; // populated when record_trace was requested
};

// Noise-free (or sigma-noised) rollout of a fixed agent; no learning.
// `seed` drives only the exploration noise stream. sigma < 0 means "use
// cfg.agent.sigma0 when exploring".
EpisodeLog run_episode(const RunConfig& cfg, const DdpgAgent& agent,
                       bool explore, std::uint64_t seed,
                       bool record_trace = false, double sigma = -1.0);

} // namespace quadtune
