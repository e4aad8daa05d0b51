#pragma once

#include "quadtune/config.hpp"
#include "quadtune/control.hpp"
#include "quadtune/dynamics.hpp"
#include "quadtune/neural.hpp"
#include "quadtune/trajectory.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

// Inner-loop gain tuner: a DDPG actor/critic pair over a 12-dimensional
// tracking observation and a 5-dimensional normalized gain action.

namespace quadtune {

inline constexpr int k_obs_dim = 12;
inline constexpr int k_act_dim = 5;

// Divergence guard thresholds checked at agent boundaries.
inline constexpr double k_diverge_eta = 1.0;  // rad
inline constexpr double k_diverge_pos = 10.0; // m

struct Observation {
    // [position(3), euler(3), position error(3), attitude error(3)]
    std::array<double, k_obs_dim> v{};

    double attitude_error_norm() const;
    double position_error_norm() const;
};

struct Action {
    std::array<double, k_act_dim> n{}; // each in [-1, 1]
};

Observation observe(const RigidBodyState& state, const ReferencePoint& ref,
                    const AttitudeSetpoint& setpoint);

// Banded attitude reward; band 5 is the tight-tracking bonus band.
double reward_from_error(double e_eta_norm);
int reward_band(double e_eta_norm); // 0 (worst) .. 5 (best)

// Reward level of each band, worst to best.
double reward_level(int band);

// Episode return implied by per-band step counts (worst band first).
double episode_return_from_counts(const std::array<long, 6>& counts);

bool diverged(const Observation& obs);

// k = k_base * (1 + rate * n), applied to the five inner-loop gains in the
// order [kp1_rollpitch, kp1_yaw, kp2_rollpitch, kp2_yaw, kd_rollpitch].
InnerGains apply_action(const InnerGains& base, const Action& a, double rate);

struct Transition {
    std::array<double, k_obs_dim> s{};
    std::array<double, k_act_dim> a{};
    double r = 0.0;
    std::array<double, k_obs_dim> s2{};
    bool done = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    // n distinct indices, uniform without replacement (InsufficientExperience).
    std::vector<std::uint32_t> sample_indices(std::size_t n,
                                              std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // next slot once full
    std::vector<Transition> data_;
};

// y_i = r_i + gamma * (1 - done_i) * Q_target(s2_i, mu_target(s2_i))
std::vector<double> td_targets(const DenseNet& actor_target,
                               const DenseNet& critic_target,
                               const std::vector<Transition>& batch,
                               double gamma);

struct DdpgStats {
    double critic_loss = 0.0;    // batch MSE before the critic step
    double actor_objective = 0.0; // mean Q(s, mu(s)) before the actor step
    double mean_q = 0.0;          // mean learner Q on the batch
};

class DdpgAgent {
public:
    DdpgAgent(const AgentConfig& cfg, std::uint64_t seed);

    Action act(const Observation& obs) const;
    // act + N(0, sigma) per component, clipped to [-1, 1]. sigma <= 0 draws
    // nothing from rng, so a zero-noise rollout leaves the stream untouched.
    Action act_noisy(const Observation& obs, double sigma,
                     std::mt19937_64& rng) const;

    void remember(const Observation& s, const Action& a, double r,
                  const Observation& s2, bool done);
    bool ready() const;
    DdpgStats update(); // one minibatch step; InsufficientExperience

    const DenseNet& actor() const { return actor_; }
    const DenseNet& critic() const { return critic_; }
    const DenseNet& actor_target() const { return actor_target_; }
    const DenseNet& critic_target() const { return critic_target_; }
    DenseNet& actor_mutable() { return actor_; }
    DenseNet& critic_mutable() { return critic_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long updates_done() const { return updates_; }

private:
    AgentConfig cfg_;
    DenseNet actor_, critic_, actor_target_, critic_target_;
    AdamState actor_adam_, critic_adam_;
    ReplayBuffer buffer_;
    std::mt19937_64 sample_rng_;
    long updates_ = 0;

    // scratch, reused across updates
    std::vector<Transition> batch_;
    std::vector<double> s_, a_, s2_, x_, x2_, dy_;
    BatchCache actor_cache_, critic_cache_, tgt_actor_cache_, tgt_critic_cache_;
    NetGradients grads_;
};

} // namespace quadtune
