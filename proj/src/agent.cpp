#include "quadtune/agent.hpp"

#include "quadtune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace quadtune {

double Observation::attitude_error_norm() const {
    return std::sqrt(v[9] * v[9] + v[10] * v[10] + v[11] * v[11]);
}

double Observation::position_error_norm() const {
    return std::sqrt(v[6] * v[6] + v[7] * v[7] + v[8] * v[8]);
}

Observation observe(const RigidBodyState& state, const ReferencePoint& ref,
                    const AttitudeSetpoint& setpoint) {
    Observation o;
    o.v[0] = state.position.x;
    o.v[1] = state.position.y;
    o.v[2] = state.position.z;
    o.v[3] = state.euler.x;
    o.v[4] = state.euler.y;
    o.v[5] = state.euler.z;
    o.v[6] = ref.position.x - state.position.x;
    o.v[7] = ref.position.y - state.position.y;
    o.v[8] = ref.position.z - state.position.z;
    o.v[9] = setpoint.roll - state.euler.x;
    o.v[10] = setpoint.pitch - state.euler.y;
    o.v[11] = setpoint.yaw - state.euler.z;
    return o;
}

int reward_band(double e) {
    if (e >= 0.04) return 0;
    if (e >= 0.01) return 1;
    if (e >= 0.001) return 2;
    if (e >= 0.0005) return 3;
    if (e > 0.0001) return 4;
    return 5;
}

namespace {
constexpr double k_band_reward[6] = {-25.0, -15.0, -10.0, -5.0, -1.0, 10.0};
}

double reward_from_error(double e) { return k_band_reward[reward_band(e)]; }

double reward_level(int band) {
    if (band < 0 || band > 5)
        throw DimensionMismatch("reward band must lie in 0..5");
    return k_band_reward[band];
}

double episode_return_from_counts(const std::array<long, 6>& counts) {
    double total = 0.0;
    for (int b = 0; b < 6; ++b)
        total += double(counts[std::size_t(b)]) * k_band_reward[b];
    return total;
}

bool diverged(const Observation& obs) {
    return obs.attitude_error_norm() > k_diverge_eta ||
           obs.position_error_norm() > k_diverge_pos;
}

InnerGains apply_action(const InnerGains& base, const Action& a, double rate) {
    InnerGains g = base;
    g.kp1_rollpitch = base.kp1_rollpitch * (1.0 + rate * a.n[0]);
    g.kp1_yaw = base.kp1_yaw * (1.0 + rate * a.n[1]);
    g.kp2_rollpitch = base.kp2_rollpitch * (1.0 + rate * a.n[2]);
    g.kp2_yaw = base.kp2_yaw * (1.0 + rate * a.n[3]);
    g.kd_rollpitch = base.kd_rollpitch * (1.0 + rate * a.n[4]);
    return g;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity_, 1 << 20));
}

void ReplayBuffer::push(const Transition& t) {
    if (data_.size() < capacity_) {
        data_.push_back(t);
    } else {
        data_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<std::uint32_t> ReplayBuffer::sample_indices(
    std::size_t n, std::mt19937_64& rng) const {
    if (n > data_.size())
        throw InsufficientExperience("replay buffer holds " +
                                     std::to_string(data_.size()) +
                                     " transitions, need " + std::to_string(n));
    // Floyd's algorithm: n distinct indices, order = insertion order.
    std::vector<std::uint32_t> out;
    out.reserve(n);
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(n * 2);
    for (std::size_t j = data_.size() - n; j < data_.size(); ++j) {
        std::uniform_int_distribution<std::uint32_t> u(0, std::uint32_t(j));
        const std::uint32_t t = u(rng);
        if (seen.insert(t).second)
            out.push_back(t);
        else {
            seen.insert(std::uint32_t(j));
            out.push_back(std::uint32_t(j));
        }
    }
    return out;
}

namespace {

DenseNet make_actor(int hidden, std::mt19937_64& rng) {
    return make_mlp({k_obs_dim, hidden, hidden, k_act_dim},
                    {Activation::tanh, Activation::tanh,
                     Activation::clipped_relu},
                    rng);
}

DenseNet make_critic(int hidden, std::mt19937_64& rng) {
    return make_mlp({k_obs_dim + k_act_dim, hidden, hidden, 1},
                    {Activation::tanh, Activation::tanh, Activation::linear},
                    rng);
}

} // namespace

DdpgAgent::DdpgAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      buffer_(std::size_t(cfg.buffer_capacity)),
      sample_rng_(seed ^ 0x9e3779b97f4a7c15ull) {
    cfg_.validate();
    std::mt19937_64 init_rng(seed);
    actor_ = make_actor(cfg_.hidden_units, init_rng);
    critic_ = make_critic(cfg_.hidden_units, init_rng);
    actor_target_ = actor_;
    critic_target_ = critic_;
    actor_adam_.lr = cfg_.lr_actor;
    critic_adam_.lr = cfg_.lr_critic;
    actor_adam_.l2 = cfg_.l2;
    critic_adam_.l2 = cfg_.l2;
    actor_adam_.eps = cfg_.adam_eps;
    critic_adam_.eps = cfg_.adam_eps;
    actor_adam_.init(actor_);
    critic_adam_.init(critic_);
}

Action DdpgAgent::act(const Observation& obs) const {
    const std::vector<double> out = forward(actor_, obs.v);
    Action a;
    for (int i = 0; i < k_act_dim; ++i) a.n[std::size_t(i)] = out[std::size_t(i)];
    return a;
}

Action DdpgAgent::act_noisy(const Observation& obs, double sigma,
                            std::mt19937_64& rng) const {
    Action a = act(obs);
    if (sigma > 0.0) {
        std::normal_distribution<double> n(0.0, sigma);
        for (double& v : a.n)
            v = std::clamp(v + n(rng), -1.0, 1.0);
    }
    return a;
}

void DdpgAgent::remember(const Observation& s, const Action& a, double r,
                         const Observation& s2, bool done) {
    Transition t;
    t.s = s.v;
    t.a = a.n;
    t.r = r;
    t.s2 = s2.v;
    t.done = done;
    buffer_.push(t);
}

bool DdpgAgent::ready() const {
    return buffer_.size() >= std::size_t(cfg_.batch);
}

std::vector<double> td_targets(const DenseNet& actor_target,
                               const DenseNet& critic_target,
                               const std::vector<Transition>& batch,
                               double gamma) {
    std::vector<double> y(batch.size());
    std::vector<double> x(std::size_t(k_obs_dim) + k_act_dim);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        const std::vector<double> a2 =
            forward(actor_target, std::span<const double>(t.s2));
        std::copy(t.s2.begin(), t.s2.end(), x.begin());
        std::copy(a2.begin(), a2.end(), x.begin() + k_obs_dim);
        const std::vector<double> q2 = forward(critic_target, x);
        y[i] = t.r + gamma * (t.done ? 0.0 : 1.0) * q2[0];
    }
    return y;
}

DdpgStats DdpgAgent::update() {
    const std::size_t B = std::size_t(cfg_.batch);
    const std::vector<std::uint32_t> idx =
        buffer_.sample_indices(B, sample_rng_);

    s_.resize(B * k_obs_dim);
    a_.resize(B * k_act_dim);
    s2_.resize(B * k_obs_dim);
    x_.resize(B * (k_obs_dim + k_act_dim));
    x2_.resize(B * (k_obs_dim + k_act_dim));
    dy_.resize(B);
    batch_.resize(B);
    for (std::size_t i = 0; i < B; ++i) {
        const Transition& t = buffer_.at(idx[i]);
        batch_[i] = t;
        std::copy(t.s.begin(), t.s.end(), s_.begin() + long(i) * k_obs_dim);
        std::copy(t.a.begin(), t.a.end(), a_.begin() + long(i) * k_act_dim);
        std::copy(t.s2.begin(), t.s2.end(), s2_.begin() + long(i) * k_obs_dim);
    }

    constexpr int x_dim = k_obs_dim + k_act_dim;

    // TD targets from the target pair.
    forward_batch(actor_target_, s2_.data(), int(B), tgt_actor_cache_);
    const double* a2 = tgt_actor_cache_.output();
    for (std::size_t i = 0; i < B; ++i) {
        std::copy(s2_.begin() + long(i) * k_obs_dim,
                  s2_.begin() + long(i + 1) * k_obs_dim,
                  x2_.begin() + long(i) * x_dim);
        std::copy(a2 + i * k_act_dim, a2 + (i + 1) * k_act_dim,
                  x2_.begin() + long(i) * x_dim + k_obs_dim);
    }
    forward_batch(critic_target_, x2_.data(), int(B), tgt_critic_cache_);
    const double* q2 = tgt_critic_cache_.output();

    // Critic regression toward y.
    for (std::size_t i = 0; i < B; ++i) {
        std::copy(s_.begin() + long(i) * k_obs_dim,
                  s_.begin() + long(i + 1) * k_obs_dim,
                  x_.begin() + long(i) * x_dim);
        std::copy(a_.begin() + long(i) * k_act_dim,
                  a_.begin() + long(i + 1) * k_act_dim,
                  x_.begin() + long(i) * x_dim + k_obs_dim);
    }
    forward_batch(critic_, x_.data(), int(B), critic_cache_);
    const double* q = critic_cache_.output();

    DdpgStats stats;
    for (std::size_t i = 0; i < B; ++i) {
        const double y =
            batch_[i].r +
            cfg_.gamma * (batch_[i].done ? 0.0 : 1.0) * q2[i];
        const double diff = q[i] - y;
        stats.critic_loss += diff * diff;
        stats.mean_q += q[i];
        dy_[i] = 2.0 * diff / double(B);
    }
    stats.critic_loss /= double(B);
    stats.mean_q /= double(B);
    backward_batch(critic_, x_.data(), int(B), critic_cache_, dy_.data(),
                   grads_, true, false);
    adam_step(critic_adam_, critic_, grads_);

    // Actor ascent on mean Q(s, mu(s)) through the updated critic.
    forward_batch(actor_, s_.data(), int(B), actor_cache_);
    const double* a_mu = actor_cache_.output();
    for (std::size_t i = 0; i < B; ++i) {
        std::copy(s_.begin() + long(i) * k_obs_dim,
                  s_.begin() + long(i + 1) * k_obs_dim,
                  x_.begin() + long(i) * x_dim);
        std::copy(a_mu + i * k_act_dim, a_mu + (i + 1) * k_act_dim,
                  x_.begin() + long(i) * x_dim + k_obs_dim);
    }
    forward_batch(critic_, x_.data(), int(B), critic_cache_);
    const double* q_mu = critic_cache_.output();
    for (std::size_t i = 0; i < B; ++i) stats.actor_objective += q_mu[i];
    stats.actor_objective /= double(B);

    for (std::size_t i = 0; i < B; ++i) dy_[i] = -1.0 / double(B);
    backward_batch(critic_, x_.data(), int(B), critic_cache_, dy_.data(),
                   grads_, false, true);
    // dJ/da slice of the critic input gradient, fed back through the actor.
    std::vector<double>& da = s2_; // reuse scratch; s2_ is done for this step
    da.resize(B * k_act_dim);
    for (std::size_t i = 0; i < B; ++i)
        for (int k = 0; k < k_act_dim; ++k)
            da[i * k_act_dim + std::size_t(k)] =
                grads_.dx[i * std::size_t(x_dim) + std::size_t(k_obs_dim + k)];
    backward_batch(actor_, s_.data(), int(B), actor_cache_, da.data(), grads_,
                   true, false);
    adam_step(actor_adam_, actor_, grads_);

    soft_update(actor_target_, actor_, cfg_.soft_update_tau);
    soft_update(critic_target_, critic_, cfg_.soft_update_tau);
    ++updates_;
    return stats;
}

} // namespace quadtune
