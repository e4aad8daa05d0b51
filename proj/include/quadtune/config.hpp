#pragma once

#include "quadtune/control.hpp"
#include "quadtune/dynamics.hpp"
#include "quadtune/trajectory.hpp"

#include <cstdint>
#include <string>

// Run configuration: plant, controller, mission, timing ladder, and agent
// hyper-parameters. Loaded from a small INI-style file; every key has a
// default, unknown keys are rejected so typos fail loudly.

namespace quadtune {

struct DisturbanceConfig {
    bool enabled = false;
    double force_sigma = 0.0;  // N, per world axis
    double moment_sigma = 0.0; // N*m, per body axis

    void validate() const;
};

struct AgentConfig {
    double dt_agent = 0.05;
    double gamma = 0.99;
    double lr_actor = 1e-3;
    double lr_critic = 1e-3;
    double l2 = 1e-5;
    double adam_eps = 1e-8;
    double soft_update_tau = 1e-3;
    double search_rate = 0.4;   // gain scaling span: k = k_base * (1 + rate * n)
    double sigma0 = 0.1;        // initial exploration noise std
    double sigma_decay = 0.999; // per-episode multiplicative decay
    double target_return = 117.0;
    int batch = 1024;
    long buffer_capacity = 1000000;
    int max_episodes = 2000;
    int ma_window = 20;
    int eval_period = 5; // noise-free evaluation every N episodes
    int hidden_units = 128;

    void validate() const;
};

struct RunConfig {
    QuadrotorParams quad;
    GainSet gains;
    ControlParams control;
    TrajectoryConfig trajectory;
    AgentConfig agent;
    DisturbanceConfig disturbance;
    double dt_physics = 1e-3;
    double dt_ctrl = 5e-3;
    std::uint64_t seed = 1;

    void validate() const;
    int physics_per_ctrl() const;
    int ctrl_per_agent() const;
    int agent_steps() const; // whole mission

    static RunConfig defaults();
    static RunConfig load(const std::string& path); // ConfigError
    void save(const std::string& path) const;
};

} // namespace quadtune
