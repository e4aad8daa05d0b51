#pragma once

#include "quadtune/agent.hpp"
#include "quadtune/config.hpp"
#include "quadtune/env.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Online fine-tuning: episodic rollouts with Gaussian exploration, one
// minibatch update per agent step once the buffer can fill a batch, decaying
// noise, periodic noise-free evaluations, and a moving-average stop rule.

namespace quadtune {

struct CurveRow {
    int episode = 0;           // 0 = pre-training evaluation row
    double episode_return = 0.0;
    bool return_valid = false;
    double moving_average = 0.0;
    bool ma_valid = false; // defined once a full window of episodes exists
    double sigma = 0.0;
    double critic_loss = 0.0;    // mean over the episode's updates
    double actor_objective = 0.0;
    double eval_return = 0.0;
    bool eval_valid = false;
    long buffer_size = 0;
    long updates = 0; // cumulative
    bool fault = false;
};

struct TrainResult {
    DenseNet best_actor;         // highest noise-free evaluation return
    double best_eval_return = 0.0;
    int best_eval_episode = 0;
    std::vector<CurveRow> curve;
    int episodes = 0;
    bool reached_target = false;
    double final_moving_average = 0.0;
};

// Called after each episode's curve row is appended; return false to stop
// training early (used by calibration and bounded acceptance runs).
using TrainObserver = std::function<bool(const CurveRow&, const DdpgAgent&)>;

TrainResult train(const RunConfig& cfg, std::uint64_t seed,
                  const TrainObserver& observer = {});

void write_curve_csv(const std::vector<CurveRow>& curve,
                     const std::string& path);

} // namespace quadtune
