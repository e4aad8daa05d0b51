#pragma once

#include "quadtune/config.hpp"
#include "quadtune/env.hpp"
#include "quadtune/policy_io.hpp"
#include "quadtune/trace.hpp"

// Mission drivers used by the CLI and the acceptance suite. Simulation
// faults do not throw here: they come back as a truncated trace with the
// fault annotation set.

namespace quadtune {

// Full mission with the configured (manual) gains: the agent action is
// identically zero, so the inner loop runs at its base gains.
SimTrace simulate_manual(const RunConfig& cfg);

// Full mission with gains modulated by an exported policy, evaluated through
// the deployment-style reconstruction path.
SimTrace simulate_policy(const RunConfig& cfg, const PolicyFile& pf);

struct EvalReport {
    MetricsReport baseline;
    MetricsReport policy;
    double rmse_ratio = 0.0; // policy / baseline attitude RMSE
    double improvement_pct = 0.0;
    bool baseline_fault = false;
    bool policy_fault = false;
};

EvalReport evaluate_policy(const RunConfig& cfg, const PolicyFile& pf);

struct ReconstructReport {
    int trials = 0;
    double max_abs_deviation = 0.0; // forward(net) vs reconstruct_action
    bool round_trip_identical = false; // save -> load -> byte-equal params
};

ReconstructReport reconstruct_check(const PolicyFile& pf, int trials,
                                    std::uint64_t seed);

} // namespace quadtune
