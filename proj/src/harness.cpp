#include "quadtune/harness.hpp"

#include "quadtune/errors.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <unistd.h>

namespace quadtune {

namespace {

template <typename ActionFn>
SimTrace run_mission(const RunConfig& cfg, ActionFn&& next_action) {
    TrackingEnv env(cfg);
    env.set_recording(true);
    Observation obs = env.reset();
    while (!env.mission_complete()) {
        const TrackingEnv::StepResult r = env.step(next_action(obs));
        obs = r.obs;
        if (r.fault) break; // divergence keeps running; faults truncate
    }
    return env.take_trace();
}

} // namespace

SimTrace simulate_manual(const RunConfig& cfg) {
    return run_mission(cfg, [](const Observation&) { return Action{}; });
}

SimTrace simulate_policy(const RunConfig& cfg, const PolicyFile& pf) {
    pf.validate();
    if (pf.obs_dim != k_obs_dim || pf.act_dim != k_act_dim)
        throw DimensionMismatch("policy does not match the tuner interface");
    return run_mission(cfg, [&pf](const Observation& obs) {
        const std::vector<double> n = reconstruct_action(pf, obs.v);
        Action a;
        for (int i = 0; i < k_act_dim; ++i) a.n[std::size_t(i)] = n[std::size_t(i)];
        return a;
    });
}

EvalReport evaluate_policy(const RunConfig& cfg, const PolicyFile& pf) {
    const SimTrace base = simulate_manual(cfg);
    const SimTrace pol = simulate_policy(cfg, pf);
    EvalReport r;
    r.baseline = compute_metrics(base);
    r.policy = compute_metrics(pol);
    r.baseline_fault = base.fault;
    r.policy_fault = pol.fault;
    r.rmse_ratio = r.baseline.attitude_rmse > 0.0
                       ? r.policy.attitude_rmse / r.baseline.attitude_rmse
                       : 0.0;
    r.improvement_pct = (1.0 - r.rmse_ratio) * 100.0;
    return r;
}

ReconstructReport reconstruct_check(const PolicyFile& pf, int trials,
                                    std::uint64_t seed) {
    pf.validate();
    const DenseNet net = policy_to_net(pf);
    ReconstructReport rep;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> obs(std::size_t(pf.obs_dim));
    for (int t = 0; t < trials; ++t) {
        for (double& v : obs) v = u(rng);
        const std::vector<double> a = forward(net, obs);
        const std::vector<double> b = reconstruct_action(pf, obs);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = std::abs(a[i] - b[i]);
            if (d > rep.max_abs_deviation) rep.max_abs_deviation = d;
        }
    }
    // Round trip through both on-disk forms must preserve every bit.
    const std::string stem =
        "/tmp/quadtune_rt_check_" + std::to_string(::getpid());
    const std::string tmp_bin = stem + ".qtp";
    const std::string tmp_json = stem + ".json";
    save_policy(pf, tmp_bin);
    save_policy(pf, tmp_json);
    const PolicyFile rb = load_policy(tmp_bin);
    const PolicyFile rj = load_policy(tmp_json);
    auto identical = [&](const PolicyFile& q) {
        if (q.layers.size() != pf.layers.size()) return false;
        if (q.bound_hi != pf.bound_hi || q.bound_lo != pf.bound_lo) return false;
        for (std::size_t i = 0; i < pf.layers.size(); ++i) {
            if (q.layers[i].weights != pf.layers[i].weights) return false;
            if (q.layers[i].biases != pf.layers[i].biases) return false;
            if (q.layers[i].activation != pf.layers[i].activation) return false;
        }
        return true;
    };
    rep.round_trip_identical = identical(rb) && identical(rj);
    std::remove(tmp_bin.c_str());
    std::remove(tmp_json.c_str());
    return rep;
}

} // namespace quadtune
