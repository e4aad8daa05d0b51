#include "quadtune/train.hpp"

#include "quadtune/errors.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>

namespace quadtune {

namespace {

double eval_return(const RunConfig& cfg, const DdpgAgent& agent) {
    return run_episode(cfg, agent, false, 0, false).episode_return;
}

} // namespace

TrainResult train(const RunConfig& cfg, std::uint64_t seed,
                  const TrainObserver& observer) {
    cfg.validate();
    DdpgAgent agent(cfg.agent, seed);
    TrackingEnv env(cfg);
    std::mt19937_64 noise_rng(seed ^ 0xa0761d6478bd642full);

    TrainResult result;
    result.best_actor = agent.actor();
    result.best_eval_return = eval_return(cfg, agent);
    result.best_eval_episode = 0;
    {
        CurveRow row;
        row.episode = 0;
        row.sigma = cfg.agent.sigma0;
        row.eval_return = result.best_eval_return;
        row.eval_valid = true;
        result.curve.push_back(row);
    }

    std::deque<double> window;
    double sigma = cfg.agent.sigma0;
    long updates_total = 0;

    for (int ep = 1; ep <= cfg.agent.max_episodes; ++ep) {
        Observation obs = env.reset();
        double ep_return = 0.0;
        double loss_sum = 0.0, obj_sum = 0.0;
        long ep_updates = 0;
        bool fault = false;

        while (!env.mission_complete()) {
            const Action a = agent.act_noisy(obs, sigma, noise_rng);
            const TrackingEnv::StepResult r = env.step(a);
            ep_return += r.reward;
            // Mission end is a time limit, not an absorbing state: only
            // divergence/fault terminates the value recursion.
            agent.remember(obs, a, r.reward, r.obs, r.done);
            if (agent.ready()) {
                const DdpgStats st = agent.update();
                loss_sum += st.critic_loss;
                obj_sum += st.actor_objective;
                ++ep_updates;
                ++updates_total;
            }
            obs = r.obs;
            if (r.done) {
                fault = r.fault;
                break;
            }
        }

        window.push_back(ep_return);
        while (int(window.size()) > cfg.agent.ma_window) window.pop_front();
        const bool ma_valid = int(window.size()) == cfg.agent.ma_window;
        const double ma =
            std::accumulate(window.begin(), window.end(), 0.0) /
            double(window.size());

        CurveRow row;
        row.episode = ep;
        row.episode_return = ep_return;
        row.return_valid = true;
        row.moving_average = ma;
        row.ma_valid = ma_valid;
        row.sigma = sigma;
        row.critic_loss = ep_updates ? loss_sum / double(ep_updates) : 0.0;
        row.actor_objective = ep_updates ? obj_sum / double(ep_updates) : 0.0;
        row.buffer_size = long(agent.buffer().size());
        row.updates = updates_total;
        row.fault = fault;

        const bool do_eval = ep % cfg.agent.eval_period == 0 ||
                             ep == cfg.agent.max_episodes;
        if (do_eval) {
            row.eval_return = eval_return(cfg, agent);
            row.eval_valid = true;
            if (row.eval_return > result.best_eval_return) {
                result.best_eval_return = row.eval_return;
                result.best_eval_episode = ep;
                result.best_actor = agent.actor();
            }
        }

        result.curve.push_back(row);
        result.episodes = ep;
        result.final_moving_average = ma;

        if (ma_valid && ma >= cfg.agent.target_return) {
            result.reached_target = true;
            break;
        }
        if (observer && !observer(result.curve.back(), agent)) break;

        sigma *= cfg.agent.sigma_decay;
    }

    // Make sure the final actor was considered for best even off-cadence.
    if (!result.curve.empty() && !result.curve.back().eval_valid) {
        const double r = eval_return(cfg, agent);
        if (r > result.best_eval_return) {
            result.best_eval_return = r;
            result.best_eval_episode = result.episodes;
            result.best_actor = agent.actor();
        }
    }
    return result;
}

void write_curve_csv(const std::vector<CurveRow>& curve,
                     const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open curve file for writing: " + path);
    os << "episode,episode_return,moving_average,sigma,critic_loss,"
          "actor_objective,eval_return,buffer_size,updates,fault\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (const CurveRow& r : curve) {
        os << r.episode << ',';
        if (r.return_valid) put(r.episode_return);
        os << ',';
        if (r.ma_valid) put(r.moving_average);
        os << ',';
        put(r.sigma);
        os << ',';
        put(r.critic_loss);
        os << ',';
        put(r.actor_objective);
        os << ',';
        if (r.eval_valid) put(r.eval_return);
        os << ',' << r.buffer_size << ',' << r.updates << ','
           << (r.fault ? 1 : 0) << '\n';
    }
    if (!os) throw ConfigError("failed writing curve file: " + path);
}

} // namespace quadtune
