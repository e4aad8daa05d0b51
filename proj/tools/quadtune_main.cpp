#include "quadtune/config.hpp"
#include "quadtune/errors.hpp"
#include "quadtune/harness.hpp"
#include "quadtune/kernels.hpp"
#include "quadtune/policy_io.hpp"
#include "quadtune/trace.hpp"
#include "quadtune/train.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

using namespace quadtune;

constexpr const char* k_version = "quadtune 1.0.0";

void print_metrics_table(const char* label_a, const MetricsReport& a,
                         const char* label_b, const MetricsReport* b) {
    auto row = [&](const char* name, double va, double vb) {
        if (b)
            std::printf("  %-22s %12.6g %12.6g\n", name, va, vb);
        else
            std::printf("  %-22s %12.6g\n", name, va);
    };
    std::printf("  %-22s %12s", "metric", label_a);
    if (b) std::printf(" %12s", label_b);
    std::printf("\n");
    row("attitude RMSE [rad]", a.attitude_rmse, b ? b->attitude_rmse : 0);
    row("attitude peak [rad]", a.attitude_peak, b ? b->attitude_peak : 0);
    row("peak time [s]", a.attitude_peak_time, b ? b->attitude_peak_time : 0);
    row("position RMSE [m]", a.position_rmse, b ? b->position_rmse : 0);
    row("episode return", a.episode_return, b ? b->episode_return : 0);
    row("saturated ticks", double(a.saturated_ticks),
        b ? double(b->saturated_ticks) : 0);
}

int cmd_simulate(const std::string& config_path, bool seed_set,
                 std::uint64_t seed, const std::string& gains_mode,
                 const std::string& policy_path, const std::string& out_path) {
    RunConfig cfg = RunConfig::load(config_path);
    if (seed_set) cfg.seed = seed;
    SimTrace trace;
    if (gains_mode == "manual") {
        trace = simulate_manual(cfg);
    } else {
        const PolicyFile pf = load_policy(policy_path);
        trace = simulate_policy(cfg, pf);
    }
    write_trace_csv(trace, out_path);
    cfg.save(out_path + ".config.ini");
    if (trace.fault)
        std::cerr << "warning: simulation fault '" << trace.fault_reason
                  << "', trace truncated at " << trace.rows.size()
                  << " rows\n";
    const MetricsReport m = compute_metrics(trace);
    std::printf("wrote %s (%zu rows, kernels: %s)\n", out_path.c_str(),
                trace.rows.size(), kernels::backend_name(kernels::active_backend()));
    print_metrics_table(gains_mode.c_str(), m, nullptr, nullptr);
    return 0;
}

int cmd_train(const std::string& config_path, bool seed_set, std::uint64_t seed,
              const std::string& policy_out, const std::string& curve_out,
              int max_episodes_override) {
    RunConfig cfg = RunConfig::load(config_path);
    if (seed_set) cfg.seed = seed;
    if (max_episodes_override > 0)
        cfg.agent.max_episodes = max_episodes_override;
    const TrainResult res = train(cfg, cfg.seed);
    const PolicyFile pf = export_policy(res.best_actor, 1.0, -1.0);
    save_policy(pf, policy_out);
    write_curve_csv(res.curve, curve_out);
    cfg.save(curve_out + ".config.ini");
    std::printf("trained %d episode(s), %s (final moving average %.6g)\n",
                res.episodes,
                res.reached_target ? "target reached" : "episode cap reached",
                res.final_moving_average);
    std::printf("best evaluation return %.6g at episode %d\n",
                res.best_eval_return, res.best_eval_episode);
    std::printf("policy written to %s, curve to %s\n", policy_out.c_str(),
                curve_out.c_str());
    return 0;
}

int cmd_evaluate(const std::string& policy_path,
                 const std::string& config_path) {
    const RunConfig cfg = RunConfig::load(config_path);
    const PolicyFile pf = load_policy(policy_path);
    const EvalReport r = evaluate_policy(cfg, pf);
    if (r.baseline_fault)
        std::cerr << "warning: baseline run ended in a simulation fault\n";
    if (r.policy_fault)
        std::cerr << "warning: policy run ended in a simulation fault\n";
    print_metrics_table("manual", r.baseline, "policy", &r.policy);
    std::printf("  attitude RMSE ratio (policy/manual): %.6g\n", r.rmse_ratio);
    std::printf("  improvement: %.2f%%\n", r.improvement_pct);
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    const SimTrace a = read_trace_csv(path_a);
    const SimTrace b = read_trace_csv(path_b);
    const CompareResult r = compare_traces(a, b);
    print_metrics_table("A", r.a, "B", &r.b);
    std::printf("  attitude RMSE delta (B-A): %.6g\n", r.attitude_rmse_delta);
    std::printf("  attitude RMSE improvement (A->B): %.2f%%\n",
                r.attitude_rmse_improvement);
    std::printf("  return delta (B-A): %.6g\n", r.return_delta);
    return 0;
}

int cmd_export(const std::string& in_path, const std::string& out_path) {
    const PolicyFile pf = load_policy(in_path);
    save_policy(pf, out_path);
    std::printf("rewrote %s as %s\n", in_path.c_str(), out_path.c_str());
    return 0;
}

int cmd_reconstruct_check(const std::string& policy_path, int trials,
                          std::uint64_t seed) {
    const PolicyFile pf = load_policy(policy_path);
    const ReconstructReport r = reconstruct_check(pf, trials, seed);
    std::printf("reconstruct-check: %d trial(s)\n", r.trials);
    std::printf("  max deviation: %.17g\n", r.max_abs_deviation);
    std::printf("  round trip bit-exact: %s\n",
                r.round_trip_identical ? "yes" : "no");
    return (r.max_abs_deviation == 0.0 && r.round_trip_identical) ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadrotor flight-dynamics simulator and gain-tuning laboratory"};
    app.set_version_flag("--version", k_version);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the mission and write a CSV trace");
    std::string sim_config, sim_gains = "manual", sim_policy, sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    sim->add_option("--config", sim_config, "run configuration file")->required();
    sim->add_option("--gains", sim_gains, "gain source: manual or policy")
        ->check(CLI::IsMember({"manual", "policy"}));
    sim->add_option("--policy", sim_policy, "policy file (with --gains policy)");
    sim->add_option("--out", sim_out, "output trace CSV")->required();
    sim->add_option("--seed", sim_seed, "override the config seed")
        ->each([&](const std::string&) { sim_seed_set = true; });

    // train
    auto* trn = app.add_subcommand("train", "fine-tune the inner-loop gains online");
    std::string trn_config, trn_policy, trn_curve;
    std::uint64_t trn_seed = 0;
    bool trn_seed_set = false;
    int trn_max_episodes = 0;
    trn->add_option("--config", trn_config, "run configuration file")->required();
    trn->add_option("--seed", trn_seed, "training seed (overrides config)")
        ->each([&](const std::string&) { trn_seed_set = true; });
    trn->add_option("--out-policy", trn_policy, "exported policy path")->required();
    trn->add_option("--curve", trn_curve, "training curve CSV")->required();
    trn->add_option("--max-episodes", trn_max_episodes,
                    "episode cap override (0 = use config)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "compare a policy against the manual baseline");
    std::string ev_policy, ev_config;
    ev->add_option("--policy", ev_policy, "policy file")->required();
    ev->add_option("--config", ev_config, "run configuration file")->required();

    // compare
    auto* cmp = app.add_subcommand("compare", "metrics side-by-side for two traces");
    std::string cmp_a, cmp_b;
    cmp->add_option("trace_a", cmp_a, "first trace CSV")->required();
    cmp->add_option("trace_b", cmp_b, "second trace CSV")->required();

    // export-policy
    auto* exp = app.add_subcommand("export-policy",
                                   "rewrite a policy file (converts between "
                                   "JSON and binary forms by extension)");
    std::string exp_in, exp_out;
    exp->add_option("--in", exp_in, "input policy file")->required();
    exp->add_option("--out", exp_out, "output policy file")->required();

    // reconstruct-check
    auto* rc = app.add_subcommand("reconstruct-check",
                                  "verify deployment inference matches the actor");
    std::string rc_policy;
    int rc_trials = 1000;
    std::uint64_t rc_seed = 1234;
    rc->add_option("--policy", rc_policy, "policy file")->required();
    rc->add_option("--trials", rc_trials, "number of random observations");
    rc->add_option("--seed", rc_seed, "rng seed for observations");

    int rc_code = 0;
    sim->callback([&] {
        if (sim_gains == "policy" && sim_policy.empty())
            throw CLI::RequiredError("--policy (with --gains policy)");
        rc_code = cmd_simulate(sim_config, sim_seed_set, sim_seed, sim_gains,
                               sim_policy, sim_out);
    });
    trn->callback([&] {
        rc_code = cmd_train(trn_config, trn_seed_set, trn_seed, trn_policy,
                            trn_curve, trn_max_episodes);
    });
    ev->callback([&] { rc_code = cmd_evaluate(ev_policy, ev_config); });
    cmp->callback([&] { rc_code = cmd_compare(cmp_a, cmp_b); });
    exp->callback([&] { rc_code = cmd_export(exp_in, exp_out); });
    rc->callback([&] {
        rc_code = cmd_reconstruct_check(rc_policy, rc_trials, rc_seed);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const quadtune::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const quadtune::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return rc_code;
}
