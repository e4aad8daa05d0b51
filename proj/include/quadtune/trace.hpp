#pragma once

#include <array>
#include <string>
#include <vector>

// Flight trace: one row per control tick plus a terminal row at mission end,
// with agent-rate fields (gains, action, reward) forward-filled between
// updates. The CSV carries the timing signature in a header comment so that
// read-back and cross-trace comparison can check mission compatibility.

namespace quadtune {

struct TraceRow {
    double t = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    double phi = 0.0, theta = 0.0, psi = 0.0;
    double x_r = 0.0, y_r = 0.0, z_r = 0.0, psi_r = 0.0;
    double e_px = 0.0, e_py = 0.0, e_pz = 0.0;
    double e_phi = 0.0, e_theta = 0.0, e_psi = 0.0;
    double e_eta_norm = 0.0;
    double kp1_pt = 0.0, kp1_psi = 0.0, kp2_pt = 0.0, kp2_psi = 0.0,
           kd_pt = 0.0;
    std::array<double, 5> n{}; // last agent action, forward-filled
    double reward = 0.0;       // last agent reward, forward-filled
    int sat_flag = 0;          // bit 0: motor saturation, bit 1: degenerate thrust
};

struct SimTrace {
    double dt_ctrl = 0.0;
    double dt_agent = 0.0;
    double duration = 0.0; // nominal mission duration
    bool fault = false;
    std::string fault_reason; // single token, empty when fault == false
    std::vector<TraceRow> rows;
};

void write_trace_csv(const SimTrace& trace, const std::string& path);
SimTrace read_trace_csv(const std::string& path); // ConfigError on bad file

struct MetricsReport {
    double attitude_rmse = 0.0;   // RMS of e_eta_norm over all rows
    double attitude_peak = 0.0;   // max e_eta_norm
    double attitude_peak_time = 0.0;
    double position_rmse = 0.0;   // RMS of |e_p|
    double episode_return = 0.0;  // sum of rewards at agent boundaries
    long saturated_ticks = 0;
    std::array<double, 5> gain_min{};
    std::array<double, 5> gain_max{};
};

MetricsReport compute_metrics(const SimTrace& trace); // EmptyTrace

// Headline metric: RMS of the attitude error norm over the trace.
double rmse_attitude(const SimTrace& trace); // EmptyTrace

struct CompareResult {
    MetricsReport a;
    MetricsReport b;
    double attitude_rmse_delta = 0.0;       // b - a
    double attitude_rmse_improvement = 0.0; // (a - b) / a * 100, percent
    double return_delta = 0.0;              // b - a
};

// Requires both traces to share the mission signature (MissionMismatch).
CompareResult compare_traces(const SimTrace& a, const SimTrace& b);

} // namespace quadtune
