#include "quadtune/trace.hpp"

#include "quadtune/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace quadtune {

namespace {

constexpr const char* k_header =
    "t,x,y,z,phi,theta,psi,x_r,y_r,z_r,psi_r,e_px,e_py,e_pz,e_phi,e_theta,"
    "e_psi,e_eta_norm,kp1_pt,kp1_psi,kp2_pt,kp2_psi,kd_pt,n1,n2,n3,n4,n5,"
    "reward,sat_flag";

constexpr int k_columns = 30;

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open trace file for writing: " + path);
    std::string line;
    line.reserve(1024);
    line = "# quadtune-trace v1 dt_ctrl=";
    put(line, trace.dt_ctrl);
    line += " dt_agent=";
    put(line, trace.dt_agent);
    line += " duration=";
    put(line, trace.duration);
    line += " fault=";
    line += trace.fault ? '1' : '0';
    if (trace.fault && !trace.fault_reason.empty()) {
        line += " reason=";
        line += trace.fault_reason;
    }
    os << line << '\n' << k_header << '\n';
    for (const TraceRow& r : trace.rows) {
        line.clear();
        put(line, r.t); line += ',';
        put(line, r.x); line += ',';
        put(line, r.y); line += ',';
        put(line, r.z); line += ',';
        put(line, r.phi); line += ',';
        put(line, r.theta); line += ',';
        put(line, r.psi); line += ',';
        put(line, r.x_r); line += ',';
        put(line, r.y_r); line += ',';
        put(line, r.z_r); line += ',';
        put(line, r.psi_r); line += ',';
        put(line, r.e_px); line += ',';
        put(line, r.e_py); line += ',';
        put(line, r.e_pz); line += ',';
        put(line, r.e_phi); line += ',';
        put(line, r.e_theta); line += ',';
        put(line, r.e_psi); line += ',';
        put(line, r.e_eta_norm); line += ',';
        put(line, r.kp1_pt); line += ',';
        put(line, r.kp1_psi); line += ',';
        put(line, r.kp2_pt); line += ',';
        put(line, r.kp2_psi); line += ',';
        put(line, r.kd_pt); line += ',';
        for (double ni : r.n) { put(line, ni); line += ','; }
        put(line, r.reward); line += ',';
        line += std::to_string(r.sat_flag);
        os << line << '\n';
    }
    if (!os) throw ConfigError("failed writing trace file: " + path);
}

namespace {

double meta_double(const std::string& header, const char* key,
                   const std::string& path) {
    const std::string tag = std::string(key) + "=";
    const std::size_t pos = header.find(tag);
    if (pos == std::string::npos)
        throw ConfigError("trace header missing '" + std::string(key) +
                          "' in " + path);
    char* end = nullptr;
    const char* start = header.c_str() + pos + tag.size();
    const double v = std::strtod(start, &end);
    if (end == start)
        throw ConfigError("trace header has bad '" + std::string(key) +
                          "' in " + path);
    return v;
}

} // namespace

SimTrace read_trace_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("# quadtune-trace v1", 0) != 0)
        throw ConfigError("not a quadtune trace file: " + path);
    SimTrace tr;
    tr.dt_ctrl = meta_double(line, "dt_ctrl", path);
    tr.dt_agent = meta_double(line, "dt_agent", path);
    tr.duration = meta_double(line, "duration", path);
    {
        const std::size_t pos = line.find("fault=");
        if (pos != std::string::npos) tr.fault = line[pos + 6] == '1';
        const std::size_t rp = line.find("reason=");
        if (rp != std::string::npos) {
            std::size_t end = line.find(' ', rp);
            tr.fault_reason = line.substr(rp + 7, end == std::string::npos
                                                      ? std::string::npos
                                                      : end - rp - 7);
        }
    }
    if (!std::getline(is, line) || line != k_header)
        throw ConfigError("unexpected trace column header in " + path);
    int line_no = 2;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        TraceRow r;
        double f[k_columns];
        const char* p = line.c_str();
        for (int c = 0; c < k_columns; ++c) {
            char* end = nullptr;
            f[c] = std::strtod(p, &end);
            if (end == p)
                throw ConfigError("bad trace field at line " +
                                  std::to_string(line_no) + " in " + path);
            p = end;
            if (c + 1 < k_columns) {
                if (*p != ',')
                    throw ConfigError("expected comma at line " +
                                      std::to_string(line_no) + " in " + path);
                ++p;
            }
        }
        if (*p != '\0' && *p != '\r')
            throw ConfigError("trailing junk at line " + std::to_string(line_no) +
                              " in " + path);
        int c = 0;
        r.t = f[c++]; r.x = f[c++]; r.y = f[c++]; r.z = f[c++];
        r.phi = f[c++]; r.theta = f[c++]; r.psi = f[c++];
        r.x_r = f[c++]; r.y_r = f[c++]; r.z_r = f[c++]; r.psi_r = f[c++];
        r.e_px = f[c++]; r.e_py = f[c++]; r.e_pz = f[c++];
        r.e_phi = f[c++]; r.e_theta = f[c++]; r.e_psi = f[c++];
        r.e_eta_norm = f[c++];
        r.kp1_pt = f[c++]; r.kp1_psi = f[c++]; r.kp2_pt = f[c++];
        r.kp2_psi = f[c++]; r.kd_pt = f[c++];
        for (auto& ni : r.n) ni = f[c++];
        r.reward = f[c++];
        r.sat_flag = int(f[c++]);
        tr.rows.push_back(r);
    }
    return tr;
}

MetricsReport compute_metrics(const SimTrace& trace) {
    if (trace.rows.empty()) throw EmptyTrace("trace has no rows");
    if (!(trace.dt_ctrl > 0.0) || !(trace.dt_agent > 0.0))
        throw EmptyTrace("trace lacks a timing signature");
    MetricsReport m;
    double sum_eta2 = 0.0;
    double sum_pos2 = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        m.gain_min[i] = 1e300;
        m.gain_max[i] = -1e300;
    }
    const double stride_d = trace.dt_agent / trace.dt_ctrl;
    const long stride = std::lround(stride_d);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const TraceRow& r = trace.rows[i];
        sum_eta2 += r.e_eta_norm * r.e_eta_norm;
        sum_pos2 += r.e_px * r.e_px + r.e_py * r.e_py + r.e_pz * r.e_pz;
        if (r.e_eta_norm > m.attitude_peak) {
            m.attitude_peak = r.e_eta_norm;
            m.attitude_peak_time = r.t;
        }
        if (r.sat_flag & 1) ++m.saturated_ticks;
        const double g[5] = {r.kp1_pt, r.kp1_psi, r.kp2_pt, r.kp2_psi, r.kd_pt};
        for (int k = 0; k < 5; ++k) {
            m.gain_min[std::size_t(k)] = std::min(m.gain_min[std::size_t(k)], g[k]);
            m.gain_max[std::size_t(k)] = std::max(m.gain_max[std::size_t(k)], g[k]);
        }
        if (stride > 0 && i > 0 && long(i) % stride == 0)
            m.episode_return += r.reward;
    }
    m.attitude_rmse = std::sqrt(sum_eta2 / double(trace.rows.size()));
    m.position_rmse = std::sqrt(sum_pos2 / double(trace.rows.size()));
    return m;
}

double rmse_attitude(const SimTrace& trace) {
    if (trace.rows.empty()) throw EmptyTrace("trace has no rows");
    double sum = 0.0;
    for (const TraceRow& r : trace.rows) sum += r.e_eta_norm * r.e_eta_norm;
    return std::sqrt(sum / double(trace.rows.size()));
}

CompareResult compare_traces(const SimTrace& a, const SimTrace& b) {
    const double tol = 1e-12;
    if (std::abs(a.dt_ctrl - b.dt_ctrl) > tol ||
        std::abs(a.dt_agent - b.dt_agent) > tol ||
        std::abs(a.duration - b.duration) > tol)
        throw MissionMismatch("traces were recorded over different missions");
    CompareResult r;
    r.a = compute_metrics(a);
    r.b = compute_metrics(b);
    r.attitude_rmse_delta = r.b.attitude_rmse - r.a.attitude_rmse;
    r.attitude_rmse_improvement =
        r.a.attitude_rmse > 0.0
            ? (r.a.attitude_rmse - r.b.attitude_rmse) / r.a.attitude_rmse * 100.0
            : 0.0;
    r.return_delta = r.b.episode_return - r.a.episode_return;
    return r;
}

} // namespace quadtune
