#include "quadtune/config.hpp"

#include "quadtune/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace quadtune {

void DisturbanceConfig::validate() const {
    if (force_sigma < 0.0 || moment_sigma < 0.0)
        throw ConfigError("disturbance sigmas must be non-negative");
    if (!std::isfinite(force_sigma) || !std::isfinite(moment_sigma))
        throw ConfigError("disturbance sigmas must be finite");
}

void AgentConfig::validate() const {
    if (!(dt_agent > 0.0)) throw ConfigError("dt_agent must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ConfigError("gamma must lie in [0, 1]");
    if (!(lr_actor > 0.0) || !(lr_critic > 0.0))
        throw ConfigError("learning rates must be positive");
    if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
    if (!(soft_update_tau > 0.0 && soft_update_tau <= 1.0))
        throw ConfigError("soft_update_tau must lie in (0, 1]");
    if (!(search_rate > 0.0 && search_rate < 1.0))
        throw ConfigError("search_rate must lie in (0, 1) to keep gains positive");
    if (sigma0 < 0.0) throw ConfigError("sigma0 must be non-negative");
    if (!(sigma_decay > 0.0 && sigma_decay <= 1.0))
        throw ConfigError("sigma_decay must lie in (0, 1]");
    if (!std::isfinite(target_return))
        throw ConfigError("target_return must be finite");
    if (batch < 1) throw ConfigError("batch must be at least 1");
    if (buffer_capacity < batch)
        throw ConfigError("buffer_capacity must be at least batch");
    if (max_episodes < 1) throw ConfigError("max_episodes must be at least 1");
    if (ma_window < 1) throw ConfigError("ma_window must be at least 1");
    if (eval_period < 1) throw ConfigError("eval_period must be at least 1");
    if (hidden_units < 1) throw ConfigError("hidden_units must be at least 1");
}

namespace {

int exact_ratio(double big, double small, const char* what) {
    const double r = big / small;
    const double rr = std::round(r);
    if (rr < 1.0 || std::abs(r - rr) > 1e-9 * std::max(1.0, rr))
        throw ConfigError(std::string(what) +
                          " must be an integer multiple (got ratio " +
                          std::to_string(r) + ")");
    return int(rr);
}

} // namespace

void RunConfig::validate() const {
    quad.validate();
    gains.outer.validate();
    gains.inner.validate();
    control.validate();
    trajectory.validate();
    agent.validate();
    disturbance.validate();
    if (!(dt_physics > 0.0)) throw ConfigError("dt_physics must be positive");
    if (!(dt_ctrl > 0.0)) throw ConfigError("dt_ctrl must be positive");
    exact_ratio(dt_ctrl, dt_physics, "dt_ctrl / dt_physics");
    exact_ratio(agent.dt_agent, dt_ctrl, "dt_agent / dt_ctrl");
    exact_ratio(trajectory.total_duration(), agent.dt_agent,
                "mission duration / dt_agent");
}

int RunConfig::physics_per_ctrl() const {
    return exact_ratio(dt_ctrl, dt_physics, "dt_ctrl / dt_physics");
}

int RunConfig::ctrl_per_agent() const {
    return exact_ratio(agent.dt_agent, dt_ctrl, "dt_agent / dt_ctrl");
}

int RunConfig::agent_steps() const {
    return exact_ratio(trajectory.total_duration(), agent.dt_agent,
                       "mission duration / dt_agent");
}

RunConfig RunConfig::defaults() { return RunConfig{}; }

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, int line) {
    throw ConfigError("bad value for '" + key + "' at line " +
                      std::to_string(line));
}

double parse_double(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        bad_value(key, line);
    return x;
}

long parse_long(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') bad_value(key, line);
    return x;
}

int parse_int(const std::string& key, const std::string& v, int line) {
    return int(parse_long(key, v, line));
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') bad_value(key, line);
    return std::uint64_t(x);
}

bool parse_bool(const std::string& key, const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, line);
}

void apply_kv(RunConfig& c, const std::string& sec, const std::string& key,
              const std::string& v, int line) {
    const std::string full = sec + "." + key;
    auto d = [&] { return parse_double(full, v, line); };
    auto i = [&] { return parse_int(full, v, line); };

    if (sec == "quad") {
        if (key == "mass") c.quad.mass = d();
        else if (key == "gravity") c.quad.gravity = d();
        else if (key == "arm_length") c.quad.arm_length = d();
        else if (key == "inertia_x") c.quad.inertia.x = d();
        else if (key == "inertia_y") c.quad.inertia.y = d();
        else if (key == "inertia_z") c.quad.inertia.z = d();
        else if (key == "max_motor_thrust") c.quad.max_motor_thrust = d();
        else if (key == "drag_ratio") c.quad.drag_ratio = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "outer_gains") {
        auto& g = c.gains.outer;
        if (key == "kp1_z") g.kp1_z = d();
        else if (key == "kp2_z") g.kp2_z = d();
        else if (key == "kp1_xy") g.kp1_xy = d();
        else if (key == "kp2_xy") g.kp2_xy = d();
        else if (key == "kd_xy") g.kd_xy = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "inner_gains") {
        auto& g = c.gains.inner;
        if (key == "kp1_rollpitch") g.kp1_rollpitch = d();
        else if (key == "kp1_yaw") g.kp1_yaw = d();
        else if (key == "kp2_rollpitch") g.kp2_rollpitch = d();
        else if (key == "kp2_yaw") g.kp2_yaw = d();
        else if (key == "kd_rollpitch") g.kd_rollpitch = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "control") {
        if (key == "tilt_limit") c.control.tilt_limit = d();
        else if (key == "tilt_guard_min") c.control.tilt_guard_min = d();
        else if (key == "deriv_filter_tau") c.control.deriv_filter_tau = d();
        else if (key == "degenerate_thrust_eps")
            c.control.degenerate_thrust_eps = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "trajectory") {
        auto& t = c.trajectory;
        if (key == "t_takeoff") t.t_takeoff = d();
        else if (key == "t_hover1") t.t_hover1 = d();
        else if (key == "t_circle") t.t_circle = d();
        else if (key == "t_hover2") t.t_hover2 = d();
        else if (key == "t_land") t.t_land = d();
        else if (key == "altitude") t.altitude = d();
        else if (key == "radius") t.radius = d();
        else if (key == "yaw_mode") {
            if (v == "constant_zero") t.yaw_mode = YawMode::constant_zero;
            else if (v == "tangent") t.yaw_mode = YawMode::tangent;
            else bad_value(full, line);
        } else throw ConfigError("unknown key '" + full + "' at line " +
                                 std::to_string(line));
    } else if (sec == "timing") {
        if (key == "dt_physics") c.dt_physics = d();
        else if (key == "dt_ctrl") c.dt_ctrl = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "agent") {
        auto& a = c.agent;
        if (key == "dt_agent") a.dt_agent = d();
        else if (key == "gamma") a.gamma = d();
        else if (key == "lr_actor") a.lr_actor = d();
        else if (key == "lr_critic") a.lr_critic = d();
        else if (key == "l2") a.l2 = d();
        else if (key == "adam_eps") a.adam_eps = d();
        else if (key == "soft_update_tau") a.soft_update_tau = d();
        else if (key == "search_rate") a.search_rate = d();
        else if (key == "sigma0") a.sigma0 = d();
        else if (key == "sigma_decay") a.sigma_decay = d();
        else if (key == "target_return") a.target_return = d();
        else if (key == "batch") a.batch = i();
        else if (key == "buffer_capacity") a.buffer_capacity = parse_long(full, v, line);
        else if (key == "max_episodes") a.max_episodes = i();
        else if (key == "ma_window") a.ma_window = i();
        else if (key == "eval_period") a.eval_period = i();
        else if (key == "hidden_units") a.hidden_units = i();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "disturbance") {
        if (key == "enabled") c.disturbance.enabled = parse_bool(full, v, line);
        else if (key == "force_sigma") c.disturbance.force_sigma = d();
        else if (key == "moment_sigma") c.disturbance.moment_sigma = d();
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else if (sec == "run") {
        if (key == "seed") c.seed = parse_u64(full, v, line);
        else throw ConfigError("unknown key '" + full + "' at line " +
                               std::to_string(line));
    } else {
        throw ConfigError("unknown section '[" + sec + "]' at line " +
                          std::to_string(line));
    }
}

} // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg = defaults();
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("malformed section header at line " +
                                  std::to_string(line));
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError("empty section name at line " +
                                  std::to_string(line));
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value' at line " +
                              std::to_string(line));
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("expected 'key = value' at line " +
                              std::to_string(line));
        if (section.empty())
            throw ConfigError("key outside of any section at line " +
                              std::to_string(line));
        apply_kv(cfg, section, key, value, line);
    }
    cfg.validate();
    return cfg;
}

namespace {

std::string d2s(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void RunConfig::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open config file for writing: " + path);
    os << "# quadtune run configuration\n\n";
    os << "[quad]\n";
    os << "mass = " << d2s(quad.mass) << "\n";
    os << "gravity = " << d2s(quad.gravity) << "\n";
    os << "arm_length = " << d2s(quad.arm_length) << "\n";
    os << "inertia_x = " << d2s(quad.inertia.x) << "\n";
    os << "inertia_y = " << d2s(quad.inertia.y) << "\n";
    os << "inertia_z = " << d2s(quad.inertia.z) << "\n";
    os << "max_motor_thrust = " << d2s(quad.max_motor_thrust) << "\n";
    os << "drag_ratio = " << d2s(quad.drag_ratio) << "\n\n";
    os << "[outer_gains]\n";
    os << "kp1_z = " << d2s(gains.outer.kp1_z) << "\n";
    os << "kp2_z = " << d2s(gains.outer.kp2_z) << "\n";
    os << "kp1_xy = " << d2s(gains.outer.kp1_xy) << "\n";
    os << "kp2_xy = " << d2s(gains.outer.kp2_xy) << "\n";
    os << "kd_xy = " << d2s(gains.outer.kd_xy) << "\n\n";
    os << "[inner_gains]\n";
    os << "kp1_rollpitch = " << d2s(gains.inner.kp1_rollpitch) << "\n";
    os << "kp1_yaw = " << d2s(gains.inner.kp1_yaw) << "\n";
    os << "kp2_rollpitch = " << d2s(gains.inner.kp2_rollpitch) << "\n";
    os << "kp2_yaw = " << d2s(gains.inner.kp2_yaw) << "\n";
    os << "kd_rollpitch = " << d2s(gains.inner.kd_rollpitch) << "\n\n";
    os << "[control]\n";
    os << "tilt_limit = " << d2s(control.tilt_limit) << "\n";
    os << "tilt_guard_min = " << d2s(control.tilt_guard_min) << "\n";
    os << "deriv_filter_tau = " << d2s(control.deriv_filter_tau) << "\n";
    os << "degenerate_thrust_eps = " << d2s(control.degenerate_thrust_eps)
       << "\n\n";
    os << "[trajectory]\n";
    os << "t_takeoff = " << d2s(trajectory.t_takeoff) << "\n";
    os << "t_hover1 = " << d2s(trajectory.t_hover1) << "\n";
    os << "t_circle = " << d2s(trajectory.t_circle) << "\n";
    os << "t_hover2 = " << d2s(trajectory.t_hover2) << "\n";
    os << "t_land = " << d2s(trajectory.t_land) << "\n";
    os << "altitude = " << d2s(trajectory.altitude) << "\n";
    os << "radius = " << d2s(trajectory.radius) << "\n";
    os << "yaw_mode = "
       << (trajectory.yaw_mode == YawMode::tangent ? "tangent" : "constant_zero")
       << "\n\n";
    os << "[timing]\n";
    os << "dt_physics = " << d2s(dt_physics) << "\n";
    os << "dt_ctrl = " << d2s(dt_ctrl) << "\n\n";
    os << "[agent]\n";
    os << "dt_agent = " << d2s(agent.dt_agent) << "\n";
    os << "gamma = " << d2s(agent.gamma) << "\n";
    os << "lr_actor = " << d2s(agent.lr_actor) << "\n";
    os << "lr_critic = " << d2s(agent.lr_critic) << "\n";
    os << "l2 = " << d2s(agent.l2) << "\n";
    os << "adam_eps = " << d2s(agent.adam_eps) << "\n";
    os << "soft_update_tau = " << d2s(agent.soft_update_tau) << "\n";
    os << "search_rate = " << d2s(agent.search_rate) << "\n";
    os << "sigma0 = " << d2s(agent.sigma0) << "\n";
    os << "sigma_decay = " << d2s(agent.sigma_decay) << "\n";
    os << "target_return = " << d2s(agent.target_return) << "\n";
    os << "batch = " << agent.batch << "\n";
    os << "buffer_capacity = " << agent.buffer_capacity << "\n";
    os << "max_episodes = " << agent.max_episodes << "\n";
    os << "ma_window = " << agent.ma_window << "\n";
    os << "eval_period = " << agent.eval_period << "\n";
    os << "hidden_units = " << agent.hidden_units << "\n\n";
    os << "[disturbance]\n";
    os << "enabled = " << (disturbance.enabled ? "true" : "false") << "\n";
    os << "force_sigma = " << d2s(disturbance.force_sigma) << "\n";
    os << "moment_sigma = " << d2s(disturbance.moment_sigma) << "\n\n";
    os << "[run]\n";
    os << "seed = " << seed << "\n";
    if (!os) throw ConfigError("failed writing config file: " + path);
}

} // namespace quadtune
