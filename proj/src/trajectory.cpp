#include "quadtune/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace quadtune {

void TrajectoryConfig::validate() const {
    auto bad = [](const std::string& what) {
        throw ConfigError("trajectory: " + what);
    };
    if (!(t_takeoff > 0.0 && t_hover1 > 0.0 && t_circle > 0.0 &&
          t_hover2 > 0.0 && t_land > 0.0))
        bad("all segment durations must be > 0");
    if (!(altitude > 0.0)) bad("altitude must be > 0");
    if (!(radius > 0.0)) bad("radius must be > 0");
}

double mission_duration(const TrajectoryConfig& cfg) {
    return cfg.total_duration();
}

namespace {

// Minimum-jerk 0->1 profile: s(0)=0, s(1)=1, zero velocity and acceleration
// at both ends.
double minjerk(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double minjerk_rate(double u) { return u * u * (30.0 + u * (-60.0 + 30.0 * u)); }

} // namespace

ReferencePoint reference_at(double t, const TrajectoryConfig& cfg) {
    double total = cfg.total_duration();
    // Absorb accumulated grid roundoff at the very end of the mission.
    if (t > total && t < total + 1e-9) t = total;
    if (t < 0.0 || t > total)
        throw std::out_of_range("reference time " + std::to_string(t) +
                                " outside mission [0, " +
                                std::to_string(total) + "]");

    double t1 = cfg.t_takeoff;
    double t2 = t1 + cfg.t_hover1;
    double t3 = t2 + cfg.t_circle;
    double t4 = t3 + cfg.t_hover2;

    ReferencePoint ref;
    ref.position = {cfg.radius, 0.0, 0.0};

    if (t < t1) {
        double u = t / cfg.t_takeoff;
        ref.position.z = cfg.altitude * minjerk(u);
        ref.velocity.z = cfg.altitude * minjerk_rate(u) / cfg.t_takeoff;
    } else if (t < t2) {
        ref.position.z = cfg.altitude;
    } else if (t < t3) {
        double rate = 2.0 * M_PI / cfg.t_circle;
        double lam = rate * (t - t2);
        ref.position = {cfg.radius * std::cos(lam), cfg.radius * std::sin(lam),
                        cfg.altitude};
        ref.velocity = {-cfg.radius * rate * std::sin(lam),
                        cfg.radius * rate * std::cos(lam), 0.0};
        if (cfg.yaw_mode == YawMode::tangent) ref.yaw = lam + M_PI / 2.0;
    } else if (t < t4) {
        ref.position.z = cfg.altitude;
        if (cfg.yaw_mode == YawMode::tangent) ref.yaw = 2.0 * M_PI + M_PI / 2.0;
    } else {
        double u = (t - t4) / cfg.t_land;
        ref.position.z = cfg.altitude * (1.0 - minjerk(u));
        ref.velocity.z = -cfg.altitude * minjerk_rate(u) / cfg.t_land;
        if (cfg.yaw_mode == YawMode::tangent) ref.yaw = 2.0 * M_PI + M_PI / 2.0;
    }
    return ref;
}

} // namespace quadtune
