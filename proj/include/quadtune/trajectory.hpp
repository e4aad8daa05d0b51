#pragma once

#include "quadtune/errors.hpp"
#include "quadtune/linalg.hpp"

// Reference generator for the benchmark mission: vertical takeoff above the
// circle's rim, hover, one counterclockwise lap, hover, vertical landing.

namespace quadtune {

enum class YawMode {
    constant_zero, // psi_r = 0 throughout
    tangent,       // psi_r follows the circle tangent during the lap
};

struct TrajectoryConfig {
    double t_takeoff = 10.0;
    double t_hover1 = 2.5;
    double t_circle = 20.0;
    double t_hover2 = 2.5;
    double t_land = 10.0;
    double altitude = 5.0; // m
    double radius = 3.0;   // m
    YawMode yaw_mode = YawMode::constant_zero;

    void validate() const; // throws ConfigError
    double total_duration() const {
        return t_takeoff + t_hover1 + t_circle + t_hover2 + t_land;
    }
};

struct ReferencePoint {
    Vec3 position;
    Vec3 velocity;
    double yaw = 0.0;
};

// Throws std::out_of_range for t outside [0, total]. Position is continuous
// everywhere; velocity jumps at the circle entry/exit instants (the lap runs
// at constant angular rate), which is what excites the tracking-error spikes
// there.
ReferencePoint reference_at(double t, const TrajectoryConfig& cfg);

double mission_duration(const TrajectoryConfig& cfg);

} // namespace quadtune
