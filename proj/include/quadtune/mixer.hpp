#pragma once

#include "quadtune/dynamics.hpp"

#include <array>

// X-configuration thrust mixing: per-motor thrusts <-> body wrench <-> the
// adimensional virtual controls used by the outer loop.

namespace quadtune {

struct MotorThrusts {
    std::array<double, 4> t{}; // N, motors 1..4 = t[0]..t[3]
};

// tau_t = 1 maps to zero collective thrust, 2 to all motors at max.
struct VirtualControls {
    double tau_t = 1.0;
    double tau_r = 0.0;
    double tau_p = 0.0;
    double tau_y = 0.0;
};

struct MixResult {
    MotorThrusts thrusts;
    bool saturated = false; // any motor clamped to [0, T_max]
};

BodyWrench thrusts_to_wrench(const MotorThrusts& t, const QuadrotorParams& params);

BodyWrench virtual_to_wrench(const VirtualControls& vc, const QuadrotorParams& params);

// Analytic inverse of the mixing map, with per-motor clamping to [0, T_max].
MixResult wrench_to_thrusts(const BodyWrench& w, const QuadrotorParams& params);

} // namespace quadtune
