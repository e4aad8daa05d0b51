#include "quadtune/mixer.hpp"

#include <algorithm>
#include <cmath>

namespace quadtune {

namespace {
const double k_sqrt2_over_2 = std::sqrt(2.0) / 2.0;
}

BodyWrench thrusts_to_wrench(const MotorThrusts& t, const QuadrotorParams& params) {
    double c1 = k_sqrt2_over_2 * params.arm_length;
    BodyWrench w;
    w.thrust = t.t[0] + t.t[1] + t.t[2] + t.t[3];
    w.moment.x = c1 * (t.t[1] + t.t[2] - t.t[0] - t.t[3]);
    w.moment.y = c1 * (t.t[0] + t.t[2] - t.t[1] - t.t[3]);
    w.moment.z = params.drag_ratio * (t.t[0] + t.t[1] - t.t[2] - t.t[3]);
    return w;
}

BodyWrench virtual_to_wrench(const VirtualControls& vc, const QuadrotorParams& params) {
    double four_tmax = 4.0 * params.max_motor_thrust;
    BodyWrench w;
    w.thrust = four_tmax * (vc.tau_t - 1.0);
    w.moment.x = -four_tmax * vc.tau_r * (params.arm_length * k_sqrt2_over_2);
    w.moment.y = -four_tmax * vc.tau_p * (params.arm_length * k_sqrt2_over_2);
    w.moment.z = four_tmax * vc.tau_y * params.drag_ratio;
    return w;
}

MixResult wrench_to_thrusts(const BodyWrench& w, const QuadrotorParams& params) {
    // The mixing matrix has mutually orthogonal rows, so the inverse is a
    // scaled transpose: each motor sees T/4 plus signed quarter-shares of
    // the three moments.
    double mp = w.moment.x / (k_sqrt2_over_2 * params.arm_length);
    double mq = w.moment.y / (k_sqrt2_over_2 * params.arm_length);
    double mr = w.moment.z / params.drag_ratio;

    MixResult out;
    out.thrusts.t[0] = 0.25 * (w.thrust - mp + mq + mr);
    out.thrusts.t[1] = 0.25 * (w.thrust + mp - mq + mr);
    out.thrusts.t[2] = 0.25 * (w.thrust + mp + mq - mr);
    out.thrusts.t[3] = 0.25 * (w.thrust - mp - mq - mr);

    for (double& ti : out.thrusts.t) {
        if (ti < 0.0 || ti > params.max_motor_thrust) {
            out.saturated = true;
            ti = std::clamp(ti, 0.0, params.max_motor_thrust);
        }
    }
    return out;
}

} // namespace quadtune
