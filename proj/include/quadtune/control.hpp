#pragma once

#include "quadtune/dynamics.hpp"
#include "quadtune/mixer.hpp"
#include "quadtune/trajectory.hpp"

// Cascaded flight controller. The outer position loop turns position error
// into a collective-thrust command and roll/pitch setpoints; the inner
// attitude loop is a nested P/PD law on Euler rates whose virtual
// acceleration is rendered exact on the nonlinear plant by feedback
// linearization.

namespace quadtune {

struct OuterGains {
    double kp1_z = 8.9;   // altitude -> climb-rate setpoint
    double kp2_z = 19.8;  // climb-rate error -> vertical acceleration
    double kp1_xy = 0.6;  // position -> velocity setpoint
    double kp2_xy = 3.9;  // velocity error -> lateral acceleration
    double kd_xy = 0.29;  // velocity-error derivative

    void validate() const;
};

// The five gains the agent is allowed to scale. Roll and pitch share values.
struct InnerGains {
    double kp1_rollpitch = 4.0;     // angle -> rate setpoint
    double kp1_yaw = 2.0;           // angle -> rate setpoint
    double kp2_rollpitch = 11.467;  // rate error -> virtual acceleration
    double kp2_yaw = 5.4801;        // rate error -> virtual acceleration
    double kd_rollpitch = 0.81905;  // rate-error derivative

    void validate() const;
};

struct GainSet {
    OuterGains outer;
    InnerGains inner;
};

struct ControlParams {
    double tilt_limit = 0.5;          // rad, clamp on roll/pitch setpoints
    double tilt_guard_min = 0.1;      // floor on cos(phi)cos(theta) divisor
    double deriv_filter_tau = 0.02;   // s, first-order filter on derivatives
    double degenerate_thrust_eps = 1e-4; // |tau_t - 1| below this: hold setpoint

    void validate() const;
};

struct AttitudeSetpoint {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

// Discrete-derivative history. One instance per simulated vehicle; reset at
// episode start.
struct ControllerMemory {
    bool outer_primed = false;
    bool inner_primed = false;
    double prev_evx = 0.0, prev_evy = 0.0;   // outer velocity-law errors
    double devx_f = 0.0, devy_f = 0.0;       // filtered derivatives
    double prev_evphi = 0.0, prev_evtheta = 0.0; // inner rate-law errors
    double devphi_f = 0.0, devtheta_f = 0.0;
    AttitudeSetpoint last_setpoint;

    void reset(double yaw_ref = 0.0) {
        *this = ControllerMemory{};
        last_setpoint.yaw = yaw_ref;
    }
};

struct OuterCommand {
    double tau_t = 1.0; // collective virtual control, clamped to [1, 2]
    AttitudeSetpoint setpoint;
    Vec3 accel_cmd;     // (v_x, v_y, v_z) before any clamping, for inspection
    bool thrust_degenerate = false; // inversion skipped, setpoint held
};

OuterCommand outer_loop(const RigidBodyState& s, const ReferencePoint& ref,
                        const OuterGains& gains, ControllerMemory& mem,
                        const QuadrotorParams& params, const ControlParams& cp,
                        double dt);

// Virtual acceleration v = (v_phi, v_theta, v_psi) from the nested P/PD law.
// eta_dot are Euler rates (not body rates).
Vec3 inner_pd(const Vec3& eta, const Vec3& eta_dot, const AttitudeSetpoint& sp,
              const InnerGains& gains, ControllerMemory& mem,
              const ControlParams& cp, double dt);

// Generalized inertia of the Euler-coordinate rotational dynamics:
// B(eta) = W^T I W.
Mat3 generalized_inertia(const Vec3& eta, const QuadrotorParams& params);

// Coriolis matrix from the Christoffel symbols of B, so that
// dB/dt - 2C is skew-symmetric along trajectories.
Mat3 coriolis_matrix(const Vec3& eta, const Vec3& eta_dot,
                     const QuadrotorParams& params);

// Body moment rendering eta_ddot == v on the nominal plant:
// M' = W^{-T} (B v + C eta_dot).
Vec3 feedback_linearize(const Vec3& eta, const Vec3& eta_dot, const Vec3& v,
                        const QuadrotorParams& params);

struct ControlCommand {
    MotorThrusts thrusts;
    AttitudeSetpoint setpoint;
    double tau_t = 1.0;
    bool saturated = false;
    bool thrust_degenerate = false;
};

// Full cascade: outer loop -> inner PD -> feedback linearization -> mixer.
ControlCommand controller_step(const RigidBodyState& s,
                               const ReferencePoint& ref, const GainSet& gains,
                               ControllerMemory& mem,
                               const QuadrotorParams& params,
                               const ControlParams& cp, double dt);

} // namespace quadtune
