#pragma once

#include "quadtune/errors.hpp"
#include "quadtune/linalg.hpp"

// Rigid-body model of a small X-frame quadrotor. World frame is ENU
// (z up, gravity pulls -z); the body frame has z along the collective
// thrust axis. Attitude is ZYX Euler (roll phi, pitch theta, yaw psi).

namespace quadtune {

struct QuadrotorParams {
    double mass = 1.2;              // kg, all-up
    double gravity = 9.81;          // m/s^2
    double arm_length = 0.225;      // m, hub to motor axis
    Vec3 inertia = {0.0131, 0.0131, 0.0234}; // kg m^2, principal (body axes)
    double max_motor_thrust = 8.43; // N per motor
    double drag_ratio = 0.0237;     // rotor drag / lift coefficient

    // Throws ConfigError on non-physical values.
    void validate() const;
};

struct RigidBodyState {
    Vec3 position;   // m, world
    Vec3 velocity;   // m/s, world
    Vec3 euler;      // rad, (phi, theta, psi)
    Vec3 body_rates; // rad/s, body frame (p, q, r)

    bool all_finite() const {
        return position.all_finite() && velocity.all_finite() &&
               euler.all_finite() && body_rates.all_finite();
    }
};

// Net rotor action on the body: collective thrust along body +z plus a
// body-frame moment.
struct BodyWrench {
    double thrust = 0.0; // N
    Vec3 moment;         // N m, body frame
};

// Extra force/moment injected per step for robustness experiments.
struct Disturbance {
    Vec3 force_world;
    Vec3 moment_body;
};

// skew(a) * b == cross(a, b)
Mat3 skew(const Vec3& a);

// Body-to-world rotation, R = Rz(psi) * Ry(theta) * Rx(phi).
Mat3 rotation_matrix(const Vec3& euler);

// Maps body rates to Euler-angle rates: eta_dot = this * omega.
// Throws SingularAttitude when |theta| >= pi/2 - 1e-6.
Mat3 body_rates_to_euler_rates(const Vec3& euler);

// Inverse map: omega = this * eta_dot. Same singularity guard.
Mat3 euler_rates_to_body_rates(const Vec3& euler);

// Time derivative of the full state under the given wrench. The returned
// struct reuses the state slots: position <- p_dot, velocity <- v_dot,
// euler <- eta_dot, body_rates <- omega_dot.
RigidBodyState state_derivative(const RigidBodyState& s, const BodyWrench& u,
                                const QuadrotorParams& params,
                                const Disturbance& dist = {});

// One classic RK4 step with the wrench held constant across the substeps.
// Throws NonFiniteState if the result contains NaN/inf.
RigidBodyState step_rk4(const RigidBodyState& s, const BodyWrench& u,
                        double dt, const QuadrotorParams& params,
                        const Disturbance& dist = {});

} // namespace quadtune
