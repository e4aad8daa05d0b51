#include "quadtune/dynamics.hpp"

#include <cmath>
#include <string>

namespace quadtune {

void QuadrotorParams::validate() const {
    auto bad = [](const std::string& what) {
        throw ConfigError("quadrotor params: " + what);
    };
    if (!(mass > 0.0)) bad("mass must be > 0");
    if (!(gravity >= 0.0)) bad("gravity must be >= 0");
    if (!(arm_length > 0.0)) bad("arm_length must be > 0");
    if (!(inertia.x > 0.0 && inertia.y > 0.0 && inertia.z > 0.0))
        bad("inertia diagonal must be > 0");
    if (!(max_motor_thrust > 0.0)) bad("max_motor_thrust must be > 0");
    if (!(drag_ratio > 0.0)) bad("drag_ratio must be > 0");
}

Mat3 skew(const Vec3& a) {
    Mat3 s;
    s(0, 1) = -a.z; s(0, 2) = a.y;
    s(1, 0) = a.z;  s(1, 2) = -a.x;
    s(2, 0) = -a.y; s(2, 1) = a.x;
    return s;
}

Mat3 rotation_matrix(const Vec3& euler) {
    double cf = std::cos(euler.x), sf = std::sin(euler.x);
    double ct = std::cos(euler.y), st = std::sin(euler.y);
    double cp = std::cos(euler.z), sp = std::sin(euler.z);
    Mat3 r;
    r(0, 0) = cp * ct; r(0, 1) = cp * st * sf - sp * cf; r(0, 2) = cp * st * cf + sp * sf;
    r(1, 0) = sp * ct; r(1, 1) = sp * st * sf + cp * cf; r(1, 2) = sp * st * cf - cp * sf;
    r(2, 0) = -st;     r(2, 1) = ct * sf;                r(2, 2) = ct * cf;
    return r;
}

namespace {

void check_pitch(const Vec3& euler) {
    if (std::fabs(euler.y) >= M_PI / 2.0 - 1e-6)
        throw SingularAttitude("pitch " + std::to_string(euler.y) +
                               " rad is too close to +-pi/2");
}

} // namespace

Mat3 body_rates_to_euler_rates(const Vec3& euler) {
    check_pitch(euler);
    double cf = std::cos(euler.x), sf = std::sin(euler.x);
    double ct = std::cos(euler.y), tt = std::tan(euler.y);
    Mat3 w;
    w(0, 0) = 1.0; w(0, 1) = sf * tt;  w(0, 2) = cf * tt;
    w(1, 0) = 0.0; w(1, 1) = cf;       w(1, 2) = -sf;
    w(2, 0) = 0.0; w(2, 1) = sf / ct;  w(2, 2) = cf / ct;
    return w;
}

Mat3 euler_rates_to_body_rates(const Vec3& euler) {
    check_pitch(euler);
    double cf = std::cos(euler.x), sf = std::sin(euler.x);
    double ct = std::cos(euler.y), st = std::sin(euler.y);
    Mat3 w;
    w(0, 0) = 1.0; w(0, 1) = 0.0; w(0, 2) = -st;
    w(1, 0) = 0.0; w(1, 1) = cf;  w(1, 2) = sf * ct;
    w(2, 0) = 0.0; w(2, 1) = -sf; w(2, 2) = cf * ct;
    return w;
}

RigidBodyState state_derivative(const RigidBodyState& s, const BodyWrench& u,
                                const QuadrotorParams& params,
                                const Disturbance& dist) {
    RigidBodyState d;
    d.position = s.velocity;

    // Thrust acts along body +z; gravity along world -z.
    Mat3 r = rotation_matrix(s.euler);
    Vec3 thrust_world = {r(0, 2) * u.thrust, r(1, 2) * u.thrust,
                         r(2, 2) * u.thrust};
    double inv_m = 1.0 / params.mass;
    d.velocity = (thrust_world + dist.force_world) * inv_m;
    d.velocity.z -= params.gravity;

    d.euler = body_rates_to_euler_rates(s.euler) * s.body_rates;

    // Euler's equation with diagonal inertia.
    const Vec3& w = s.body_rates;
    Vec3 iw = {params.inertia.x * w.x, params.inertia.y * w.y,
               params.inertia.z * w.z};
    Vec3 m = u.moment + dist.moment_body - cross(w, iw);
    d.body_rates = {m.x / params.inertia.x, m.y / params.inertia.y,
                    m.z / params.inertia.z};
    return d;
}

namespace {

RigidBodyState axpy(const RigidBodyState& s, double a,
                    const RigidBodyState& d) {
    RigidBodyState r;
    r.position = s.position + d.position * a;
    r.velocity = s.velocity + d.velocity * a;
    r.euler = s.euler + d.euler * a;
    r.body_rates = s.body_rates + d.body_rates * a;
    return r;
}

} // namespace

RigidBodyState step_rk4(const RigidBodyState& s, const BodyWrench& u,
                        double dt, const QuadrotorParams& params,
                        const Disturbance& dist) {
    RigidBodyState k1 = state_derivative(s, u, params, dist);
    RigidBodyState k2 = state_derivative(axpy(s, dt / 2.0, k1), u, params, dist);
    RigidBodyState k3 = state_derivative(axpy(s, dt / 2.0, k2), u, params, dist);
    RigidBodyState k4 = state_derivative(axpy(s, dt, k3), u, params, dist);

    RigidBodyState out = s;
    double w = dt / 6.0;
    out.position += (k1.position + (k2.position + k3.position) * 2.0 + k4.position) * w;
    out.velocity += (k1.velocity + (k2.velocity + k3.velocity) * 2.0 + k4.velocity) * w;
    out.euler += (k1.euler + (k2.euler + k3.euler) * 2.0 + k4.euler) * w;
    out.body_rates += (k1.body_rates + (k2.body_rates + k3.body_rates) * 2.0 + k4.body_rates) * w;

    if (!out.all_finite())
        throw NonFiniteState("state became non-finite during integration");
    return out;
}

} // namespace quadtune
