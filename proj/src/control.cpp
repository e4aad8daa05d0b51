#include "quadtune/control.hpp"

#include <algorithm>
#include <cmath>

namespace quadtune {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw ConfigError(std::string("gain ") + name + " must be > 0");
}

// First-order low-pass on a backward difference; keeps the D terms from
// amplifying the zero-order-hold steps of the discrete loop.
double filtered_diff(double err, double& prev, double& filt, double dt,
                     double tau) {
    double raw = (err - prev) / dt;
    prev = err;
    double alpha = dt / (tau + dt);
    filt += alpha * (raw - filt);
    return filt;
}

} // namespace

void OuterGains::validate() const {
    require_positive(kp1_z, "kp1_z");
    require_positive(kp2_z, "kp2_z");
    require_positive(kp1_xy, "kp1_xy");
    require_positive(kp2_xy, "kp2_xy");
    require_positive(kd_xy, "kd_xy");
}

void InnerGains::validate() const {
    require_positive(kp1_rollpitch, "kp1_rollpitch");
    require_positive(kp1_yaw, "kp1_yaw");
    require_positive(kp2_rollpitch, "kp2_rollpitch");
    require_positive(kp2_yaw, "kp2_yaw");
    require_positive(kd_rollpitch, "kd_rollpitch");
}

void ControlParams::validate() const {
    if (!(tilt_limit > 0.0 && tilt_limit < M_PI / 2.0))
        throw ConfigError("tilt_limit must be in (0, pi/2)");
    if (!(tilt_guard_min > 0.0 && tilt_guard_min <= 1.0))
        throw ConfigError("tilt_guard_min must be in (0, 1]");
    if (!(deriv_filter_tau >= 0.0))
        throw ConfigError("deriv_filter_tau must be >= 0");
    if (!(degenerate_thrust_eps > 0.0))
        throw ConfigError("degenerate_thrust_eps must be > 0");
}

OuterCommand outer_loop(const RigidBodyState& s, const ReferencePoint& ref,
                        const OuterGains& gains, ControllerMemory& mem,
                        const QuadrotorParams& params, const ControlParams& cp,
                        double dt) {
    OuterCommand out;

    // Altitude channel: nested P laws, no derivative term.
    double evz = gains.kp1_z * (ref.position.z - s.position.z) - s.velocity.z;
    double vz = gains.kp2_z * evz;

    // Lateral channels: nested P plus filtered derivative.
    double evx = gains.kp1_xy * (ref.position.x - s.position.x) - s.velocity.x;
    double evy = gains.kp1_xy * (ref.position.y - s.position.y) - s.velocity.y;
    if (!mem.outer_primed) {
        mem.prev_evx = evx;
        mem.prev_evy = evy;
        mem.outer_primed = true;
    }
    double dx = filtered_diff(evx, mem.prev_evx, mem.devx_f, dt,
                              cp.deriv_filter_tau);
    double dy = filtered_diff(evy, mem.prev_evy, mem.devy_f, dt,
                              cp.deriv_filter_tau);
    double vx = gains.kp2_xy * evx + gains.kd_xy * dx;
    double vy = gains.kp2_xy * evy + gains.kd_xy * dy;
    out.accel_cmd = {vx, vy, vz};

    // Collective: invert the vertical dynamics, guarded against large tilt.
    double tilt = std::cos(s.euler.x) * std::cos(s.euler.y);
    tilt = std::max(tilt, cp.tilt_guard_min);
    double four_tmax = 4.0 * params.max_motor_thrust;
    double tau_t = 1.0 + params.mass * (params.gravity + vz) / (four_tmax * tilt);
    out.tau_t = std::clamp(tau_t, 1.0, 2.0);

    // Roll/pitch setpoints: invert the small-angle lateral force map at the
    // current yaw. Near-zero collective makes the map singular; hold the
    // previous setpoint instead of inverting noise.
    out.setpoint.yaw = ref.yaw;
    if (std::fabs(out.tau_t - 1.0) < cp.degenerate_thrust_eps) {
        out.thrust_degenerate = true;
        out.setpoint = mem.last_setpoint;
        out.setpoint.yaw = ref.yaw;
    } else {
        double thrust = four_tmax * (out.tau_t - 1.0);
        double m_over_t = params.mass / thrust;
        double spsi = std::sin(s.euler.z), cpsi = std::cos(s.euler.z);
        double phi_r = m_over_t * (spsi * vx - cpsi * vy);
        double theta_r = m_over_t * (cpsi * vx + spsi * vy);
        out.setpoint.roll = std::clamp(phi_r, -cp.tilt_limit, cp.tilt_limit);
        out.setpoint.pitch = std::clamp(theta_r, -cp.tilt_limit, cp.tilt_limit);
    }
    mem.last_setpoint = out.setpoint;
    return out;
}

Vec3 inner_pd(const Vec3& eta, const Vec3& eta_dot, const AttitudeSetpoint& sp,
              const InnerGains& gains, ControllerMemory& mem,
              const ControlParams& cp, double dt) {
    double evphi = gains.kp1_rollpitch * (sp.roll - eta.x) - eta_dot.x;
    double evtheta = gains.kp1_rollpitch * (sp.pitch - eta.y) - eta_dot.y;
    double evpsi = gains.kp1_yaw * (sp.yaw - eta.z) - eta_dot.z;

    if (!mem.inner_primed) {
        mem.prev_evphi = evphi;
        mem.prev_evtheta = evtheta;
        mem.inner_primed = true;
    }
    double dphi = filtered_diff(evphi, mem.prev_evphi, mem.devphi_f, dt,
                                cp.deriv_filter_tau);
    double dtheta = filtered_diff(evtheta, mem.prev_evtheta, mem.devtheta_f,
                                  dt, cp.deriv_filter_tau);

    return {gains.kp2_rollpitch * evphi + gains.kd_rollpitch * dphi,
            gains.kp2_rollpitch * evtheta + gains.kd_rollpitch * dtheta,
            gains.kp2_yaw * evpsi};
}

Mat3 generalized_inertia(const Vec3& eta, const QuadrotorParams& params) {
    Mat3 w = euler_rates_to_body_rates(eta);
    return w.transpose() * Mat3::diag(params.inertia) * w;
}

namespace {

// dW/dphi and dW/dtheta for W = euler_rates_to_body_rates (dW/dpsi = 0).
void euler_map_partials(const Vec3& eta, Mat3& dw_dphi, Mat3& dw_dtheta) {
    double cf = std::cos(eta.x), sf = std::sin(eta.x);
    double ct = std::cos(eta.y), st = std::sin(eta.y);
    dw_dphi = Mat3{};
    dw_dphi(1, 1) = -sf; dw_dphi(1, 2) = cf * ct;
    dw_dphi(2, 1) = -cf; dw_dphi(2, 2) = -sf * ct;
    dw_dtheta = Mat3{};
    dw_dtheta(0, 2) = -ct;
    dw_dtheta(1, 2) = -sf * st;
    dw_dtheta(2, 2) = -cf * st;
}

} // namespace

Mat3 coriolis_matrix(const Vec3& eta, const Vec3& eta_dot,
                     const QuadrotorParams& params) {
    Mat3 w = euler_rates_to_body_rates(eta);
    Mat3 iw = Mat3::diag(params.inertia) * w;

    Mat3 dw_dphi, dw_dtheta;
    euler_map_partials(eta, dw_dphi, dw_dtheta);

    // dB/dq_k = (dW/dq_k)^T I W + W^T I (dW/dq_k); the psi partial vanishes.
    Mat3 db[3];
    db[0] = dw_dphi.transpose() * iw + iw.transpose() * dw_dphi;
    db[1] = dw_dtheta.transpose() * iw + iw.transpose() * dw_dtheta;
    db[2] = Mat3{};

    // Christoffel symbols of the first kind contracted with eta_dot:
    // C_ij = 1/2 sum_k (dB_ij/dq_k + dB_ik/dq_j - dB_jk/dq_i) etadot_k.
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double sum = 0.0;
            for (int k = 0; k < 3; ++k)
                sum += (db[k](i, j) + db[j](i, k) - db[i](j, k)) * eta_dot[k];
            c(i, j) = 0.5 * sum;
        }
    return c;
}

Vec3 feedback_linearize(const Vec3& eta, const Vec3& eta_dot, const Vec3& v,
                        const QuadrotorParams& params) {
    Mat3 b = generalized_inertia(eta, params);
    Mat3 c = coriolis_matrix(eta, eta_dot, params);
    // W^{-T} = (W^{-1})^T, and W^{-1} is the body-to-Euler rate map.
    Mat3 winv_t = body_rates_to_euler_rates(eta).transpose();
    return winv_t * (b * v + c * eta_dot);
}

ControlCommand controller_step(const RigidBodyState& s,
                               const ReferencePoint& ref, const GainSet& gains,
                               ControllerMemory& mem,
                               const QuadrotorParams& params,
                               const ControlParams& cp, double dt) {
    OuterCommand oc = outer_loop(s, ref, gains.outer, mem, params, cp, dt);

    Vec3 eta_dot = body_rates_to_euler_rates(s.euler) * s.body_rates;
    Vec3 v = inner_pd(s.euler, eta_dot, oc.setpoint, gains.inner, mem, cp, dt);
    Vec3 moment = feedback_linearize(s.euler, eta_dot, v, params);

    BodyWrench w;
    w.thrust = 4.0 * params.max_motor_thrust * (oc.tau_t - 1.0);
    w.moment = moment;
    MixResult mix = wrench_to_thrusts(w, params);

    ControlCommand cmd;
    cmd.thrusts = mix.thrusts;
    cmd.setpoint = oc.setpoint;
    cmd.tau_t = oc.tau_t;
    cmd.saturated = mix.saturated;
    cmd.thrust_degenerate = oc.thrust_degenerate;
    return cmd;
}

} // namespace quadtune
