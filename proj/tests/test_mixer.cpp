#include <doctest.h>

#include "quadtune/mixer.hpp"

#include <random>

using namespace quadtune;

TEST_CASE("equal thrusts produce pure collective lift") {
    const QuadrotorParams p;
    MotorThrusts t;
    t.t = {2.0, 2.0, 2.0, 2.0};
    const BodyWrench w = thrusts_to_wrench(t, p);
    CHECK(w.thrust == doctest::Approx(8.0));
    CHECK(w.moment.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.moment.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.moment.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("differential pair rolls without pitch or yaw") {
    const QuadrotorParams p;
    MotorThrusts t;
    t.t = {1.0, 2.0, 2.0, 1.0}; // motors 2,3 spun up
    const BodyWrench w = thrusts_to_wrench(t, p);
    // 2 * (sqrt(2)/2 * 0.225) N m, worked by hand
    CHECK(w.thrust == doctest::Approx(6.0));
    CHECK(w.moment.x == doctest::Approx(0.31819805153394637).epsilon(1e-13));
    CHECK(w.moment.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.moment.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("drag torque pairs motors across the spin split") {
    const QuadrotorParams p;
    MotorThrusts t;
    t.t = {3.0, 3.0, 1.0, 1.0};
    const BodyWrench w = thrusts_to_wrench(t, p);
    CHECK(w.thrust == doctest::Approx(8.0));
    CHECK(w.moment.z == doctest::Approx(0.0237 * 4.0).epsilon(1e-13));
    CHECK(w.moment.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.moment.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("virtual controls map to the documented wrench") {
    const QuadrotorParams p;
    CHECK(virtual_to_wrench({1.0, 0, 0, 0}, p).thrust ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(virtual_to_wrench({2.0, 0, 0, 0}, p).thrust ==
          doctest::Approx(4.0 * 8.43).epsilon(1e-15));

    // hover: tau_t = 1 + m g / (4 T_max) must give exactly m g of thrust
    const double tau_hover = 1.0 + p.mass * p.gravity / (4.0 * p.max_motor_thrust);
    CHECK(virtual_to_wrench({tau_hover, 0, 0, 0}, p).thrust ==
          doctest::Approx(p.mass * p.gravity).epsilon(1e-14));

    // positive tau_r commands a negative roll moment (hand-worked value)
    const BodyWrench wr = virtual_to_wrench({1.0, 0.1, 0, 0}, p);
    CHECK(wr.moment.x == doctest::Approx(-0.5364819148862337).epsilon(1e-13));
    CHECK(wr.moment.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(wr.moment.z == doctest::Approx(0.0).epsilon(1e-15));

    // positive tau_y commands a positive yaw moment
    const BodyWrench wy = virtual_to_wrench({1.0, 0, 0, 0.05}, p);
    CHECK(wy.moment.z == doctest::Approx(4.0 * 8.43 * 0.05 * 0.0237).epsilon(1e-13));
}

TEST_CASE("mixer inverse round-trips random in-range thrusts") {
    const QuadrotorParams p;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 8.0);
    for (int i = 0; i < 500; ++i) {
        MotorThrusts t;
        for (double& ti : t.t) ti = u(rng);
        const MixResult back = wrench_to_thrusts(thrusts_to_wrench(t, p), p);
        CHECK_FALSE(back.saturated);
        for (int m = 0; m < 4; ++m)
            CHECK(back.thrusts.t[m] == doctest::Approx(t.t[m]).epsilon(1e-12));
    }
}

TEST_CASE("wrench round-trips through thrusts when feasible") {
    const QuadrotorParams p;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> th(8.0, 20.0);
    std::uniform_real_distribution<double> mom(-0.15, 0.15);
    std::uniform_real_distribution<double> yaw(-0.04, 0.04);
    for (int i = 0; i < 500; ++i) {
        BodyWrench w;
        w.thrust = th(rng);
        w.moment = {mom(rng), mom(rng), yaw(rng)};
        const MixResult mr = wrench_to_thrusts(w, p);
        REQUIRE_FALSE(mr.saturated);
        const BodyWrench w2 = thrusts_to_wrench(mr.thrusts, p);
        CHECK(w2.thrust == doctest::Approx(w.thrust).epsilon(1e-12));
        CHECK(w2.moment.x == doctest::Approx(w.moment.x).epsilon(1e-10));
        CHECK(w2.moment.y == doctest::Approx(w.moment.y).epsilon(1e-10));
        CHECK(w2.moment.z == doctest::Approx(w.moment.z).epsilon(1e-10));
    }
}

TEST_CASE("saturation clamps and flags") {
    const QuadrotorParams p;

    // over-collective: all motors pinned at T_max
    BodyWrench big;
    big.thrust = 100.0;
    const MixResult hi = wrench_to_thrusts(big, p);
    CHECK(hi.saturated);
    for (double ti : hi.thrusts.t) CHECK(ti == p.max_motor_thrust);

    // negative collective: all motors pinned at zero
    BodyWrench neg;
    neg.thrust = -5.0;
    const MixResult lo = wrench_to_thrusts(neg, p);
    CHECK(lo.saturated);
    for (double ti : lo.thrusts.t) CHECK(ti == 0.0);

    // asymmetric: an oversized roll request clamps only the affected pair
    BodyWrench roll;
    roll.thrust = 12.0;
    roll.moment.x = 5.0;
    const MixResult rr = wrench_to_thrusts(roll, p);
    CHECK(rr.saturated);
    for (double ti : rr.thrusts.t) {
        CHECK(ti >= 0.0);
        CHECK(ti <= p.max_motor_thrust);
    }

    // in-range request never trips the flag
    BodyWrench ok;
    ok.thrust = 11.772;
    const MixResult fine = wrench_to_thrusts(ok, p);
    CHECK_FALSE(fine.saturated);
}
