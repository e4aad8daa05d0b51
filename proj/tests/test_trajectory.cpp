#include <doctest.h>

#include "quadtune/trajectory.hpp"

#include <cmath>
#include <stdexcept>

using namespace quadtune;

namespace {
constexpr double k_pi = 3.14159265358979323846;
const TrajectoryConfig k_cfg; // defaults: 10/2.5/20/2.5/10 s, alt 5, radius 3
} // namespace

TEST_CASE("mission bookkeeping") {
    CHECK(mission_duration(k_cfg) == 45.0);
    CHECK(k_cfg.total_duration() == 45.0);
    CHECK_NOTHROW(k_cfg.validate());
    TrajectoryConfig bad = k_cfg;
    bad.radius = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    TrajectoryConfig bad2 = k_cfg;
    bad2.t_circle = -1.0;
    CHECK_THROWS_AS(bad2.validate(), ConfigError);
}

TEST_CASE("frozen waypoints along the default mission") {
    // start: on the rim, on the ground, at rest
    ReferencePoint r = reference_at(0.0, k_cfg);
    CHECK(r.position.x == 3.0);
    CHECK(r.position.y == 0.0);
    CHECK(r.position.z == 0.0);
    CHECK(r.velocity.norm() == 0.0);
    CHECK(r.yaw == 0.0);

    // quarter takeoff, smooth profile: s(0.25) = 0.103515625
    r = reference_at(2.5, k_cfg);
    CHECK(r.position.z == doctest::Approx(5.0 * 0.103515625).epsilon(1e-15));

    // mid takeoff: half altitude, peak climb rate 1.875 * 5 / 10
    r = reference_at(5.0, k_cfg);
    CHECK(r.position.z == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.velocity.z == doctest::Approx(0.9375).epsilon(1e-15));

    // first hover window
    for (double t : {10.0, 11.0, 12.4}) {
        r = reference_at(t, k_cfg);
        CHECK(r.position.x == 3.0);
        CHECK(r.position.z == 5.0);
        CHECK(r.velocity.norm() == 0.0);
    }

    // circle entry: position continuous, tangential speed appears at once
    r = reference_at(12.5, k_cfg);
    CHECK(r.position.x == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(r.position.y) < 1e-12);
    CHECK(r.velocity.x == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(r.velocity.y == doctest::Approx(0.9424777960769379).epsilon(1e-14));

    // quarter lap: (0, 3, 5), heading -x
    r = reference_at(17.5, k_cfg);
    CHECK(std::abs(r.position.x) < 1e-12);
    CHECK(r.position.y == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(r.velocity.x == doctest::Approx(-0.9424777960769379).epsilon(1e-14));

    // half lap: (-3, 0, 5)
    r = reference_at(22.5, k_cfg);
    CHECK(r.position.x == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(std::abs(r.position.y) < 1e-12);

    // three quarters: (0, -3, 5)
    r = reference_at(27.5, k_cfg);
    CHECK(r.position.y == doctest::Approx(-3.0).epsilon(1e-14));

    // lap done, second hover
    for (double t : {32.5, 34.0}) {
        r = reference_at(t, k_cfg);
        CHECK(r.position.x == 3.0);
        CHECK(r.position.y == 0.0);
        CHECK(r.position.z == 5.0);
        CHECK(r.velocity.norm() == 0.0);
    }

    // mid landing: half altitude, peak sink rate
    r = reference_at(40.0, k_cfg);
    CHECK(r.position.z == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.velocity.z == doctest::Approx(-0.9375).epsilon(1e-15));

    // touchdown
    r = reference_at(45.0, k_cfg);
    CHECK(r.position.x == 3.0);
    CHECK(r.position.z == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.velocity.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("circle segment invariants") {
    const double speed = 3.0 * 2.0 * k_pi / 20.0;
    for (double t = 12.6; t < 32.5; t += 0.37) {
        const ReferencePoint r = reference_at(t, k_cfg);
        const double rad =
            std::sqrt(r.position.x * r.position.x + r.position.y * r.position.y);
        CHECK(rad == doctest::Approx(3.0).epsilon(1e-13));
        CHECK(r.position.z == 5.0);
        CHECK(r.velocity.norm() == doctest::Approx(speed).epsilon(1e-13));
        // velocity is tangential: perpendicular to the radius vector
        const double dot =
            r.position.x * r.velocity.x + r.position.y * r.velocity.y;
        CHECK(std::abs(dot) < 1e-12);
        // counterclockwise: angular momentum about +z is positive
        const double lz =
            r.position.x * r.velocity.y - r.position.y * r.velocity.x;
        CHECK(lz > 0.0);
    }
}

TEST_CASE("position is continuous at every segment boundary") {
    for (double tb : {10.0, 12.5, 32.5, 35.0}) {
        const ReferencePoint a = reference_at(tb - 1e-9, k_cfg);
        const ReferencePoint b = reference_at(tb + 1e-9, k_cfg);
        CHECK((a.position - b.position).norm() < 1e-8);
    }
    // the velocity jumps live only at circle entry and exit
    const double speed = 3.0 * 2.0 * k_pi / 20.0;
    CHECK((reference_at(12.5 + 1e-9, k_cfg).velocity -
           reference_at(12.5 - 1e-9, k_cfg).velocity)
              .norm() == doctest::Approx(speed).epsilon(1e-6));
    CHECK((reference_at(32.5 + 1e-9, k_cfg).velocity -
           reference_at(32.5 - 1e-9, k_cfg).velocity)
              .norm() == doctest::Approx(speed).epsilon(1e-6));
    CHECK((reference_at(10.0 + 1e-9, k_cfg).velocity -
           reference_at(10.0 - 1e-9, k_cfg).velocity)
              .norm() < 1e-7);
}

TEST_CASE("takeoff climbs monotonically") {
    double prev = -1.0;
    for (double t = 0.0; t <= 10.0; t += 0.25) {
        const double z = reference_at(t, k_cfg).position.z;
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("yaw modes") {
    // default: zero yaw everywhere
    for (double t = 0.0; t <= 45.0; t += 1.7)
        CHECK(reference_at(t, k_cfg).yaw == 0.0);

    TrajectoryConfig tang = k_cfg;
    tang.yaw_mode = YawMode::tangent;
    CHECK(reference_at(5.0, tang).yaw == 0.0);
    CHECK(reference_at(12.5, tang).yaw == doctest::Approx(k_pi / 2).epsilon(1e-14));
    CHECK(reference_at(22.5, tang).yaw ==
          doctest::Approx(k_pi + k_pi / 2).epsilon(1e-14));
    // after the lap the heading is held, unwrapped past 2 pi
    CHECK(reference_at(40.0, tang).yaw ==
          doctest::Approx(2.0 * k_pi + k_pi / 2).epsilon(1e-14));
}

TEST_CASE("out-of-range times are rejected, end roundoff is absorbed") {
    CHECK_THROWS_AS(reference_at(-0.1, k_cfg), std::out_of_range);
    CHECK_THROWS_AS(reference_at(45.1, k_cfg), std::out_of_range);
    CHECK_NOTHROW(reference_at(45.0 + 5e-10, k_cfg));
    const ReferencePoint r = reference_at(45.0 + 5e-10, k_cfg);
    CHECK(r.position.z == doctest::Approx(0.0).epsilon(1e-15));
}
