#include <doctest.h>

#include <cmath>
#include <random>

#include "cpv/optics.hpp"

using namespace cpv;
using optics::AngularOffset;
using optics::Pointing;

TEST_CASE("angular_deviation identity and equator case") {
    Pointing sun{180.0, 30.0};
    CHECK(optics::angular_deviation(sun, sun, {}) == doctest::Approx(0.0).epsilon(1e-12));

    // at zero elevation an azimuth delta is the full great-circle angle
    Pointing p{180.78, 0.0};
    Pointing s{180.0, 0.0};
    CHECK(optics::angular_deviation(p, s, {}) == doctest::Approx(0.78).epsilon(1e-9));
}

TEST_CASE("angular_deviation matches the spherical law of cosines at elevation") {
    // independent oracle: cos(theta) = sin(e)^2 + cos(e)^2 cos(daz)
    double e = 60.0, daz = 1.0;
    double expected = rad2deg(std::acos(std::sin(deg2rad(e)) * std::sin(deg2rad(e)) +
                                        std::cos(deg2rad(e)) * std::cos(deg2rad(e)) *
                                            std::cos(deg2rad(daz))));
    Pointing p{181.0, 60.0};
    Pointing s{180.0, 60.0};
    CHECK(optics::angular_deviation(p, s, {}) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("great-circle angle is symmetric and obeys the triangle inequality") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> az(0.0, 360.0), el(-80.0, 80.0);
    for (int k = 0; k < 200; ++k) {
        double a1 = az(rng), e1 = el(rng), a2 = az(rng), e2 = el(rng), a3 = az(rng),
               e3 = el(rng);
        double d12 = optics::great_circle_deg(a1, e1, a2, e2);
        double d21 = optics::great_circle_deg(a2, e2, a1, e1);
        CHECK(d12 == doctest::Approx(d21).epsilon(1e-12));
        double d13 = optics::great_circle_deg(a1, e1, a3, e3);
        double d23 = optics::great_circle_deg(a2, e2, a3, e3);
        CHECK(d13 <= d12 + d23 + 1e-9);
    }
}

TEST_CASE("transmission pinned points") {
    optics::AcceptanceProfile prof;  // 0.78 / 0.78 / p = 6

    CHECK(optics::transmission(AngularOffset{0.0, 0.0}, prof) == 1.0);
    CHECK(optics::transmission(AngularOffset{0.78, 0.0}, prof) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(optics::transmission(AngularOffset{0.0, 0.78}, prof) == doctest::Approx(0.9).epsilon(1e-12));

    // theta = 2*theta90 on a circular profile: 0.9^(2^6)
    double expected = std::pow(0.9, 64.0);
    CHECK(optics::transmission(AngularOffset{1.56, 0.0}, prof) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.18e-3).epsilon(0.01));
}

TEST_CASE("transmission scalar form uses the direction decomposition") {
    optics::AcceptanceProfile prof;
    prof.theta90_az_deg = 0.9;
    prof.theta90_el_deg = 0.7;
    // pure elevation deviation of theta90_el must give exactly 0.9
    CHECK(optics::transmission(0.7, prof, 0.0, 1.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(optics::transmission(0.9, prof, 1.0, 0.0) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("transmission monotone non-increasing along rays") {
    optics::AcceptanceProfile prof;
    prof.theta90_az_deg = 0.9;
    prof.theta90_el_deg = 0.7;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    for (int ray = 0; ray < 25; ++ray) {
        double a = phi(rng);
        double prev = 2.0;
        for (double t = 0.0; t <= 3.0; t += 0.01) {
            double v = optics::transmission(
                AngularOffset{t * std::cos(a), t * std::sin(a)}, prof);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("the 90% locus is the (theta90_az, theta90_el) ellipse") {
    optics::AcceptanceProfile prof;
    prof.theta90_az_deg = 0.9;
    prof.theta90_el_deg = 0.7;
    // any point with unit elliptical norm transmits exactly 0.9
    for (double a = 0.0; a < 2.0 * kPi; a += 0.1) {
        AngularOffset off{prof.theta90_az_deg * std::cos(a), prof.theta90_el_deg * std::sin(a)};
        CHECK(optics::transmission(off, prof) == doctest::Approx(0.9).epsilon(1e-12));
    }
}

TEST_CASE("calibrate_optics inverts the photocurrent chain") {
    // reference sub-module A inputs
    double eta = optics::calibrate_optics(0.196, 13.24, 0.0655, 250.0);
    CHECK(eta == doctest::Approx(1.0045).epsilon(2e-4));

    // exact identity case
    double target = 13.24e-3 * 0.0655 * 250.0 * 0.9;
    CHECK(optics::calibrate_optics(target, 13.24, 0.0655, 250.0) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // defective reference device inputs
    CHECK(optics::calibrate_optics(0.144, 12.75, 0.0655, 250.0) ==
          doctest::Approx(0.766).epsilon(1e-3));

    CHECK_THROWS_AS(optics::calibrate_optics(0.196, 0.0, 0.0655, 250.0), ConfigError);
    CHECK_THROWS_AS(optics::calibrate_optics(0.196, 13.24, 0.0, 250.0), ConfigError);
}

TEST_CASE("arc_shift round-trips through pointing_offset") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> off(-1.5, 1.5), el(5.0, 65.0);
    for (int k = 0; k < 100; ++k) {
        Pointing sun{200.0, el(rng)};
        double a = off(rng), e = off(rng);
        Pointing p = optics::arc_shift(sun, a, e);
        AngularOffset rec = optics::pointing_offset(p, sun, {});
        // azimuth arcs anchor at slightly different elevations going out
        // and back, a second-order effect that grows with elevation
        CHECK(rec.az_deg == doctest::Approx(a).epsilon(0.03));
        CHECK(rec.el_deg == doctest::Approx(e).epsilon(1e-9));
        // magnitude agrees with the exact great-circle deviation
        double dev = optics::angular_deviation(p, sun, {});
        CHECK(rec.magnitude_deg() == doctest::Approx(dev).epsilon(1e-3));
    }
}

TEST_CASE("mount offset shifts the optical axis") {
    Pointing sun{180.0, 40.0};
    optics::MountOffset m{0.5, 0.5};
    // pointing exactly "mount offset" beyond the sun centers the module
    Pointing corrected = optics::arc_shift(sun, m.d_az_deg, m.d_el_deg);
    CHECK(optics::angular_deviation(corrected, sun, m) < 1e-9);
    // pointing straight at the sun leaves (nearly) the full offset as
    // deviation; the anchor elevation shifts it at second order
    CHECK(optics::angular_deviation(sun, sun, m) ==
          doctest::Approx(std::hypot(0.5, 0.5)).epsilon(5e-3));
}

TEST_CASE("profile and mount validation") {
    optics::AcceptanceProfile bad;
    bad.theta90_az_deg = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.shape_exponent = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    optics::MountOffset m{95.0, 0.0};
    CHECK_THROWS_AS(m.validate(), ConfigError);
}
