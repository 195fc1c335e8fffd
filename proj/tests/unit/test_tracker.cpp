#include <doctest.h>

#include <cmath>
#include <random>

#include "cpv/tracker.hpp"

using namespace cpv;
using optics::Pointing;

namespace {

// noiseless plateau measurement around a planted peak (arc offsets from the
// scan center)
auto plateau(const Pointing& center, double peak_az, double peak_el,
             const optics::AcceptanceProfile& prof) {
    double cos_el = std::cos(deg2rad(center.el_deg));
    return [=](const Pointing& p) {
        optics::AngularOffset off{(p.az_deg - center.az_deg) * cos_el - peak_az,
                                  p.el_deg - center.el_deg - peak_el};
        return 0.2 * optics::transmission(off, prof);
    };
}

}  // namespace

TEST_CASE("astro_pointing quantization") {
    env::SunState sun;
    sun.true_azimuth_deg = 123.4567;
    sun.true_elevation_deg = 30.0;
    sun.astro_azimuth_deg = 123.4567;
    sun.astro_elevation_deg = 30.0;
    auto p = tracker::astro_pointing(sun, 0.01);
    REQUIRE(p.has_value());
    CHECK(p->az_deg == doctest::Approx(123.46).epsilon(1e-12));
    CHECK(p->el_deg == doctest::Approx(30.0));

    sun.astro_azimuth_deg = 123.5567;   // error carried additively
    sun.astro_elevation_deg = 29.8;
    auto q = tracker::astro_pointing(sun, 0.01);
    CHECK(q->az_deg == doctest::Approx(123.56).epsilon(1e-12));
    CHECK(q->el_deg == doctest::Approx(29.8));

    sun.astro_elevation_deg = -1.0;  // parked below horizon
    CHECK_FALSE(tracker::astro_pointing(sun, 0.01).has_value());
}

TEST_CASE("cloudless_check gates on spread and diffuse") {
    std::vector<env::WeatherSample> w;
    for (int k = 0; k < 12; ++k) w.push_back({k * 10, 900.0, 80.0, 20.0});
    CHECK(tracker::cloudless_check(w, 110));

    auto dip = w;
    dip[6].dni_wm2 = 855.0;  // 5% dip
    CHECK_FALSE(tracker::cloudless_check(dip, 110));

    auto hazy = w;
    for (auto& s : hazy) s.diffuse_wm2 = 150.0;
    CHECK_FALSE(tracker::cloudless_check(hazy, 110));

    std::vector<env::WeatherSample> empty;
    CHECK_THROWS_AS(tracker::cloudless_check(std::span<const env::WeatherSample>{}), ConfigError);
    CHECK_FALSE(tracker::cloudless_check(empty, 110));  // series form: no coverage
}

TEST_CASE("scan_align centered symmetric profile picks a near-center node") {
    Pointing center{180.0, 35.0};
    optics::AcceptanceProfile prof;
    tracker::ScanConfig cfg;
    auto res = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, 0.0, 0.0, prof));
    REQUIRE(res.has_value());
    // fine-grid spacing 0.25 leaves no node at the exact center
    CHECK(std::abs(res->offset_az_deg) <= 0.1251);
    CHECK(std::abs(res->offset_el_deg) <= 0.1251);
    CHECK_FALSE(res->at_boundary);
}

TEST_CASE("scan_align recovers an offset peak within grid accuracy") {
    Pointing center{200.0, 25.0};
    optics::AcceptanceProfile prof;
    tracker::ScanConfig cfg;
    auto res = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, 0.5, 0.5, prof));
    REQUIRE(res.has_value());
    CHECK(std::abs(res->offset_az_deg - 0.5) <= 0.15);
    CHECK(std::abs(res->offset_el_deg - 0.5) <= 0.15);
}

TEST_CASE("scan_align clamps an out-of-window peak to the edge with a warning") {
    Pointing center{200.0, 25.0};
    optics::AcceptanceProfile prof;
    tracker::ScanConfig cfg;
    auto res = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, 2.0, 2.0, prof));
    REQUIRE(res.has_value());
    CHECK(res->at_boundary);
    CHECK(res->offset_az_deg == doctest::Approx(1.125));
    CHECK(res->offset_el_deg == doctest::Approx(1.125));
}

TEST_CASE("scan_align signals alignment failure when nothing is measurable") {
    Pointing center{200.0, 25.0};
    tracker::ScanConfig cfg;
    auto res = tracker::scan_align(center, 6.0, cfg, 0.01,
                                   [](const Pointing&) { return 0.0; });
    CHECK_FALSE(res.has_value());
}

TEST_CASE("scan_align tie-breaking is deterministic across runs") {
    Pointing center{180.0, 35.0};
    optics::AcceptanceProfile prof;
    tracker::ScanConfig cfg;
    auto a = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, 0.0, 0.0, prof));
    auto b = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, 0.0, 0.0, prof));
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->offset_az_deg == b->offset_az_deg);
    CHECK(a->offset_el_deg == b->offset_el_deg);
    // first maximum in row-major order resolves the 4-way center tie
    CHECK(a->offset_az_deg == doctest::Approx(-0.125));
    CHECK(a->offset_el_deg == doctest::Approx(-0.125));
}

TEST_CASE("scan_align argmax error stays within one fine-grid step") {
    std::mt19937_64 rng(20220508);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    optics::AcceptanceProfile prof;
    tracker::ScanConfig cfg;
    for (int trial = 0; trial < 25; ++trial) {
        Pointing center{150.0 + trial, 10.0 + 2.0 * trial};
        double px = u(rng), py = u(rng);
        auto res = tracker::scan_align(center, 6.0, cfg, 0.01, plateau(center, px, py, prof));
        REQUIRE(res.has_value());
        double err = std::hypot(res->offset_az_deg - px, res->offset_el_deg - py);
        CHECK(err <= 0.18);
        // measured transmission at the aligned pointing stays near optimum
        double t = plateau(center, px, py, prof)(res->pointing) / 0.2;
        CHECK(t >= 0.999);
    }
}

TEST_CASE("scan grid geometry matches the configured range") {
    tracker::ScanConfig cfg;
    cfg.validate();
    // default coarse nodes at -1.125, -0.375, +0.375, +1.125: measure them
    Pointing center{100.0, 0.0};  // cos(el) = 1 keeps commands equal to arcs
    std::vector<double> seen;
    optics::AcceptanceProfile prof;
    tracker::scan_align(center, 6.0, cfg, 1e-9, [&](const Pointing& p) {
        seen.push_back(p.az_deg - center.az_deg);
        return 0.2 * optics::transmission(
                         optics::AngularOffset{p.az_deg - center.az_deg,
                                               p.el_deg - center.el_deg},
                         prof);
    });
    std::sort(seen.begin(), seen.end());
    CHECK(seen.front() == doctest::Approx(-1.125).epsilon(1e-9));
    CHECK(seen.back() == doctest::Approx(1.125).epsilon(1e-9));

    tracker::ScanConfig bad;
    bad.coarse_n = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.fine_n = 2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.range_deg = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
