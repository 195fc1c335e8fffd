#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "cpv/campaign.hpp"

using namespace cpv;

namespace {

cell::SubModuleSpec make_submodule(const std::string& id, double target_isc_900_ma) {
    cell::SubModuleSpec s;
    s.id = id;
    s.jsc_eqe_ma_per_cm2 = 13.24;
    s.cell_area_cm2 = 0.0655;
    s.c_geo = 250.0;
    s.eta_opt = optics::calibrate_optics(target_isc_900_ma * 1e-3, 13.24, 0.0655, 250.0);
    s.diode = cell::calibrate_diode(2.85, target_isc_900_ma * 1e-3, 0.0848, 1.27, 5000.0);
    return s;
}

campaign::CampaignSetup hour_setup() {
    campaign::CampaignSetup setup;
    setup.day.day_start = parse_iso8601_utc("2022-08-20T14:00:00Z");
    setup.day.day_length_s = 3600.0;
    setup.day.peak_elevation_deg = 45.0;
    setup.day.astro_error_az_deg = 0.2;
    setup.day.astro_error_el_deg = 0.3;
    for (const char* id : {"A", "B", "C", "D"}) setup.submodules.push_back(make_submodule(id, 190.0));
    return setup;
}

// steady clear sky: every cycle passes the cloudless and stability gates
std::vector<env::WeatherSample> steady_weather(const campaign::CampaignSetup& setup) {
    std::vector<env::WeatherSample> w;
    for (int day = 0; day < setup.day.n_days; ++day) {
        std::int64_t t0 = setup.day.day_start + static_cast<std::int64_t>(day) * 86400;
        for (std::int64_t t = t0;
             t <= t0 + static_cast<std::int64_t>(setup.day.day_length_s); t += 10)
            w.push_back({t, 900.0, 80.0, 20.0});
    }
    return w;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("one clear hour yields floor(3600/196) cycles of 4 records") {
    auto setup = hour_setup();
    auto weather = steady_weather(setup);
    auto result = campaign::run_campaign(setup, weather);
    CHECK(result.records.size() == 18 * 4);

    // per-cycle record count equals the number of sub-modules
    std::map<std::int64_t, int> per_cycle;
    for (const auto& r : result.records) {
        std::int64_t cycle =
            (r.timestamp - setup.day.day_start) / static_cast<std::int64_t>(196);
        per_cycle[cycle]++;
    }
    for (const auto& [cycle, n] : per_cycle) CHECK(n == 4);
}

TEST_CASE("a cloud covering a cycle skips all four slots with reasons") {
    auto setup = hour_setup();
    auto weather = steady_weather(setup);
    // cover cycle 5 fully, including the trailing stability window
    std::int64_t ev_start = setup.day.day_start + 5 * 196 - 150;
    std::int64_t ev_end = setup.day.day_start + 6 * 196;
    for (auto& w : weather)
        if (w.timestamp >= ev_start && w.timestamp <= ev_end) {
            w.dni_wm2 = 60.0;
            w.diffuse_wm2 = 280.0;
        }
    auto result = campaign::run_campaign(setup, weather);

    int cloudy = 0;
    for (const auto& s : result.skips)
        if (s.reason == "cloudy sky" && s.timestamp >= ev_start && s.timestamp <= ev_end) ++cloudy;
    CHECK(cloudy >= 4);
    for (const auto& r : result.records) {
        bool in_cloudy_cycle = r.timestamp >= setup.day.day_start + 5 * 196 &&
                               r.timestamp < setup.day.day_start + 6 * 196;
        CHECK_FALSE(in_cloudy_cycle);
    }
}

TEST_CASE("open-loop pointing with a large mount offset loses nearly all signal") {
    auto setup = hour_setup();
    setup.day.astro_error_az_deg = 0.0;
    setup.day.astro_error_el_deg = 0.0;
    for (auto& s : setup.submodules) s.mount_offset = {1.25, 3.5};
    // widen (and refine) the scan so the closed loop can reach the
    // displaced peak: 10x10 measured positions over a 9 degree range
    setup.scan.range_deg = 9.0;
    setup.scan.coarse_n = 10;
    setup.scan.fine_n = 37;
    auto weather = steady_weather(setup);

    setup.config.mode_schedule = {{0, tracker::Mode::OpenLoop}};
    auto open_loop = campaign::run_campaign(setup, weather);

    setup.config.mode_schedule = {{0, tracker::Mode::ScanAlign}};
    auto scanned = campaign::run_campaign(setup, weather);

    REQUIRE_FALSE(scanned.records.empty());
    // open loop: deviation ~3.7 deg kills the transmission entirely; most
    // slots cannot even produce a curve
    double scan_isc = scanned.records.front().summary.isc_a;
    CHECK(scan_isc > 0.15);
    for (const auto& r : open_loop.records) CHECK(r.summary.isc_a < 0.01 * scan_isc);
    CHECK(open_loop.records.size() + open_loop.skips.size() >= scanned.records.size());

    // closed loop recovers the offset to within the refined grid spacing
    for (const auto& r : scanned.records) CHECK(r.deviation_deg < 0.4);
}

TEST_CASE("weather snapshot is frozen within a slot and near the record time") {
    auto setup = hour_setup();
    auto weather = steady_weather(setup);
    auto result = campaign::run_campaign(setup, weather);
    for (const auto& r : result.records) {
        CHECK(r.timestamp - r.weather.timestamp <= 10);
        CHECK(r.timestamp - r.weather.timestamp >= 0);
    }
}

TEST_CASE("campaign terminates cleanly when weather runs out") {
    auto setup = hour_setup();
    auto weather = steady_weather(setup);
    weather.resize(weather.size() / 2);  // half the hour
    auto result = campaign::run_campaign(setup, weather);
    CHECK(result.records.size() < 18 * 4);
    CHECK_FALSE(result.records.empty());
}

TEST_CASE("log replay is byte-identical and read round-trips") {
    auto setup = hour_setup();
    setup.isc_noise_a = 5e-5;  // exercise the noise path determinism too
    auto weather = steady_weather(setup);

    auto tmp = std::filesystem::temp_directory_path();
    auto r1 = campaign::run_campaign(setup, weather);
    auto r2 = campaign::run_campaign(setup, weather);
    campaign::write_measurement_log(r1.records, (tmp / "log1.csv").string());
    campaign::write_measurement_log(r2.records, (tmp / "log2.csv").string());
    CHECK(slurp((tmp / "log1.csv").string()) == slurp((tmp / "log2.csv").string()));

    auto loaded = campaign::read_measurement_log((tmp / "log1.csv").string());
    REQUIRE(loaded.size() == r1.records.size());
    for (std::size_t k = 0; k < loaded.size(); k += 13) {
        CHECK(loaded[k].timestamp == r1.records[k].timestamp);
        CHECK(loaded[k].submodule_id == r1.records[k].submodule_id);
        CHECK(loaded[k].summary.isc_a ==
              doctest::Approx(r1.records[k].summary.isc_a).epsilon(1e-7));
        CHECK(loaded[k].summary.ff == doctest::Approx(r1.records[k].summary.ff).epsilon(1e-7));
        CHECK(loaded[k].mode == r1.records[k].mode);
    }
}

TEST_CASE("acceptance session grid count and peak location") {
    auto setup = hour_setup();
    setup.day.astro_error_az_deg = 0.0;
    setup.day.astro_error_el_deg = 0.0;
    setup.day.day_length_s = 36000.0;  // room for the full session
    setup.submodules[0].mount_offset = {0.5, 0.5};
    auto weather = steady_weather(setup);

    campaign::SessionConfig session;
    session.submodule_id = "A";
    session.start_time = setup.day.day_start + 6000;
    session.frame_deg = 3.0;
    session.step_deg = 0.25;
    auto out = campaign::run_acceptance_session(setup, session, weather);
    CHECK(out.complete);
    CHECK_FALSE(out.degenerate);
    REQUIRE(out.samples.size() == 13 * 13);

    // peak of the normalized map sits at the grid node nearest the mount offset
    const campaign::AcceptanceSample* best = &out.samples.front();
    for (const auto& s : out.samples)
        if (s.isc_over_dni > best->isc_over_dni) best = &s;
    CHECK(best->daz_deg == doctest::Approx(0.5));
    CHECK(best->del_deg == doctest::Approx(0.5));
}

TEST_CASE("acceptance session aborts on cloud with partial data flagged") {
    auto setup = hour_setup();
    setup.day.day_length_s = 36000.0;
    auto weather = steady_weather(setup);
    std::int64_t ev_start = setup.day.day_start + 6000 + 400;  // mid-session
    for (auto& w : weather)
        if (w.timestamp >= ev_start && w.timestamp <= ev_start + 600) {
            w.dni_wm2 = 60.0;
            w.diffuse_wm2 = 280.0;
        }

    campaign::SessionConfig session;
    session.submodule_id = "A";
    session.start_time = setup.day.day_start + 6000;
    auto out = campaign::run_acceptance_session(setup, session, weather);
    CHECK_FALSE(out.complete);
    CHECK(out.abort_reason == "cloud during session");
    CHECK_FALSE(out.samples.empty());
    CHECK(out.samples.size() < 169);
}

TEST_CASE("all-dark session is flagged degenerate") {
    auto setup = hour_setup();
    setup.day.day_length_s = 36000.0;
    setup.submodules[0].mount_offset = {30.0, 30.0};  // pointing hopelessly off
    auto weather = steady_weather(setup);
    campaign::SessionConfig session;
    session.submodule_id = "A";
    session.start_time = setup.day.day_start + 6000;
    auto out = campaign::run_acceptance_session(setup, session, weather);
    CHECK(out.degenerate);
}

TEST_CASE("session csv round trip") {
    campaign::AcceptanceSample s;
    s.submodule_id = "B";
    s.daz_deg = -0.25;
    s.del_deg = 1.0;
    s.isc_over_dni = 2.1772e-4;
    auto path = (std::filesystem::temp_directory_path() / "session_rt.csv").string();
    campaign::write_session_csv({s}, path);
    auto loaded = campaign::read_session_csv(path);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].submodule_id == "B");
    CHECK(loaded[0].daz_deg == doctest::Approx(-0.25));
    CHECK(loaded[0].isc_over_dni == doctest::Approx(2.1772e-4).epsilon(1e-6));
}

TEST_CASE("campaign config validation") {
    campaign::CampaignConfig cfg;
    cfg.cycle_period_s = 30.0;
    cfg.slot_seconds = 10.0;
    CHECK_THROWS_AS(cfg.validate(4), ConfigError);  // 4 slots do not fit
    cfg.cycle_period_s = 196.0;
    CHECK_NOTHROW(cfg.validate(4));

    campaign::CampaignConfig sched;
    sched.mode_schedule = {{0, tracker::Mode::OpenLoop}, {100, tracker::Mode::ScanAlign}};
    CHECK(sched.mode_at(50) == tracker::Mode::OpenLoop);
    CHECK(sched.mode_at(100) == tracker::Mode::ScanAlign);
    CHECK(sched.mode_at(5000) == tracker::Mode::ScanAlign);
}
