#include "cpv/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace cpv::campaign {

void CampaignConfig::validate(std::size_t n_submodules) const {
    if (cycle_period_s <= 0.0 || slot_seconds <= 0.0)
        throw ConfigError("campaign: cycle period and slot duration must be positive");
    if (slot_seconds * static_cast<double>(n_submodules) > cycle_period_s)
        throw ConfigError("campaign: slots do not fit into the cycle period");
    if (mode_schedule.empty()) throw ConfigError("campaign: empty mode schedule");
}

tracker::Mode CampaignConfig::mode_at(std::int64_t time) const {
    tracker::Mode m = mode_schedule.front().mode;
    for (const ModeWindow& w : mode_schedule)
        if (time >= w.start) m = w.mode;
    return m;
}

namespace {

// short-circuit current of one sub-module at a commanded pointing with sun
// and weather frozen
double scan_isc(const cell::SubModuleSpec& spec, const optics::Pointing& pointing,
                const optics::Pointing& sun_dir, const env::WeatherSample& wx, double noise_a,
                std::mt19937_64& rng) {
    cell::OperatingPoint op = cell::operating_point(spec, pointing, sun_dir, wx);
    double isc = op.iph_a > 0.0 ? cell::iv_current(0.0, op.iph_a, op.diode) : 0.0;
    if (noise_a > 0.0) {
        std::normal_distribution<double> n(0.0, noise_a);
        isc += n(rng);
    }
    return std::max(isc, 0.0);
}

}  // namespace

CampaignResult run_campaign(const CampaignSetup& setup,
                            const std::vector<env::WeatherSample>& weather) {
    if (setup.submodules.empty()) throw ConfigError("campaign: no sub-modules configured");
    setup.config.validate(setup.submodules.size());
    setup.scan.validate();
    for (const auto& sm : setup.submodules) sm.validate();
    if (weather.empty()) throw DataError("campaign: empty weather series");

    std::mt19937_64 rng(setup.seed);
    CampaignResult result;
    const std::int64_t last_weather = weather.back().timestamp;

    for (int day = 0; day < setup.day.n_days; ++day) {
        std::int64_t window_start = setup.day.day_start + static_cast<std::int64_t>(day) * 86400;
        int n_cycles = static_cast<int>(setup.day.day_length_s / setup.config.cycle_period_s);
        for (int c = 0; c < n_cycles; ++c) {
            std::int64_t cycle_start =
                window_start + static_cast<std::int64_t>(c * setup.config.cycle_period_s);
            for (std::size_t k = 0; k < setup.submodules.size(); ++k) {
                const cell::SubModuleSpec& spec = setup.submodules[k];
                std::int64_t t =
                    cycle_start + static_cast<std::int64_t>(static_cast<double>(k) *
                                                            setup.config.slot_seconds);
                if (t > last_weather) return result;  // weather exhausted

                auto skip = [&](const std::string& reason) {
                    result.skips.push_back({t, spec.id, reason});
                };

                auto widx = env::sample_at_or_before(weather, t);
                if (!widx) {
                    skip("no weather data");
                    continue;
                }
                const env::WeatherSample& wx = weather[*widx];
                if (static_cast<double>(t - wx.timestamp) > setup.weather_interval_s) {
                    skip("weather gap");
                    continue;
                }

                auto sun = env::sun_path(t, setup.day);
                if (!sun) {
                    skip("sun below horizon");
                    continue;
                }
                if (!tracker::cloudless_check(weather, t)) {
                    skip("cloudy sky");
                    continue;
                }
                auto astro = tracker::astro_pointing(*sun, setup.tracker_resolution_deg);
                if (!astro) {
                    skip("tracker parked");
                    continue;
                }

                optics::Pointing sun_dir{sun->true_azimuth_deg, sun->true_elevation_deg};
                tracker::Mode mode = setup.config.mode_at(t);
                optics::Pointing pointing = *astro;
                if (mode == tracker::Mode::ScanAlign) {
                    auto scanned = tracker::scan_align(
                        *astro, spec.profile.shape_exponent, setup.scan,
                        setup.tracker_resolution_deg, [&](const optics::Pointing& p) {
                            return scan_isc(spec, p, sun_dir, wx, setup.isc_noise_a, rng);
                        });
                    if (!scanned) {
                        skip("alignment failure");
                        continue;
                    }
                    pointing = {quantize_angle(scanned->pointing.az_deg,
                                               setup.tracker_resolution_deg),
                                quantize_angle(scanned->pointing.el_deg,
                                               setup.tracker_resolution_deg)};
                }

                cell::OperatingPoint op = cell::operating_point(spec, pointing, sun_dir, wx);
                if (op.iph_a <= 0.0) {
                    skip("degenerate curve");
                    continue;
                }
                meter::IVCurve curve = meter::measure_iv(op, setup.isc_noise_a, &rng);

                MeasurementRecord rec;
                rec.timestamp = t;
                rec.submodule_id = spec.id;
                rec.mode = mode;
                rec.pointing = pointing;
                rec.deviation_deg = op.deviation_deg;
                rec.summary = meter::summarize(curve);
                rec.weather = wx;
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

SessionResult run_acceptance_session(const CampaignSetup& setup, const SessionConfig& session,
                                     const std::vector<env::WeatherSample>& weather) {
    if (session.frame_deg <= 0.0 || session.step_deg <= 0.0 || session.dwell_s <= 0.0)
        throw ConfigError("acceptance session: frame, step and dwell must be positive");
    const cell::SubModuleSpec* spec = nullptr;
    for (const auto& sm : setup.submodules)
        if (sm.id == session.submodule_id) spec = &sm;
    if (!spec) throw ConfigError("acceptance session: unknown sub-module '" +
                                 session.submodule_id + "'");

    std::mt19937_64 rng(setup.seed ^ 0x5e551011u);
    int n = static_cast<int>(std::lround(session.frame_deg / session.step_deg)) + 1;

    SessionResult out;
    out.degenerate = true;
    int m = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i, ++m) {
            double daz = -0.5 * session.frame_deg + i * session.step_deg;
            double del = -0.5 * session.frame_deg + j * session.step_deg;
            std::int64_t t =
                session.start_time + static_cast<std::int64_t>(m * session.dwell_s);

            auto abort = [&](const std::string& why) {
                out.complete = false;
                out.abort_reason = why;
            };
            auto widx = env::sample_at_or_before(weather, t);
            if (!widx || static_cast<double>(t - weather[*widx].timestamp) >
                             setup.weather_interval_s) {
                abort("weather coverage ended");
                return out;
            }
            const env::WeatherSample& wx = weather[*widx];
            auto sun = env::sun_path(t, setup.day);
            if (!sun) {
                abort("sun below horizon");
                return out;
            }
            if (!tracker::cloudless_check(weather, t)) {
                abort("cloud during session");
                return out;
            }
            if (wx.dni_wm2 <= 0.0) {
                abort("no beam irradiance");
                return out;
            }
            auto astro = tracker::astro_pointing(*sun, setup.tracker_resolution_deg);
            if (!astro) {
                abort("tracker parked");
                return out;
            }

            optics::Pointing p = optics::arc_shift(*astro, daz, del);
            p.az_deg = quantize_angle(p.az_deg, setup.tracker_resolution_deg);
            p.el_deg = quantize_angle(p.el_deg, setup.tracker_resolution_deg);
            optics::Pointing sun_dir{sun->true_azimuth_deg, sun->true_elevation_deg};
            double isc = scan_isc(*spec, p, sun_dir, wx, setup.isc_noise_a, rng);

            AcceptanceSample s;
            s.submodule_id = spec->id;
            s.daz_deg = daz;
            s.del_deg = del;
            s.isc_over_dni = isc / wx.dni_wm2;
            if (s.isc_over_dni > 0.0) out.degenerate = false;
            out.samples.push_back(s);
        }
    }
    return out;
}

// --- persistence -------------------------------------------------------------

std::string mode_name(tracker::Mode mode) {
    return mode == tracker::Mode::OpenLoop ? "open_loop" : "scan_align";
}

tracker::Mode mode_from_name(const std::string& name) {
    if (name == "open_loop") return tracker::Mode::OpenLoop;
    if (name == "scan_align") return tracker::Mode::ScanAlign;
    throw DataError("unknown tracking mode '" + name + "'");
}

static const char* kLogHeader =
    "timestamp_utc,submodule,mode,az_deg,el_deg,deviation_deg,isc_a,voc_v,pmax_w,vmp_v,imp_a,"
    "ff,dni_wm2,dhi_wm2,t_ambient_c";

void write_measurement_log(const std::vector<MeasurementRecord>& records,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write measurement log: " + path);
    out << kLogHeader << '\n';
    char buf[512];
    for (const MeasurementRecord& r : records) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%s,%s,%.4f,%.4f,%.4f,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.3f,%.3f,%.3f\n",
                      format_iso8601_utc(r.timestamp).c_str(), r.submodule_id.c_str(),
                      mode_name(r.mode).c_str(), r.pointing.az_deg, r.pointing.el_deg,
                      r.deviation_deg, r.summary.isc_a, r.summary.voc_v, r.summary.p_max_w,
                      r.summary.v_mp_v, r.summary.i_mp_a, r.summary.ff, r.weather.dni_wm2,
                      r.weather.diffuse_wm2, r.weather.t_ambient_c);
        out << buf;
        out.flush();  // one row per record, crash tolerant
    }
}

std::vector<MeasurementRecord> read_measurement_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open measurement log: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kLogHeader)
        throw DataError("measurement log " + path + ": bad or missing header");

    std::vector<MeasurementRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto f = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (f.size() != 15) throw DataError(where + ": expected 15 columns");
        MeasurementRecord r;
        r.timestamp = parse_iso8601_utc(f[0]);
        r.submodule_id = f[1];
        r.mode = mode_from_name(f[2]);
        r.pointing.az_deg = parse_double(f[3], where + " az_deg");
        r.pointing.el_deg = parse_double(f[4], where + " el_deg");
        r.deviation_deg = parse_double(f[5], where + " deviation_deg");
        r.summary.isc_a = parse_double(f[6], where + " isc_a");
        r.summary.voc_v = parse_double(f[7], where + " voc_v");
        r.summary.p_max_w = parse_double(f[8], where + " pmax_w");
        r.summary.v_mp_v = parse_double(f[9], where + " vmp_v");
        r.summary.i_mp_a = parse_double(f[10], where + " imp_a");
        r.summary.ff = parse_double(f[11], where + " ff");
        r.weather.timestamp = r.timestamp;
        r.weather.dni_wm2 = parse_double(f[12], where + " dni_wm2");
        r.weather.diffuse_wm2 = parse_double(f[13], where + " dhi_wm2");
        r.weather.t_ambient_c = parse_double(f[14], where + " t_ambient_c");
        out.push_back(r);
    }
    return out;
}

void write_skip_log(const std::vector<SkipEntry>& skips, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write skip log: " + path);
    out << "timestamp_utc,submodule,reason\n";
    for (const SkipEntry& s : skips)
        out << format_iso8601_utc(s.timestamp) << ',' << s.submodule_id << ',' << s.reason
            << '\n';
}

void write_session_csv(const std::vector<AcceptanceSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write session file: " + path);
    out << "submodule,daz_deg,del_deg,isc_over_dni\n";
    char buf[160];
    for (const AcceptanceSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.8g\n", s.submodule_id.c_str(), s.daz_deg,
                      s.del_deg, s.isc_over_dni);
        out << buf;
    }
}

std::vector<AcceptanceSample> read_session_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open session file: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "submodule,daz_deg,del_deg,isc_over_dni")
        throw DataError("session file " + path + ": bad or missing header");
    std::vector<AcceptanceSample> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto f = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (f.size() != 4) throw DataError(where + ": expected 4 columns");
        AcceptanceSample s;
        s.submodule_id = f[0];
        s.daz_deg = parse_double(f[1], where + " daz_deg");
        s.del_deg = parse_double(f[2], where + " del_deg");
        s.isc_over_dni = parse_double(f[3], where + " isc_over_dni");
        out.push_back(s);
    }
    if (out.empty()) throw DataError("session file " + path + ": no samples");
    return out;
}

}  // namespace cpv::campaign
