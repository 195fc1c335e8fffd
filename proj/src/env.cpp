#include "cpv/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace cpv::env {

namespace {

double day_fraction(std::int64_t time, const DayConfig& cfg, int day) {
    std::int64_t start = cfg.day_start + static_cast<std::int64_t>(day) * 86400;
    return static_cast<double>(time - start) / cfg.day_length_s;
}

}  // namespace

std::optional<int> day_index(std::int64_t time, const DayConfig& cfg) {
    if (cfg.day_length_s <= 0.0) throw ConfigError("day_length_s must be positive");
    if (cfg.day_length_s > 86400.0) throw ConfigError("day_length_s exceeds 24 h");
    if (time < cfg.day_start) return std::nullopt;
    std::int64_t rel = time - cfg.day_start;
    int day = static_cast<int>(rel / 86400);
    if (day >= cfg.n_days) return std::nullopt;
    double within = static_cast<double>(rel - static_cast<std::int64_t>(day) * 86400);
    if (within > cfg.day_length_s) return std::nullopt;
    return day;
}

std::optional<SunState> sun_path(std::int64_t time, const DayConfig& cfg) {
    auto day = day_index(time, cfg);
    if (!day) return std::nullopt;  // sun below horizon
    double u = day_fraction(time, cfg, *day);

    SunState s;
    s.true_elevation_deg = cfg.peak_elevation_deg * std::sin(kPi * u);
    s.true_azimuth_deg = cfg.azimuth_start_deg + (cfg.azimuth_end_deg - cfg.azimuth_start_deg) * u;
    double err_az = cfg.astro_error_az_deg + cfg.astro_drift_az_deg * (u - 0.5);
    double err_el = cfg.astro_error_el_deg + cfg.astro_drift_el_deg * (u - 0.5);
    s.astro_azimuth_deg = s.true_azimuth_deg + err_az;
    s.astro_elevation_deg = s.true_elevation_deg + err_el;
    return s;
}

std::vector<WeatherSample> synth_weather(const SynthWeatherConfig& cfg, std::uint64_t seed) {
    if (cfg.sample_interval_s <= 0.0)
        throw ConfigError("weather sample interval must be positive");
    if (cfg.peak_dni_wm2 < 0.0) throw ConfigError("peak DNI must be non-negative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_wm2);

    std::vector<WeatherSample> out;
    const std::int64_t step = static_cast<std::int64_t>(cfg.sample_interval_s);
    for (int day = 0; day < cfg.day.n_days; ++day) {
        double peak = cfg.peak_dni_wm2;
        if (!cfg.daily_peak_dni_wm2.empty())
            peak = cfg.daily_peak_dni_wm2[day % cfg.daily_peak_dni_wm2.size()];

        std::int64_t t0 = cfg.day.day_start + static_cast<std::int64_t>(day) * 86400;
        std::int64_t t_end = t0 + static_cast<std::int64_t>(cfg.day.day_length_s);
        for (std::int64_t t = t0; t <= t_end; t += step) {
            if (!out.empty() && t <= out.back().timestamp) continue;  // 24 h day windows abut
            double u = static_cast<double>(t - t0) / cfg.day.day_length_s;
            double arc = std::sin(kPi * u);
            WeatherSample w;
            w.timestamp = t;
            w.dni_wm2 = peak * std::pow(std::max(arc, 0.0), cfg.dni_shape_exponent);
            w.diffuse_wm2 = cfg.diffuse_clear_wm2;
            w.t_ambient_c = cfg.t_ambient_base_c + cfg.t_ambient_swing_c * arc;
            if (cfg.noise_wm2 > 0.0) w.dni_wm2 = std::max(0.0, w.dni_wm2 + noise(rng));

            for (const CloudEvent& c : cfg.clouds) {
                if (t >= c.start && t <= c.end) {
                    w.dni_wm2 = c.dni_wm2;
                    w.diffuse_wm2 = c.diffuse_wm2;
                }
            }
            out.push_back(w);
        }
    }
    return out;
}

std::vector<WeatherSample> load_weather(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open weather file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty weather file: " + path);
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"timestamp_utc", "dni_wm2", "dhi_wm2",
                                               "t_ambient_c"};
    if (header != expected)
        throw DataError("weather file " + path +
                        ": header must be 'timestamp_utc,dni_wm2,dhi_wm2,t_ambient_c'");

    std::vector<WeatherSample> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 4 columns, got " +
                            std::to_string(fields.size()));
        const std::string where = path + ":" + std::to_string(line_no);
        WeatherSample w;
        try {
            w.timestamp = parse_iso8601_utc(fields[0]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        w.dni_wm2 = parse_double(fields[1], where + " dni_wm2");
        w.diffuse_wm2 = parse_double(fields[2], where + " dhi_wm2");
        w.t_ambient_c = parse_double(fields[3], where + " t_ambient_c");
        if (w.dni_wm2 < 0.0) throw DataError(where + ": negative DNI");
        if (w.diffuse_wm2 < 0.0) throw DataError(where + ": negative diffuse irradiance");
        if (!out.empty() && w.timestamp <= out.back().timestamp)
            throw DataError(where + ": timestamps must be strictly increasing");
        out.push_back(w);
    }
    return out;
}

void save_weather(const std::vector<WeatherSample>& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write weather file: " + path);
    out << "timestamp_utc,dni_wm2,dhi_wm2,t_ambient_c\n";
    char buf[128];
    for (const WeatherSample& w : series) {
        std::snprintf(buf, sizeof(buf), "%s,%.3f,%.3f,%.3f\n",
                      format_iso8601_utc(w.timestamp).c_str(), w.dni_wm2, w.diffuse_wm2,
                      w.t_ambient_c);
        out << buf;
    }
}

std::optional<std::size_t> sample_at_or_before(const std::vector<WeatherSample>& series,
                                               std::int64_t time) {
    if (series.empty() || time < series.front().timestamp) return std::nullopt;
    auto it = std::upper_bound(series.begin(), series.end(), time,
                               [](std::int64_t t, const WeatherSample& w) { return t < w.timestamp; });
    return static_cast<std::size_t>(std::distance(series.begin(), it) - 1);
}

}  // namespace cpv::env
