#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpv/common.hpp"

namespace cpv::env {

/// One reading from the meteorological station.
struct WeatherSample {
    std::int64_t timestamp = 0;  // seconds since epoch, UTC
    double dni_wm2 = 0.0;        // direct normal irradiance
    double diffuse_wm2 = 0.0;    // diffuse horizontal irradiance
    double t_ambient_c = 0.0;
};

/// Sun direction at an instant. The simulator defines the true direction;
/// the astronomical estimate is truth plus the configured tracking error.
struct SunState {
    double true_azimuth_deg = 0.0;
    double true_elevation_deg = 0.0;
    double astro_azimuth_deg = 0.0;
    double astro_elevation_deg = 0.0;
};

/// Parametric day arc. Elevation rises from 0 at the window start to
/// `peak_elevation_deg` at the midpoint and back; azimuth sweeps linearly.
/// The same arc repeats every 24 h for `n_days` days.
struct DayConfig {
    std::int64_t day_start = 0;     // window start of day 0, epoch seconds UTC
    double day_length_s = 36000.0;  // daylight window duration
    int n_days = 1;
    double peak_elevation_deg = 60.0;
    double azimuth_start_deg = 110.0;
    double azimuth_end_deg = 250.0;
    // open-loop tracking error: constant offset plus an optional linear
    // drift; the drift term is zero at solar noon and +/- half at the
    // window edges.
    double astro_error_az_deg = 0.0;
    double astro_error_el_deg = 0.0;
    double astro_drift_az_deg = 0.0;
    double astro_drift_el_deg = 0.0;
};

/// Index of the day window containing `time`, or nullopt outside all windows.
std::optional<int> day_index(std::int64_t time, const DayConfig& cfg);

/// Sun direction at `time`; nullopt when the sun is below the horizon
/// (outside every configured day window).
std::optional<SunState> sun_path(std::int64_t time, const DayConfig& cfg);

/// A depressed-DNI interval with elevated diffuse radiation.
struct CloudEvent {
    std::int64_t start = 0;  // epoch seconds
    std::int64_t end = 0;
    double dni_wm2 = 100.0;
    double diffuse_wm2 = 250.0;
};

struct SynthWeatherConfig {
    DayConfig day;
    double sample_interval_s = 10.0;
    double peak_dni_wm2 = 950.0;
    /// Optional per-day peak override, cycled across days. Lets one run
    /// cover a wide irradiance span the way a month of real days would.
    std::vector<double> daily_peak_dni_wm2;
    double dni_shape_exponent = 0.35;  // dni = peak * sin(pi u)^exponent
    double noise_wm2 = 0.0;            // gaussian sigma added to clear-sky DNI
    double diffuse_clear_wm2 = 80.0;
    double t_ambient_base_c = 15.0;
    double t_ambient_swing_c = 8.0;  // Ta = base + swing * sin(pi u)
    std::vector<CloudEvent> clouds;
};

/// Deterministic synthetic weather series over the configured day windows.
/// With noise_wm2 == 0 the output is the pure clear-sky template and does
/// not depend on the seed at all.
std::vector<WeatherSample> synth_weather(const SynthWeatherConfig& cfg, std::uint64_t seed);

/// Load a station log. Header line required:
///   timestamp_utc,dni_wm2,dhi_wm2,t_ambient_c
/// Rows must be in strictly increasing timestamp order; malformed rows are
/// reported with their line number.
std::vector<WeatherSample> load_weather(const std::string& path);

void save_weather(const std::vector<WeatherSample>& series, const std::string& path);

/// Latest sample with timestamp <= time, as a series index.
/// Returns nullopt when `time` precedes the series.
std::optional<std::size_t> sample_at_or_before(const std::vector<WeatherSample>& series,
                                               std::int64_t time);

}  // namespace cpv::env
