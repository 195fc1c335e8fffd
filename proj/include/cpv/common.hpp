#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpv {

// Bad configuration or command-line input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV rows, log files).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical routine failed to converge or was fed an infeasible problem.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

/// Snap a commanded angle to the smallest step a drive can execute.
/// Half-step values round away from zero (round-half-up on the positive
/// az/el ranges used here).
inline double quantize_angle(double value_deg, double resolution_deg) {
    if (resolution_deg <= 0.0) return value_deg;
    return std::round(value_deg / resolution_deg) * resolution_deg;
}

/// Wrap an angle difference into (-180, 180].
inline double wrap_deg180(double d) {
    d = std::fmod(d, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

// --- UTC time handling -----------------------------------------------------
//
// Timestamps are integer-friendly seconds since the Unix epoch, always UTC.
// The accepted text form is ISO-8601 "YYYY-MM-DDThh:mm:ss[.fff][Z]".

std::int64_t parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// --- small text utilities ---------------------------------------------------

std::vector<std::string> split_csv_line(std::string_view line);

/// strtod with full-token validation; throws DataError naming `what`.
double parse_double(std::string_view token, const std::string& what);

std::string trim(std::string_view s);

}  // namespace cpv
