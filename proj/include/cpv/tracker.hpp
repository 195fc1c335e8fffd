#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cpv/env.hpp"
#include "cpv/optics.hpp"

namespace cpv::tracker {

enum class Mode { OpenLoop, ScanAlign };

struct TrackerState {
    Mode mode = Mode::OpenLoop;
    optics::Pointing pointing;
    double slew_rate_deg_per_s = 5.0;
    double resolution_deg = 0.01;  // smallest commanded step
};

/// Closed-loop alignment scan geometry. The coarse grid has coarse_n equally
/// spaced nodes per axis spanning the full range (both ends included); the
/// refined grid has fine_n nodes over the same extent.
struct ScanConfig {
    int coarse_n = 4;
    int fine_n = 10;
    double range_deg = 2.25;  // full width per axis, arc degrees

    void validate() const;
};

/// Astronomical (open-loop) pointing: the astro sun estimate quantized to
/// the tracker resolution. Nullopt = parked (sun below horizon).
std::optional<optics::Pointing> astro_pointing(const env::SunState& sun, double resolution_deg);

struct ScanResult {
    optics::Pointing pointing;      // best refined-grid position (exact node coordinates)
    double offset_az_deg = 0.0;     // chosen node, arc offset from scan center
    double offset_el_deg = 0.0;
    double interpolated_isc_a = 0.0;
    bool at_boundary = false;       // peak pinned to the scan window edge
};

/// Short-circuit current scan around the astronomical position.
///
/// Measures Isc on the coarse grid of pointings (commands quantized to the
/// tracker resolution), reconstructs the acceptance plateau from the
/// measurements, evaluates the reconstruction on the fine grid and returns
/// the fine node with the highest interpolated Isc. Ties resolve to the
/// first maximum in row-major order (elevation rows bottom-up, azimuth
/// within a row). Nullopt = alignment failure (no usable signal on the
/// coarse grid); callers fall back to open loop.
///
/// The reconstruction fits a quadratic surface to the measurements mapped
/// through the inverse plateau shape (log-domain radial transform with the
/// sub-module's configured shape exponent). A piecewise interpolant cannot
/// place an interior maximum between coarse nodes, so a shape-matched fit is
/// what actually recovers the peak to sub-node accuracy.
std::optional<ScanResult> scan_align(const optics::Pointing& center, double shape_exponent,
                                     const ScanConfig& cfg, double resolution_deg,
                                     const std::function<double(const optics::Pointing&)>& measure_isc);

/// Sky-stability gate over a trailing window (default 120 s): relative DNI
/// spread (max-min)/mean at most `max_rel_spread` and diffuse irradiance at
/// or below `diffuse_max_wm2` throughout.
bool cloudless_check(std::span<const env::WeatherSample> recent, double max_rel_spread = 0.02,
                     double diffuse_max_wm2 = 140.0);

/// Convenience: gate on the trailing `window_s` seconds of a series ending
/// at `time`.
bool cloudless_check(const std::vector<env::WeatherSample>& series, std::int64_t time,
                     double window_s = 120.0, double max_rel_spread = 0.02,
                     double diffuse_max_wm2 = 140.0);

}  // namespace cpv::tracker
