#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpv/campaign.hpp"

namespace cpv::analysis {

/// Data-filtering thresholds for outdoor power rating (ASTM E2527 style,
/// with the diffuse-radiation cut added). The DNI stability window is
/// centered on the record.
struct FilterConfig {
    double t_min_c = 10.0;
    double t_max_c = 30.0;
    double dni_min_wm2 = 750.0;
    double diffuse_max_wm2 = 140.0;
    double stability_window_s = 600.0;
    double stability_max_rel_spread = 0.02;
};

// rejection rule names, in evaluation order
inline constexpr const char* kRuleTemperature = "temperature";
inline constexpr const char* kRuleDniMin = "dni_min";
inline constexpr const char* kRuleDiffuse = "diffuse";
inline constexpr const char* kRuleDniStability = "dni_stability";

struct Rejection {
    std::size_t record_index = 0;
    std::string rule;  // first failed rule
};

struct FilterResult {
    std::vector<campaign::MeasurementRecord> kept;
    std::vector<Rejection> rejected;
};

/// Keep a record iff ambient temperature, minimum DNI, diffuse irradiance
/// and centered-window DNI stability all pass. Throws when a record
/// timestamp is outside the weather series coverage.
FilterResult filter_samples(const std::vector<campaign::MeasurementRecord>& records,
                            const std::vector<env::WeatherSample>& weather,
                            const FilterConfig& cfg = {});

enum class RegressionMode {
    Astm,       // Isc = DNI*(b1 + b2*DNI + b3*Ta), wind term dropped
    LinearIsc,  // through-origin Isc = c*DNI cross-check
};

struct RatingOptions {
    RegressionMode mode = RegressionMode::Astm;
    double csoc_dni_wm2 = 900.0;
    double csoc_t_ambient_c = 20.0;
    std::size_t min_samples = 20;
    double min_dni_span_wm2 = 100.0;
};

struct CsocRating {
    std::string submodule_id;
    double isc_csoc_a = 0.0;
    double pmax_csoc_w = 0.0;
    double ff_csoc = 0.0;
    double efficiency_csoc = 0.0;
    double voc_mean_v = 0.0;
    std::vector<double> isc_coeffs;   // b1[, b2[, b3]] depending on model
    std::vector<double> pmax_coeffs;  // a1[, a2[, a3]]
    bool ta_term_used = true;  // false after rank-deficiency fallback
    std::size_t n_samples = 0;
    double isc_residual_rms_a = 0.0;
    double pmax_residual_rms_w = 0.0;
};

/// Least-squares CSOC rating of one sub-module from filtered records.
/// Falls back to the reduced model without the temperature term when the
/// design is rank deficient (e.g. constant ambient temperature).
CsocRating regress_csoc(const std::vector<campaign::MeasurementRecord>& filtered,
                        double lens_aperture_cm2, const RatingOptions& opt = {});

/// Measured module current over the one-sun EQE-derived cell current:
/// isc in A, jsc in mA/cm^2, area in cm^2.
double effective_concentration(double isc_900_a, double jsc_eqe_ma_per_cm2, double area_cm2);

/// Cell-to-module ratio of the short-circuit current.
double ctm(double c_eff, double c_geo = 250.0);

/// Conversion efficiency referred to the lens clear aperture.
double efficiency(double pmax_w, double dni_wm2, double aperture_cm2);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t n = 0;
};

/// OLS slope of fill factor versus DNI, in FF-fraction per (W/m^2).
LinearFit ff_slope(const std::vector<campaign::MeasurementRecord>& filtered,
                   std::size_t min_samples = 20, double min_dni_span_wm2 = 100.0);

/// Regular acceptance-map grid of normalized short-circuit current.
/// `defined[i][j]` marks nodes that carry data (measured or interpolated);
/// nodes outside the convex hull of the measured samples stay undefined.
struct AcceptanceMap {
    std::vector<double> az_deg;  // sorted grid coordinates
    std::vector<double> el_deg;
    std::vector<std::vector<double>> value;   // [az index][el index]
    std::vector<std::vector<bool>> defined;

    std::size_t max_i = 0, max_j = 0;  // node of the map maximum
    double max_value = 0.0;
};

/// Arrange session samples on their regular grid and fill interior holes by
/// iterative linear interpolation from the 4-neighbors. No extrapolation.
AcceptanceMap build_map(const std::vector<campaign::AcceptanceSample>& samples);

struct ContourPoint {
    double az_deg = 0.0;
    double el_deg = 0.0;
};

/// Level-set polygon at 90% of the map maximum (marching squares, linear
/// edge interpolation), closed and counterclockwise, enclosing the maximum
/// node. Throws when the level is never crossed inside the frame.
std::vector<ContourPoint> contour90(const AcceptanceMap& map);

struct ProjectedSample {
    double deviation_deg = 0.0;
    double value = 0.0;
};

/// Angular projection of a map: every defined node as (distance from the
/// map maximum node, value).
std::vector<ProjectedSample> project_map(const AcceptanceMap& map);

struct AcceptanceResult {
    double angle_deg = 0.0;
    double spread_deg = 0.0;  // sample standard deviation inside the band
    std::size_t samples_used = 0;
};

/// Average of the deviations whose normalized value lies within 90% +/- 1%
/// (absolute band [0.89, 0.91]) of the sample maximum.
AcceptanceResult acceptance_angle(const std::vector<ProjectedSample>& samples);

}  // namespace cpv::analysis
