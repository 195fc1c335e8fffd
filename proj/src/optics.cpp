#include "cpv/optics.hpp"

#include <cmath>

namespace cpv::optics {

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 unit_from_azel(double az_deg, double el_deg) {
    double az = deg2rad(az_deg), el = deg2rad(el_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

}  // namespace

double AngularOffset::magnitude_deg() const { return std::hypot(az_deg, el_deg); }

void AcceptanceProfile::validate() const {
    if (theta90_az_deg <= 0.0 || theta90_el_deg <= 0.0)
        throw ConfigError("acceptance profile: theta90 must be positive");
    if (shape_exponent <= 0.0)
        throw ConfigError("acceptance profile: shape exponent must be positive");
}

void MountOffset::validate() const {
    if (!std::isfinite(d_az_deg) || !std::isfinite(d_el_deg) || std::abs(d_az_deg) >= 90.0 ||
        std::abs(d_el_deg) >= 90.0)
        throw ConfigError("mount offset must be finite and below 90 degrees");
}

double great_circle_deg(double az1_deg, double el1_deg, double az2_deg, double el2_deg) {
    Vec3 u = unit_from_azel(az1_deg, el1_deg);
    Vec3 v = unit_from_azel(az2_deg, el2_deg);
    Vec3 c{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
    double cross = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
    double dot = u.x * v.x + u.y * v.y + u.z * v.z;
    return rad2deg(std::atan2(cross, dot));
}

Pointing arc_shift(const Pointing& p, double arc_az_deg, double arc_el_deg) {
    double c = std::cos(deg2rad(p.el_deg));
    if (c < 1e-9) c = 1e-9;  // pole guard
    return {p.az_deg + arc_az_deg / c, p.el_deg + arc_el_deg};
}

Pointing optical_axis(const Pointing& pointing, const MountOffset& offset) {
    // exact inverse of arc_shift: anchored at the destination elevation, so
    // that pointing arc_shift(s, d) puts the axis exactly on s
    double el = pointing.el_deg - offset.d_el_deg;
    double c = std::cos(deg2rad(el));
    if (c < 1e-9) c = 1e-9;
    return {pointing.az_deg - offset.d_az_deg / c, el};
}

double angular_deviation(const Pointing& pointing, const Pointing& sun_dir,
                         const MountOffset& offset) {
    Pointing axis = optical_axis(pointing, offset);
    return great_circle_deg(axis.az_deg, axis.el_deg, sun_dir.az_deg, sun_dir.el_deg);
}

AngularOffset pointing_offset(const Pointing& pointing, const Pointing& sun_dir,
                              const MountOffset& offset) {
    Pointing axis = optical_axis(pointing, offset);
    double mid_el = 0.5 * (axis.el_deg + sun_dir.el_deg);
    AngularOffset off;
    off.az_deg = wrap_deg180(axis.az_deg - sun_dir.az_deg) * std::cos(deg2rad(mid_el));
    off.el_deg = axis.el_deg - sun_dir.el_deg;
    return off;
}

double transmission(const AngularOffset& off, const AcceptanceProfile& profile) {
    profile.validate();
    double rho = std::hypot(off.az_deg / profile.theta90_az_deg,
                            off.el_deg / profile.theta90_el_deg);
    if (rho == 0.0) return 1.0;
    return std::pow(0.9, std::pow(rho, profile.shape_exponent));
}

double transmission(double theta_deg, const AcceptanceProfile& profile, double dir_az,
                    double dir_el) {
    if (theta_deg < 0.0) throw ConfigError("transmission: deviation must be non-negative");
    double norm = std::hypot(dir_az, dir_el);
    if (norm == 0.0) return transmission(AngularOffset{theta_deg, 0.0}, profile);
    return transmission(
        AngularOffset{theta_deg * dir_az / norm, theta_deg * dir_el / norm}, profile);
}

double calibrate_optics(double target_isc_900_a, double jsc_eqe_ma_per_cm2, double cell_area_cm2,
                        double c_geo) {
    if (target_isc_900_a <= 0.0) throw ConfigError("optics calibration: target Isc must be > 0");
    if (jsc_eqe_ma_per_cm2 <= 0.0 || cell_area_cm2 <= 0.0 || c_geo <= 0.0)
        throw ConfigError("optics calibration: Jsc, area and concentration must be > 0");
    double isc_ideal_900_a = jsc_eqe_ma_per_cm2 * 1e-3 * cell_area_cm2 * c_geo * 0.9;
    return target_isc_900_a / isc_ideal_900_a;
}

}  // namespace cpv::optics
