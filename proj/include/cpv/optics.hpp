#pragma once

#include "cpv/common.hpp"

namespace cpv::optics {

/// Tracker pointing or a sky direction, degrees. Azimuth in [0, 360),
/// elevation in [-90, 90].
struct Pointing {
    double az_deg = 0.0;
    double el_deg = 0.0;
};

/// Small angular offset decomposed along the azimuth and elevation
/// great-circle directions ("tangent-plane" arc components): an azimuth
/// offset here is a true on-sky angle, not an azimuth-coordinate delta.
struct AngularOffset {
    double az_deg = 0.0;
    double el_deg = 0.0;

    double magnitude_deg() const;
};

/// Transmission plateau of one lens+cell pair as seen from pointing space.
/// theta90 is the deviation along each principal axis at which transmission
/// falls to 90% of the on-axis value; shape_exponent controls how flat the
/// plateau is.
struct AcceptanceProfile {
    double theta90_az_deg = 0.78;
    double theta90_el_deg = 0.78;
    double shape_exponent = 6.0;

    void validate() const;
};

/// Fixed misalignment of the module's optical axis relative to the tracker,
/// in arc components. The tracker must over-point by exactly this offset to
/// center the module on the sun, so an acceptance map records its peak at
/// +offset (for perfect astronomical tracking).
struct MountOffset {
    double d_az_deg = 0.0;
    double d_el_deg = 0.0;

    void validate() const;
};

/// Exact great-circle angle between two az/el directions, degrees.
/// Small-angle safe (vector cross/dot formulation).
double great_circle_deg(double az1_deg, double el1_deg, double az2_deg, double el2_deg);

/// Shift a pointing by arc components: elevation moves directly, azimuth by
/// arc/cos(elevation).
Pointing arc_shift(const Pointing& p, double arc_az_deg, double arc_el_deg);

/// Direction of the module's optical axis for a given tracker pointing.
Pointing optical_axis(const Pointing& pointing, const MountOffset& offset);

/// Great-circle angle between the module's optical axis and the sun.
/// Zero iff the directions coincide.
double angular_deviation(const Pointing& pointing, const Pointing& sun_dir,
                         const MountOffset& offset);

/// Tangent-plane decomposition of the axis-to-sun offset. Magnitude agrees
/// with angular_deviation to third order in the angle.
AngularOffset pointing_offset(const Pointing& pointing, const Pointing& sun_dir,
                              const MountOffset& offset);

/// Fraction of on-axis power transmitted at the given angular offset:
///   T = 0.9^(rho^p),  rho^2 = (az/theta90_az)^2 + (el/theta90_el)^2.
/// T(0) = 1 and T = 0.9 exactly on the (theta90_az, theta90_el) ellipse.
double transmission(const AngularOffset& off, const AcceptanceProfile& profile);

/// Scalar form: deviation magnitude plus its unit az/el decomposition.
double transmission(double theta_deg, const AcceptanceProfile& profile, double dir_az,
                    double dir_el);

/// Lumped optical efficiency that makes the modeled short-circuit current at
/// 900 W/m^2 and zero deviation equal `target_isc_900_a`:
///   eta = target / (Jsc * area * C_geo * 0.9)
/// with Jsc in mA/cm^2 and the result dimensionless (may exceed 1).
double calibrate_optics(double target_isc_900_a, double jsc_eqe_ma_per_cm2, double cell_area_cm2,
                        double c_geo);

}  // namespace cpv::optics
