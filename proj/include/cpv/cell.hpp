#pragma once

#include <string>

#include "cpv/env.hpp"
#include "cpv/optics.hpp"

namespace cpv::cell {

/// Lumped single-diode parameters for the whole triple-junction stack.
struct DiodeParams {
    double i0_a = 1e-15;    // saturation current
    double n_vt_v = 0.0848; // effective n*kT/q of the stack at reference temperature
    double r_s_ohm = 0.0;
    double r_sh_ohm = 5000.0;

    void validate() const;
};

/// Linear lumped thermal model. Cell heating is proportional to DNI; the
/// temperature rescales n_vt with absolute temperature and applies a linear
/// coefficient to the photocurrent. k = 0 disables heating entirely.
struct ThermalModel {
    double k_c_per_wm2 = 0.03;
    double isc_coeff_per_c = 5e-4;
    double t_ref_c = 25.0;
};

enum class ArcType { MicroBeads, Reference };

/// Full parameterization of one lens+cell pair.
struct SubModuleSpec {
    std::string id = "A";
    ArcType arc_type = ArcType::MicroBeads;
    double jsc_eqe_ma_per_cm2 = 13.24;  // one-sun EQE-derived current density
    double cell_area_cm2 = 0.0655;
    double c_geo = 250.0;
    double eta_opt = 1.0;  // lumped lens transmission/reflection/aberration factor
    double lens_aperture_cm2 = 16.42;
    optics::AcceptanceProfile profile;
    optics::MountOffset mount_offset;
    DiodeParams diode;
    ThermalModel thermal;
    bool thermal_enabled = false;

    void validate() const;
};

/// Photogenerated current for a given irradiance and pointing offset:
///   Iph = Jsc * area * C_geo * eta_opt * T(offset) * dni/1000.
double photocurrent(const SubModuleSpec& spec, double dni_wm2,
                    const optics::AngularOffset& off = {0.0, 0.0});

/// Terminal current at voltage v for the implicit single-diode model
///   I = Iph - i0*(exp((v + I*r_s)/n_vt) - 1) - (v + I*r_s)/r_sh,
/// solved to a residual below 1e-12 A (damped Newton with a bisection
/// fallback on a bracketing interval).
double iv_current(double v, double iph_a, const DiodeParams& d);

/// Saturation current that places the open-circuit voltage at voc_target for
/// the reference photocurrent (series resistance does not matter at I = 0):
///   i0 = (iph_ref - voc/r_sh) / (exp(voc/n_vt) - 1),
/// evaluated in log space when the exponential would overflow.
DiodeParams calibrate_diode(double voc_target_v, double iph_ref_a, double n_vt_v, double r_s_ohm,
                            double r_sh_ohm);

/// Open-circuit voltage of the modeled cell. Series resistance drops out at
/// I = 0, so this reduces to a scalar Newton solve.
double solve_voc(double iph_a, const DiodeParams& d);

/// Series resistance that reproduces a target fill factor at the reference
/// photocurrent, holding Voc fixed (i0 is recalibrated implicitly since it
/// does not depend on r_s). Secant iteration against a dense-grid Pmax.
double calibrate_rs(double ff_target, double voc_target_v, double iph_ref_a, double n_vt_v,
                    double r_sh_ohm);

/// Fill factor of the modeled cell computed on a dense voltage grid,
/// independent of the instrument sweep protocol.
double fill_factor_dense(double iph_a, const DiodeParams& d);

/// Lumped cell temperature: Tcell = T_ambient + k * DNI.
double cell_temperature(double t_ambient_c, double dni_wm2, double thermal_k_c_per_wm2);

/// Degradation model for a defective device: series-resistance growth and
/// optional photocurrent derating, optionally ramping linearly over time.
struct DefectConfig {
    double rs_multiplier = 1.0;
    double iph_derate = 1.0;
    double rs_growth_per_day = 0.0;  // extra multiplier fraction per elapsed day

    void validate() const;
};

/// Apply a defect to a spec. `elapsed_days` scales the optional time ramp.
SubModuleSpec inject_defect(const SubModuleSpec& spec, const DefectConfig& defect,
                            double elapsed_days = 0.0);

/// Everything the source-measure engine needs for one characterization:
/// photocurrent and diode parameters after optics and thermal adjustments.
struct OperatingPoint {
    double iph_a = 0.0;
    DiodeParams diode;
    double tcell_c = 0.0;
    double deviation_deg = 0.0;
};

OperatingPoint operating_point(const SubModuleSpec& spec, const optics::Pointing& pointing,
                               const optics::Pointing& sun_dir, const env::WeatherSample& weather);

}  // namespace cpv::cell
