#include "cpv/cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace cpv::cell {

namespace {

constexpr double kResidualTol = 1e-12;  // amperes
constexpr int kMaxIter = 100;
constexpr double kExpGuard = 600.0;  // exponent above which exp() is treated as huge

// Diode equation residual g(I) = Iph - Idiode - Ishunt - I, strictly
// decreasing in I for r_s >= 0.
double residual(double i, double v, double iph, const DiodeParams& d) {
    double arg = (v + i * d.r_s_ohm) / d.n_vt_v;
    if (arg > kExpGuard) return -1e300;
    return iph - d.i0_a * std::expm1(arg) - (v + i * d.r_s_ohm) / d.r_sh_ohm - i;
}

double residual_slope(double i, double v, double iph, const DiodeParams& d) {
    (void)iph;
    double arg = (v + i * d.r_s_ohm) / d.n_vt_v;
    if (arg > kExpGuard) return -1e300;
    return -d.i0_a * std::exp(arg) * d.r_s_ohm / d.n_vt_v - d.r_s_ohm / d.r_sh_ohm - 1.0;
}

// log(expm1(x)), stable for large x.
double log_expm1(double x) {
    if (x > 36.0) return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

}  // namespace

void DiodeParams::validate() const {
    if (i0_a <= 0.0) throw ConfigError("diode: saturation current must be > 0");
    if (n_vt_v <= 0.0) throw ConfigError("diode: n_vt must be > 0");
    if (r_s_ohm < 0.0) throw ConfigError("diode: series resistance must be >= 0");
    if (r_sh_ohm <= 0.0) throw ConfigError("diode: shunt resistance must be > 0");
}

void SubModuleSpec::validate() const {
    if (jsc_eqe_ma_per_cm2 <= 0.0) throw ConfigError(id + ": jsc_eqe must be > 0");
    if (cell_area_cm2 <= 0.0) throw ConfigError(id + ": cell area must be > 0");
    if (c_geo < 1.0) throw ConfigError(id + ": geometric concentration must be >= 1");
    if (eta_opt <= 0.0 || eta_opt > 1.2)
        throw ConfigError(id + ": eta_opt must be in (0, 1.2]");
    if (lens_aperture_cm2 <= 0.0) throw ConfigError(id + ": lens aperture must be > 0");
    profile.validate();
    mount_offset.validate();
    diode.validate();
}

double photocurrent(const SubModuleSpec& spec, double dni_wm2, const optics::AngularOffset& off) {
    if (dni_wm2 < 0.0) throw ConfigError("photocurrent: DNI must be non-negative");
    if (dni_wm2 == 0.0) return 0.0;
    double t = optics::transmission(off, spec.profile);
    return spec.jsc_eqe_ma_per_cm2 * 1e-3 * spec.cell_area_cm2 * spec.c_geo * spec.eta_opt * t *
           (dni_wm2 / 1000.0);
}

double iv_current(double v, double iph_a, const DiodeParams& d) {
    d.validate();
    if (v < 0.0) throw ConfigError("iv_current: voltage must be non-negative");

    if (d.r_s_ohm == 0.0) {
        double arg = v / d.n_vt_v;
        if (arg > kExpGuard) throw NumericError("iv_current: exponent overflow at v=" +
                                                std::to_string(v));
        return iph_a - d.i0_a * std::expm1(arg) - v / d.r_sh_ohm;
    }

    // Bracket the unique root of the decreasing residual.
    double hi = std::max(iph_a, 0.0);
    if (residual(hi, v, iph_a, d) > 0.0) {
        // can only happen through rounding at iph ~ 0; expand upward
        double step = std::max(1e-6, std::abs(hi));
        while (residual(hi, v, iph_a, d) > 0.0) hi += (step *= 2.0);
    }
    double lo = std::min(0.0, iph_a - d.i0_a * std::expm1(v / d.n_vt_v) - v / d.r_sh_ohm);
    {
        double step = std::max(1.0, std::abs(lo));
        int guard = 0;
        while (residual(lo, v, iph_a, d) < 0.0) {
            lo -= (step *= 2.0);
            if (++guard > 200)
                throw NumericError("iv_current: cannot bracket solution at v=" + std::to_string(v));
        }
    }

    double i = std::clamp(iph_a, lo, hi);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double g = residual(i, v, iph_a, d);
        if (std::abs(g) < kResidualTol) return i;
        if (g > 0.0)
            lo = i;
        else
            hi = i;
        double slope = residual_slope(i, v, iph_a, d);
        double next = i - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // damped fallback
        if (hi - lo < 1e-18) return 0.5 * (lo + hi);
        i = next;
    }
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "iv_current: no convergence (v=%.6g V, iph=%.6g A, i0=%.3g, n_vt=%.4g, "
                  "r_s=%.4g, r_sh=%.4g)",
                  v, iph_a, d.i0_a, d.n_vt_v, d.r_s_ohm, d.r_sh_ohm);
    throw NumericError(msg);
}

double solve_voc(double iph_a, const DiodeParams& d) {
    d.validate();
    if (iph_a <= 0.0) throw NumericError("solve_voc: dark cell (iph <= 0)");
    // At I = 0 the series resistance drops out:
    //   0 = iph - i0*expm1(V/n_vt) - V/r_sh  (decreasing in V)
    auto f = [&](double v) {
        double arg = v / d.n_vt_v;
        if (arg > kExpGuard) return -1e300;
        return iph_a - d.i0_a * std::expm1(arg) - v / d.r_sh_ohm;
    };
    double hi = d.n_vt_v * std::log1p(iph_a / d.i0_a);
    int guard = 0;
    while (f(hi) > 0.0) {
        hi += d.n_vt_v;
        if (++guard > 500) throw NumericError("solve_voc: cannot bracket Voc");
    }
    double lo = 0.0;
    double v = hi;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double g = f(v);
        if (g > 0.0)
            lo = v;
        else
            hi = v;
        double slope = -d.i0_a / d.n_vt_v * std::exp(std::min(v / d.n_vt_v, kExpGuard)) -
                       1.0 / d.r_sh_ohm;
        double next = v - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) < 1e-13 && std::abs(g) < 1e-12) return next;
        v = next;
    }
    return v;
}

DiodeParams calibrate_diode(double voc_target_v, double iph_ref_a, double n_vt_v, double r_s_ohm,
                            double r_sh_ohm) {
    if (voc_target_v <= 0.0 || iph_ref_a <= 0.0)
        throw ConfigError("diode calibration: voc and iph must be > 0");
    DiodeParams d;
    d.n_vt_v = n_vt_v;
    d.r_s_ohm = r_s_ohm;
    d.r_sh_ohm = r_sh_ohm;

    double iph_eff = iph_ref_a - voc_target_v / r_sh_ohm;
    if (iph_eff <= 0.0)
        throw ConfigError("diode calibration: infeasible (shunt sinks the full photocurrent)");
    double x = voc_target_v / n_vt_v;
    // i0 = iph_eff / expm1(x), evaluated in log space when exp would overflow
    d.i0_a = std::exp(std::log(iph_eff) - log_expm1(x));

    double check = iv_current(voc_target_v, iph_ref_a, d);
    if (std::abs(check) > 1e-6 * iph_ref_a)
        throw NumericError("diode calibration: Voc verification failed");
    return d;
}

double fill_factor_dense(double iph_a, const DiodeParams& d) {
    double voc = solve_voc(iph_a, d);
    double isc = iv_current(0.0, iph_a, d);
    const int n = 2000;
    double vstep = voc / n;
    int best_k = 0;
    std::vector<double> p(n + 1);
    for (int k = 0; k <= n; ++k) {
        p[k] = k * vstep * iv_current(k * vstep, iph_a, d);
        if (p[k] > p[best_k]) best_k = k;
    }
    double best_p = p[best_k];
    if (best_k > 0 && best_k < n) {
        double a = p[best_k - 1], b = p[best_k], c = p[best_k + 1];
        double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            double delta = 0.5 * (a - c) / denom;
            best_p = b - 0.25 * (a - c) * delta;
        }
    }
    return best_p / (isc * voc);
}

double calibrate_rs(double ff_target, double voc_target_v, double iph_ref_a, double n_vt_v,
                    double r_sh_ohm) {
    if (ff_target <= 0.0 || ff_target >= 1.0)
        throw ConfigError("r_s calibration: fill-factor target must be in (0, 1)");
    auto ff_of = [&](double rs) {
        DiodeParams d = calibrate_diode(voc_target_v, iph_ref_a, n_vt_v, rs, r_sh_ohm);
        return fill_factor_dense(iph_ref_a, d);
    };
    double ff0 = ff_of(0.0);
    if (ff_target >= ff0)
        throw ConfigError("r_s calibration: target fill factor exceeds the zero-r_s limit");
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (ff_of(hi) > ff_target) {
        hi *= 2.0;
        if (++guard > 20) throw NumericError("r_s calibration: cannot bracket target");
    }
    for (int iter = 0; iter < 80; ++iter) {
        double mid = 0.5 * (lo + hi);
        double ff = ff_of(mid);
        if (std::abs(ff - ff_target) < 1e-10 || hi - lo < 1e-12) return mid;
        if (ff > ff_target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double cell_temperature(double t_ambient_c, double dni_wm2, double thermal_k_c_per_wm2) {
    if (dni_wm2 < 0.0) throw ConfigError("cell_temperature: DNI must be non-negative");
    return t_ambient_c + thermal_k_c_per_wm2 * dni_wm2;
}

void DefectConfig::validate() const {
    if (rs_multiplier < 0.0 || iph_derate < 0.0 || rs_growth_per_day < 0.0)
        throw ConfigError("defect: multipliers must be non-negative");
}

SubModuleSpec inject_defect(const SubModuleSpec& spec, const DefectConfig& defect,
                            double elapsed_days) {
    defect.validate();
    SubModuleSpec out = spec;
    double ramp = 1.0 + defect.rs_growth_per_day * std::max(elapsed_days, 0.0);
    out.diode.r_s_ohm = spec.diode.r_s_ohm * defect.rs_multiplier * ramp;
    out.eta_opt = spec.eta_opt * defect.iph_derate;
    return out;
}

OperatingPoint operating_point(const SubModuleSpec& spec, const optics::Pointing& pointing,
                               const optics::Pointing& sun_dir,
                               const env::WeatherSample& weather) {
    OperatingPoint op;
    optics::AngularOffset off = optics::pointing_offset(pointing, sun_dir, spec.mount_offset);
    op.deviation_deg = optics::angular_deviation(pointing, sun_dir, spec.mount_offset);
    op.iph_a = photocurrent(spec, weather.dni_wm2, off);
    op.diode = spec.diode;
    op.tcell_c = weather.t_ambient_c;
    if (spec.thermal_enabled) {
        op.tcell_c = cell_temperature(weather.t_ambient_c, weather.dni_wm2, spec.thermal.k_c_per_wm2);
        double t_kelvin = op.tcell_c + 273.15;
        double ref_kelvin = spec.thermal.t_ref_c + 273.15;
        op.diode.n_vt_v = spec.diode.n_vt_v * t_kelvin / ref_kelvin;
        op.iph_a *= 1.0 + spec.thermal.isc_coeff_per_c * (op.tcell_c - spec.thermal.t_ref_c);
    }
    return op;
}

}  // namespace cpv::cell
