#include "cpv/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>

namespace cpv::scenario {

namespace {

template <typename T>
T req(const YAML::Node& n, const std::string& key, const std::string& ctx) {
    if (!n || !n[key]) throw ConfigError(ctx + ": missing required key '" + key + "'");
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(ctx + ": cannot parse '" + key + "'");
    }
}

template <typename T>
T opt(const YAML::Node& n, const std::string& key, T fallback) {
    if (!n || !n[key]) return fallback;
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("cannot parse optional key '" + key + "'");
    }
}

std::int64_t req_time(const YAML::Node& n, const std::string& key, const std::string& ctx) {
    return parse_iso8601_utc(req<std::string>(n, key, ctx));
}

env::DayConfig parse_day(const YAML::Node& n) {
    env::DayConfig day;
    day.day_start = req_time(n, "start_utc", "env.day");
    day.day_length_s = req<double>(n, "length_hours", "env.day") * 3600.0;
    day.n_days = opt<int>(n, "days", 1);
    day.peak_elevation_deg = opt<double>(n, "peak_elevation_deg", 60.0);
    day.azimuth_start_deg = opt<double>(n, "azimuth_start_deg", 110.0);
    day.azimuth_end_deg = opt<double>(n, "azimuth_end_deg", 250.0);
    day.astro_error_az_deg = opt<double>(n, "astro_error_az_deg", 0.0);
    day.astro_error_el_deg = opt<double>(n, "astro_error_el_deg", 0.0);
    day.astro_drift_az_deg = opt<double>(n, "astro_drift_az_deg", 0.0);
    day.astro_drift_el_deg = opt<double>(n, "astro_drift_el_deg", 0.0);
    if (day.day_length_s <= 0.0 || day.day_length_s > 86400.0)
        throw ConfigError("env.day: length_hours must be in (0, 24]");
    if (day.n_days < 1) throw ConfigError("env.day: days must be >= 1");
    return day;
}

cell::SubModuleSpec parse_submodule(const YAML::Node& n) {
    cell::SubModuleSpec sm;
    sm.id = req<std::string>(n, "id", "submodule");
    const std::string ctx = "submodule " + sm.id;

    std::string arc = opt<std::string>(n, "arc_type", "micro_beads");
    if (arc == "micro_beads")
        sm.arc_type = cell::ArcType::MicroBeads;
    else if (arc == "reference")
        sm.arc_type = cell::ArcType::Reference;
    else
        throw ConfigError(ctx + ": arc_type must be 'micro_beads' or 'reference'");

    sm.jsc_eqe_ma_per_cm2 = req<double>(n, "jsc_eqe_ma_per_cm2", ctx);
    sm.cell_area_cm2 = req<double>(n, "cell_area_cm2", ctx);
    sm.c_geo = opt<double>(n, "c_geo", 250.0);
    sm.lens_aperture_cm2 = opt<double>(n, "lens_aperture_cm2", 16.42);

    if (YAML::Node p = n["profile"]) {
        sm.profile.theta90_az_deg = opt<double>(p, "theta90_az_deg", 0.78);
        sm.profile.theta90_el_deg = opt<double>(p, "theta90_el_deg", 0.78);
        sm.profile.shape_exponent = opt<double>(p, "shape_exponent", 6.0);
    }
    if (YAML::Node m = n["mount_offset"]) {
        sm.mount_offset.d_az_deg = opt<double>(m, "d_az_deg", 0.0);
        sm.mount_offset.d_el_deg = opt<double>(m, "d_el_deg", 0.0);
    }

    // optics: either the lumped efficiency itself or a current target
    if (n["eta_opt"]) {
        sm.eta_opt = req<double>(n, "eta_opt", ctx);
        if (n["target_isc_900_ma"])
            throw ConfigError(ctx + ": give either eta_opt or target_isc_900_ma, not both");
    } else {
        double target_ma = req<double>(n, "target_isc_900_ma", ctx);
        sm.eta_opt = optics::calibrate_optics(target_ma * 1e-3, sm.jsc_eqe_ma_per_cm2,
                                              sm.cell_area_cm2, sm.c_geo);
    }

    // electrics: n_vt and r_sh always direct; r_s via value or fill-factor
    // target; i0 via value or Voc target
    YAML::Node d = n["diode"];
    if (!d) throw ConfigError(ctx + ": missing 'diode' section");
    sm.diode.n_vt_v = opt<double>(d, "n_vt_v", 0.0848);
    sm.diode.r_sh_ohm = opt<double>(d, "r_sh_ohm", 5000.0);

    // reference photocurrent at CSOC irradiance and zero deviation
    double iph_ref = sm.jsc_eqe_ma_per_cm2 * 1e-3 * sm.cell_area_cm2 * sm.c_geo * sm.eta_opt * 0.9;

    if (d["r_s_ohm"]) {
        sm.diode.r_s_ohm = req<double>(d, "r_s_ohm", ctx);
        if (d["ff_target"])
            throw ConfigError(ctx + ": give either r_s_ohm or ff_target, not both");
    } else if (d["ff_target"]) {
        double ff = req<double>(d, "ff_target", ctx);
        double voc = req<double>(d, "voc_target_v", ctx + " (ff_target needs voc_target_v)");
        sm.diode.r_s_ohm = cell::calibrate_rs(ff, voc, iph_ref, sm.diode.n_vt_v,
                                              sm.diode.r_sh_ohm);
    } else {
        sm.diode.r_s_ohm = 0.0;
    }

    if (d["i0_a"]) {
        sm.diode.i0_a = req<double>(d, "i0_a", ctx);
        if (d["voc_target_v"] && !d["ff_target"])
            throw ConfigError(ctx + ": give either i0_a or voc_target_v, not both");
    } else {
        double voc = req<double>(d, "voc_target_v", ctx);
        sm.diode =
            cell::calibrate_diode(voc, iph_ref, sm.diode.n_vt_v, sm.diode.r_s_ohm,
                                  sm.diode.r_sh_ohm);
    }

    if (YAML::Node t = n["thermal"]) {
        sm.thermal_enabled = opt<bool>(t, "enabled", false);
        sm.thermal.k_c_per_wm2 = opt<double>(t, "k_c_per_wm2", 0.03);
        sm.thermal.isc_coeff_per_c = opt<double>(t, "isc_coeff_per_c", 5e-4);
        sm.thermal.t_ref_c = opt<double>(t, "t_ref_c", 25.0);
    }

    if (YAML::Node df = n["defect"]) {
        cell::DefectConfig defect;
        defect.rs_multiplier = opt<double>(df, "rs_multiplier", 1.0);
        defect.iph_derate = opt<double>(df, "iph_derate", 1.0);
        defect.rs_growth_per_day = opt<double>(df, "rs_growth_per_day", 0.0);
        sm = cell::inject_defect(sm, defect);
    }

    sm.validate();
    return sm;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("scenario file not found: " + path);
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("scenario " + path + ": " + e.what());
    }

    Scenario sc;
    sc.name = opt<std::string>(root, "name", "unnamed");
    sc.seed = opt<std::uint64_t>(root, "seed", 0);
    if (const char* env_seed = std::getenv("CPVBENCH_SEED")) {
        try {
            sc.seed = std::stoull(env_seed);
        } catch (...) {
            throw ConfigError("CPVBENCH_SEED is not an integer");
        }
    }

    YAML::Node env_node = root["env"];
    if (!env_node) throw ConfigError("scenario: missing 'env' section");
    sc.setup.day = parse_day(env_node["day"]);

    YAML::Node wn = env_node["weather"];
    if (!wn) throw ConfigError("scenario: missing 'env.weather' section");
    std::string source = opt<std::string>(wn, "source", "synth");
    if (source == "csv") {
        sc.weather_from_file = true;
        sc.weather_csv_path = req<std::string>(wn, "csv_path", "env.weather");
        // relative to the scenario file
        std::filesystem::path base = std::filesystem::path(path).parent_path();
        std::filesystem::path p = sc.weather_csv_path;
        if (p.is_relative()) sc.weather_csv_path = (base / p).string();
        if (!std::filesystem::exists(sc.weather_csv_path))
            throw ConfigError("weather csv not found: " + sc.weather_csv_path);
    } else if (source != "synth") {
        throw ConfigError("env.weather.source must be 'synth' or 'csv'");
    }
    sc.weather.day = sc.setup.day;
    sc.weather.sample_interval_s = opt<double>(wn, "sample_interval_s", 10.0);
    sc.weather.peak_dni_wm2 = opt<double>(wn, "peak_dni_wm2", 950.0);
    sc.weather.daily_peak_dni_wm2 =
        opt<std::vector<double>>(wn, "daily_peak_dni_wm2", {});
    sc.weather.dni_shape_exponent = opt<double>(wn, "dni_shape_exponent", 0.35);
    sc.weather.noise_wm2 = opt<double>(wn, "noise_wm2", 0.0);
    sc.weather.diffuse_clear_wm2 = opt<double>(wn, "diffuse_clear_wm2", 80.0);
    sc.weather.t_ambient_base_c = opt<double>(wn, "t_ambient_base_c", 15.0);
    sc.weather.t_ambient_swing_c = opt<double>(wn, "t_ambient_swing_c", 8.0);
    if (YAML::Node clouds = wn["clouds"]) {
        for (const auto& cn : clouds) {
            env::CloudEvent ev;
            int day = opt<int>(cn, "day", 0);
            std::int64_t base = sc.setup.day.day_start + static_cast<std::int64_t>(day) * 86400;
            ev.start = base + static_cast<std::int64_t>(req<double>(cn, "start_offset_s",
                                                                    "cloud event"));
            ev.end = base + static_cast<std::int64_t>(req<double>(cn, "end_offset_s",
                                                                  "cloud event"));
            ev.dni_wm2 = opt<double>(cn, "dni_wm2", 100.0);
            ev.diffuse_wm2 = opt<double>(cn, "diffuse_wm2", 250.0);
            sc.weather.clouds.push_back(ev);
        }
    }
    sc.setup.weather_interval_s = sc.weather.sample_interval_s;

    if (YAML::Node cn = root["campaign"]) {
        sc.setup.config.cycle_period_s = opt<double>(cn, "cycle_period_s", 196.0);
        sc.setup.config.slot_seconds = opt<double>(cn, "slot_seconds", 10.0);
        sc.setup.isc_noise_a = opt<double>(cn, "isc_noise_a", 0.0);
        if (cn["mode"]) {
            sc.setup.config.mode_schedule = {
                {0, campaign::mode_from_name(req<std::string>(cn, "mode", "campaign"))}};
        }
        if (YAML::Node sched = cn["schedule"]) {
            sc.setup.config.mode_schedule.clear();
            for (const auto& e : sched)
                sc.setup.config.mode_schedule.push_back(
                    {req_time(e, "start_utc", "campaign.schedule"),
                     campaign::mode_from_name(req<std::string>(e, "mode", "campaign.schedule"))});
            std::sort(sc.setup.config.mode_schedule.begin(),
                      sc.setup.config.mode_schedule.end(),
                      [](const campaign::ModeWindow& a, const campaign::ModeWindow& b) {
                          return a.start < b.start;
                      });
        }
    }
    if (YAML::Node tn = root["tracker"])
        sc.setup.tracker_resolution_deg = opt<double>(tn, "resolution_deg", 0.01);
    if (YAML::Node sn = root["scan"]) {
        sc.setup.scan.coarse_n = opt<int>(sn, "coarse_n", 4);
        sc.setup.scan.fine_n = opt<int>(sn, "fine_n", 10);
        sc.setup.scan.range_deg = opt<double>(sn, "range_deg", 2.25);
    }
    sc.setup.seed = sc.seed;

    if (YAML::Node an = root["analysis"]) {
        sc.filter.t_min_c = opt<double>(an, "t_min_c", 10.0);
        sc.filter.t_max_c = opt<double>(an, "t_max_c", 30.0);
        sc.filter.dni_min_wm2 = opt<double>(an, "dni_min_wm2", 750.0);
        sc.filter.diffuse_max_wm2 = opt<double>(an, "diffuse_max_wm2", 140.0);
        sc.filter.stability_window_s = opt<double>(an, "stability_window_s", 600.0);
        sc.filter.stability_max_rel_spread = opt<double>(an, "stability_max_rel_spread", 0.02);
        sc.rating.min_samples = opt<std::size_t>(an, "min_samples", 20);
        sc.rating.min_dni_span_wm2 = opt<double>(an, "min_dni_span_wm2", 100.0);
        std::string reg = opt<std::string>(an, "regression", "astm");
        if (reg == "astm")
            sc.rating.mode = analysis::RegressionMode::Astm;
        else if (reg == "linear")
            sc.rating.mode = analysis::RegressionMode::LinearIsc;
        else
            throw ConfigError("analysis.regression must be 'astm' or 'linear'");
        if (sc.filter.dni_min_wm2 <= 0.0 || sc.filter.diffuse_max_wm2 <= 0.0 ||
            sc.filter.stability_window_s <= 0.0 || sc.filter.stability_max_rel_spread <= 0.0)
            throw ConfigError("analysis thresholds must be positive");
    }

    YAML::Node sms = root["submodules"];
    if (!sms || sms.size() == 0) throw ConfigError("scenario: no submodules defined");
    std::set<std::string> ids;
    for (const auto& n : sms) {
        cell::SubModuleSpec sm = parse_submodule(n);
        if (!ids.insert(sm.id).second)
            throw ConfigError("duplicate submodule id '" + sm.id + "'");
        sc.setup.submodules.push_back(sm);
    }

    if (YAML::Node sess = root["acceptance_sessions"]) {
        for (const auto& n : sess) {
            campaign::SessionConfig s;
            s.submodule_id = req<std::string>(n, "submodule", "acceptance session");
            if (!ids.count(s.submodule_id))
                throw ConfigError("acceptance session references unknown submodule '" +
                                  s.submodule_id + "'");
            if (n["start_utc"])
                s.start_time = req_time(n, "start_utc", "acceptance session");
            else
                s.start_time = sc.setup.day.day_start +
                               static_cast<std::int64_t>(req<double>(n, "start_offset_s",
                                                                     "acceptance session"));
            s.frame_deg = opt<double>(n, "frame_deg", 3.0);
            s.step_deg = opt<double>(n, "step_deg", 0.25);
            s.dwell_s = opt<double>(n, "dwell_s", 10.0);
            sc.sessions.push_back(s);
        }
    }

    sc.setup.config.validate(sc.setup.submodules.size());
    sc.setup.scan.validate();
    return sc;
}

std::vector<env::WeatherSample> scenario_weather(const Scenario& sc) {
    if (sc.weather_from_file) return env::load_weather(sc.weather_csv_path);
    return env::synth_weather(sc.weather, sc.seed);
}

}  // namespace cpv::scenario
