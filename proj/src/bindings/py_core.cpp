// python bindings for the cpvsim core: domain types and the main operations
// of the simulation and analysis pipeline.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpv/analysis.hpp"
#include "cpv/campaign.hpp"
#include "cpv/cell.hpp"
#include "cpv/cli.hpp"
#include "cpv/env.hpp"
#include "cpv/meter.hpp"
#include "cpv/optics.hpp"
#include "cpv/scenario.hpp"
#include "cpv/tracker.hpp"

#include <sstream>

namespace py = pybind11;
using namespace cpv;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Concentrator-photovoltaic test-rig simulator and rating toolkit";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    // --- env ---------------------------------------------------------------
    py::class_<env::WeatherSample>(m, "WeatherSample")
        .def(py::init<>())
        .def_readwrite("timestamp", &env::WeatherSample::timestamp)
        .def_readwrite("dni_wm2", &env::WeatherSample::dni_wm2)
        .def_readwrite("diffuse_wm2", &env::WeatherSample::diffuse_wm2)
        .def_readwrite("t_ambient_c", &env::WeatherSample::t_ambient_c);

    py::class_<env::SunState>(m, "SunState")
        .def(py::init<>())
        .def_readwrite("true_azimuth_deg", &env::SunState::true_azimuth_deg)
        .def_readwrite("true_elevation_deg", &env::SunState::true_elevation_deg)
        .def_readwrite("astro_azimuth_deg", &env::SunState::astro_azimuth_deg)
        .def_readwrite("astro_elevation_deg", &env::SunState::astro_elevation_deg);

    py::class_<env::DayConfig>(m, "DayConfig")
        .def(py::init<>())
        .def_readwrite("day_start", &env::DayConfig::day_start)
        .def_readwrite("day_length_s", &env::DayConfig::day_length_s)
        .def_readwrite("n_days", &env::DayConfig::n_days)
        .def_readwrite("peak_elevation_deg", &env::DayConfig::peak_elevation_deg)
        .def_readwrite("azimuth_start_deg", &env::DayConfig::azimuth_start_deg)
        .def_readwrite("azimuth_end_deg", &env::DayConfig::azimuth_end_deg)
        .def_readwrite("astro_error_az_deg", &env::DayConfig::astro_error_az_deg)
        .def_readwrite("astro_error_el_deg", &env::DayConfig::astro_error_el_deg)
        .def_readwrite("astro_drift_az_deg", &env::DayConfig::astro_drift_az_deg)
        .def_readwrite("astro_drift_el_deg", &env::DayConfig::astro_drift_el_deg);

    py::class_<env::CloudEvent>(m, "CloudEvent")
        .def(py::init<>())
        .def_readwrite("start", &env::CloudEvent::start)
        .def_readwrite("end", &env::CloudEvent::end)
        .def_readwrite("dni_wm2", &env::CloudEvent::dni_wm2)
        .def_readwrite("diffuse_wm2", &env::CloudEvent::diffuse_wm2);

    py::class_<env::SynthWeatherConfig>(m, "SynthWeatherConfig")
        .def(py::init<>())
        .def_readwrite("day", &env::SynthWeatherConfig::day)
        .def_readwrite("sample_interval_s", &env::SynthWeatherConfig::sample_interval_s)
        .def_readwrite("peak_dni_wm2", &env::SynthWeatherConfig::peak_dni_wm2)
        .def_readwrite("daily_peak_dni_wm2", &env::SynthWeatherConfig::daily_peak_dni_wm2)
        .def_readwrite("dni_shape_exponent", &env::SynthWeatherConfig::dni_shape_exponent)
        .def_readwrite("noise_wm2", &env::SynthWeatherConfig::noise_wm2)
        .def_readwrite("diffuse_clear_wm2", &env::SynthWeatherConfig::diffuse_clear_wm2)
        .def_readwrite("t_ambient_base_c", &env::SynthWeatherConfig::t_ambient_base_c)
        .def_readwrite("t_ambient_swing_c", &env::SynthWeatherConfig::t_ambient_swing_c)
        .def_readwrite("clouds", &env::SynthWeatherConfig::clouds);

    m.def("sun_path", &env::sun_path, py::arg("time"), py::arg("day_config"),
          "Sun direction at a time, or None when the sun is below the horizon");
    m.def("synth_weather", &env::synth_weather, py::arg("config"), py::arg("seed"),
          "Deterministic synthetic weather series");
    m.def("load_weather", &env::load_weather, py::arg("path"));
    m.def("save_weather", &env::save_weather, py::arg("series"), py::arg("path"));

    // --- optics ------------------------------------------------------------
    py::class_<optics::Pointing>(m, "Pointing")
        .def(py::init<>())
        .def(py::init([](double az, double el) {
                 return optics::Pointing{az, el};
             }),
             py::arg("az_deg"), py::arg("el_deg"))
        .def_readwrite("az_deg", &optics::Pointing::az_deg)
        .def_readwrite("el_deg", &optics::Pointing::el_deg)
        .def("__repr__", [](const optics::Pointing& p) {
            std::ostringstream os;
            os << "Pointing(az=" << p.az_deg << ", el=" << p.el_deg << ")";
            return os.str();
        });

    py::class_<optics::AngularOffset>(m, "AngularOffset")
        .def(py::init<>())
        .def(py::init([](double az, double el) {
                 return optics::AngularOffset{az, el};
             }),
             py::arg("az_deg"), py::arg("el_deg"))
        .def_readwrite("az_deg", &optics::AngularOffset::az_deg)
        .def_readwrite("el_deg", &optics::AngularOffset::el_deg)
        .def("magnitude_deg", &optics::AngularOffset::magnitude_deg);

    py::class_<optics::AcceptanceProfile>(m, "AcceptanceProfile")
        .def(py::init<>())
        .def_readwrite("theta90_az_deg", &optics::AcceptanceProfile::theta90_az_deg)
        .def_readwrite("theta90_el_deg", &optics::AcceptanceProfile::theta90_el_deg)
        .def_readwrite("shape_exponent", &optics::AcceptanceProfile::shape_exponent);

    py::class_<optics::MountOffset>(m, "MountOffset")
        .def(py::init<>())
        .def_readwrite("d_az_deg", &optics::MountOffset::d_az_deg)
        .def_readwrite("d_el_deg", &optics::MountOffset::d_el_deg);

    m.def("great_circle_deg", &optics::great_circle_deg);
    m.def("angular_deviation", &optics::angular_deviation, py::arg("pointing"),
          py::arg("sun_dir"), py::arg("offset") = optics::MountOffset{});
    m.def("pointing_offset", &optics::pointing_offset, py::arg("pointing"), py::arg("sun_dir"),
          py::arg("offset") = optics::MountOffset{});
    m.def("transmission",
          py::overload_cast<const optics::AngularOffset&, const optics::AcceptanceProfile&>(
              &optics::transmission),
          py::arg("offset"), py::arg("profile"));
    m.def("transmission_radial",
          py::overload_cast<double, const optics::AcceptanceProfile&, double, double>(
              &optics::transmission),
          py::arg("theta_deg"), py::arg("profile"), py::arg("dir_az"), py::arg("dir_el"));
    m.def("calibrate_optics", &optics::calibrate_optics, py::arg("target_isc_900_a"),
          py::arg("jsc_eqe_ma_per_cm2"), py::arg("cell_area_cm2"), py::arg("c_geo"));

    // --- cell ----------------------------------------------------------------
    py::class_<cell::DiodeParams>(m, "DiodeParams")
        .def(py::init<>())
        .def_readwrite("i0_a", &cell::DiodeParams::i0_a)
        .def_readwrite("n_vt_v", &cell::DiodeParams::n_vt_v)
        .def_readwrite("r_s_ohm", &cell::DiodeParams::r_s_ohm)
        .def_readwrite("r_sh_ohm", &cell::DiodeParams::r_sh_ohm);

    py::enum_<cell::ArcType>(m, "ArcType")
        .value("MicroBeads", cell::ArcType::MicroBeads)
        .value("Reference", cell::ArcType::Reference);

    py::class_<cell::ThermalModel>(m, "ThermalModel")
        .def(py::init<>())
        .def_readwrite("k_c_per_wm2", &cell::ThermalModel::k_c_per_wm2)
        .def_readwrite("isc_coeff_per_c", &cell::ThermalModel::isc_coeff_per_c)
        .def_readwrite("t_ref_c", &cell::ThermalModel::t_ref_c);

    py::class_<cell::SubModuleSpec>(m, "SubModuleSpec")
        .def(py::init<>())
        .def_readwrite("id", &cell::SubModuleSpec::id)
        .def_readwrite("arc_type", &cell::SubModuleSpec::arc_type)
        .def_readwrite("jsc_eqe_ma_per_cm2", &cell::SubModuleSpec::jsc_eqe_ma_per_cm2)
        .def_readwrite("cell_area_cm2", &cell::SubModuleSpec::cell_area_cm2)
        .def_readwrite("c_geo", &cell::SubModuleSpec::c_geo)
        .def_readwrite("eta_opt", &cell::SubModuleSpec::eta_opt)
        .def_readwrite("lens_aperture_cm2", &cell::SubModuleSpec::lens_aperture_cm2)
        .def_readwrite("profile", &cell::SubModuleSpec::profile)
        .def_readwrite("mount_offset", &cell::SubModuleSpec::mount_offset)
        .def_readwrite("diode", &cell::SubModuleSpec::diode)
        .def_readwrite("thermal", &cell::SubModuleSpec::thermal)
        .def_readwrite("thermal_enabled", &cell::SubModuleSpec::thermal_enabled);

    py::class_<cell::DefectConfig>(m, "DefectConfig")
        .def(py::init<>())
        .def_readwrite("rs_multiplier", &cell::DefectConfig::rs_multiplier)
        .def_readwrite("iph_derate", &cell::DefectConfig::iph_derate)
        .def_readwrite("rs_growth_per_day", &cell::DefectConfig::rs_growth_per_day);

    m.def("photocurrent", &cell::photocurrent, py::arg("spec"), py::arg("dni_wm2"),
          py::arg("offset") = optics::AngularOffset{});
    m.def("iv_current", &cell::iv_current, py::arg("v"), py::arg("iph_a"), py::arg("diode"));
    m.def("calibrate_diode", &cell::calibrate_diode, py::arg("voc_target_v"),
          py::arg("iph_ref_a"), py::arg("n_vt_v"), py::arg("r_s_ohm"), py::arg("r_sh_ohm"));
    m.def("solve_voc", &cell::solve_voc, py::arg("iph_a"), py::arg("diode"));
    m.def("calibrate_rs", &cell::calibrate_rs, py::arg("ff_target"), py::arg("voc_target_v"),
          py::arg("iph_ref_a"), py::arg("n_vt_v"), py::arg("r_sh_ohm"));
    m.def("fill_factor_dense", &cell::fill_factor_dense, py::arg("iph_a"), py::arg("diode"));
    m.def("cell_temperature", &cell::cell_temperature, py::arg("t_ambient_c"), py::arg("dni_wm2"),
          py::arg("thermal_k_c_per_wm2"));
    m.def("inject_defect", &cell::inject_defect, py::arg("spec"), py::arg("defect"),
          py::arg("elapsed_days") = 0.0);

    // --- tracker -------------------------------------------------------------
    py::enum_<tracker::Mode>(m, "Mode")
        .value("OpenLoop", tracker::Mode::OpenLoop)
        .value("ScanAlign", tracker::Mode::ScanAlign);

    py::class_<tracker::ScanConfig>(m, "ScanConfig")
        .def(py::init<>())
        .def_readwrite("coarse_n", &tracker::ScanConfig::coarse_n)
        .def_readwrite("fine_n", &tracker::ScanConfig::fine_n)
        .def_readwrite("range_deg", &tracker::ScanConfig::range_deg);

    py::class_<tracker::ScanResult>(m, "ScanResult")
        .def_readonly("pointing", &tracker::ScanResult::pointing)
        .def_readonly("offset_az_deg", &tracker::ScanResult::offset_az_deg)
        .def_readonly("offset_el_deg", &tracker::ScanResult::offset_el_deg)
        .def_readonly("interpolated_isc_a", &tracker::ScanResult::interpolated_isc_a)
        .def_readonly("at_boundary", &tracker::ScanResult::at_boundary);

    m.def("astro_pointing", &tracker::astro_pointing, py::arg("sun"),
          py::arg("resolution_deg") = 0.01);
    m.def("scan_align", &tracker::scan_align, py::arg("center"), py::arg("shape_exponent"),
          py::arg("config"), py::arg("resolution_deg"), py::arg("measure_isc"),
          "Closed-loop short-circuit-current alignment scan");
    m.def(
        "cloudless_check",
        [](const std::vector<env::WeatherSample>& series, std::int64_t time, double window_s,
           double max_rel_spread, double diffuse_max) {
            return tracker::cloudless_check(series, time, window_s, max_rel_spread, diffuse_max);
        },
        py::arg("series"), py::arg("time"), py::arg("window_s") = 120.0,
        py::arg("max_rel_spread") = 0.02, py::arg("diffuse_max_wm2") = 140.0);

    // --- meter ---------------------------------------------------------------
    py::class_<meter::IVCurve>(m, "IVCurve")
        .def(py::init<>())
        .def_readwrite("voltage_v", &meter::IVCurve::voltage_v)
        .def_readwrite("current_a", &meter::IVCurve::current_a);

    py::class_<meter::IVSummary>(m, "IVSummary")
        .def(py::init<>())
        .def_readwrite("isc_a", &meter::IVSummary::isc_a)
        .def_readwrite("voc_v", &meter::IVSummary::voc_v)
        .def_readwrite("p_max_w", &meter::IVSummary::p_max_w)
        .def_readwrite("v_mp_v", &meter::IVSummary::v_mp_v)
        .def_readwrite("i_mp_a", &meter::IVSummary::i_mp_a)
        .def_readwrite("ff", &meter::IVSummary::ff);

    py::class_<cell::OperatingPoint>(m, "OperatingPoint")
        .def(py::init<>())
        .def_readwrite("iph_a", &cell::OperatingPoint::iph_a)
        .def_readwrite("diode", &cell::OperatingPoint::diode)
        .def_readwrite("tcell_c", &cell::OperatingPoint::tcell_c)
        .def_readwrite("deviation_deg", &cell::OperatingPoint::deviation_deg);

    m.def("operating_point", &cell::operating_point, py::arg("spec"), py::arg("pointing"),
          py::arg("sun_dir"), py::arg("weather"));
    m.def("sweep_voltages", &meter::sweep_voltages, py::arg("voc_v"),
          "The 32-point segmented voltage sweep");
    m.def(
        "measure_iv",
        [](const cell::OperatingPoint& op) { return meter::measure_iv(op); }, py::arg("op"));
    m.def("summarize", &meter::summarize, py::arg("curve"));

    // --- campaign ------------------------------------------------------------
    py::class_<campaign::MeasurementRecord>(m, "MeasurementRecord")
        .def(py::init<>())
        .def_readwrite("timestamp", &campaign::MeasurementRecord::timestamp)
        .def_readwrite("submodule_id", &campaign::MeasurementRecord::submodule_id)
        .def_readwrite("mode", &campaign::MeasurementRecord::mode)
        .def_readwrite("pointing", &campaign::MeasurementRecord::pointing)
        .def_readwrite("deviation_deg", &campaign::MeasurementRecord::deviation_deg)
        .def_readwrite("summary", &campaign::MeasurementRecord::summary)
        .def_readwrite("weather", &campaign::MeasurementRecord::weather);

    py::class_<campaign::AcceptanceSample>(m, "AcceptanceSample")
        .def(py::init<>())
        .def_readwrite("submodule_id", &campaign::AcceptanceSample::submodule_id)
        .def_readwrite("daz_deg", &campaign::AcceptanceSample::daz_deg)
        .def_readwrite("del_deg", &campaign::AcceptanceSample::del_deg)
        .def_readwrite("isc_over_dni", &campaign::AcceptanceSample::isc_over_dni);

    // --- analysis ------------------------------------------------------------
    py::class_<analysis::FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("t_min_c", &analysis::FilterConfig::t_min_c)
        .def_readwrite("t_max_c", &analysis::FilterConfig::t_max_c)
        .def_readwrite("dni_min_wm2", &analysis::FilterConfig::dni_min_wm2)
        .def_readwrite("diffuse_max_wm2", &analysis::FilterConfig::diffuse_max_wm2)
        .def_readwrite("stability_window_s", &analysis::FilterConfig::stability_window_s)
        .def_readwrite("stability_max_rel_spread",
                       &analysis::FilterConfig::stability_max_rel_spread);

    py::class_<analysis::CsocRating>(m, "CsocRating")
        .def_readonly("submodule_id", &analysis::CsocRating::submodule_id)
        .def_readonly("isc_csoc_a", &analysis::CsocRating::isc_csoc_a)
        .def_readonly("pmax_csoc_w", &analysis::CsocRating::pmax_csoc_w)
        .def_readonly("ff_csoc", &analysis::CsocRating::ff_csoc)
        .def_readonly("efficiency_csoc", &analysis::CsocRating::efficiency_csoc)
        .def_readonly("voc_mean_v", &analysis::CsocRating::voc_mean_v)
        .def_readonly("isc_coeffs", &analysis::CsocRating::isc_coeffs)
        .def_readonly("pmax_coeffs", &analysis::CsocRating::pmax_coeffs)
        .def_readonly("ta_term_used", &analysis::CsocRating::ta_term_used)
        .def_readonly("n_samples", &analysis::CsocRating::n_samples)
        .def_readonly("isc_residual_rms_a", &analysis::CsocRating::isc_residual_rms_a)
        .def_readonly("pmax_residual_rms_w", &analysis::CsocRating::pmax_residual_rms_w);

    m.def(
        "filter_samples",
        [](const std::vector<campaign::MeasurementRecord>& records,
           const std::vector<env::WeatherSample>& weather, const analysis::FilterConfig& cfg) {
            analysis::FilterResult r = analysis::filter_samples(records, weather, cfg);
            std::vector<std::pair<std::size_t, std::string>> rej;
            for (const auto& x : r.rejected) rej.emplace_back(x.record_index, x.rule);
            return py::make_tuple(r.kept, rej);
        },
        py::arg("records"), py::arg("weather"), py::arg("config") = analysis::FilterConfig{},
        "Returns (kept_records, [(rejected_index, rule), ...])");
    m.def(
        "regress_csoc",
        [](const std::vector<campaign::MeasurementRecord>& recs, double aperture) {
            return analysis::regress_csoc(recs, aperture);
        },
        py::arg("filtered_records"), py::arg("lens_aperture_cm2"));
    m.def("effective_concentration", &analysis::effective_concentration, py::arg("isc_900_a"),
          py::arg("jsc_eqe_ma_per_cm2"), py::arg("area_cm2"));
    m.def("ctm", &analysis::ctm, py::arg("c_eff"), py::arg("c_geo") = 250.0);
    m.def("efficiency", &analysis::efficiency, py::arg("pmax_w"), py::arg("dni_wm2"),
          py::arg("aperture_cm2"));
    m.def(
        "ff_slope",
        [](const std::vector<campaign::MeasurementRecord>& recs) {
            analysis::LinearFit f = analysis::ff_slope(recs);
            return py::make_tuple(f.slope, f.intercept);
        },
        py::arg("filtered_records"), "Returns (slope_per_wm2, intercept)");
    m.def(
        "acceptance_angle",
        [](const std::vector<std::pair<double, double>>& pairs) {
            std::vector<analysis::ProjectedSample> s;
            for (auto [d, v] : pairs) s.push_back({d, v});
            analysis::AcceptanceResult r = analysis::acceptance_angle(s);
            return py::make_tuple(r.angle_deg, r.spread_deg, r.samples_used);
        },
        py::arg("deviation_value_pairs"), "Returns (angle_deg, spread_deg, samples_used)");
    m.def(
        "build_map_and_contour",
        [](const std::vector<campaign::AcceptanceSample>& samples) {
            analysis::AcceptanceMap map = analysis::build_map(samples);
            std::vector<analysis::ContourPoint> poly = analysis::contour90(map);
            std::vector<std::pair<double, double>> out;
            for (const auto& p : poly) out.emplace_back(p.az_deg, p.el_deg);
            return out;
        },
        py::arg("samples"), "90% contour polygon as [(daz_deg, del_deg), ...]");
    m.def(
        "project_session",
        [](const std::vector<campaign::AcceptanceSample>& samples) {
            analysis::AcceptanceMap map = analysis::build_map(samples);
            std::vector<std::pair<double, double>> out;
            for (const auto& p : analysis::project_map(map))
                out.emplace_back(p.deviation_deg, p.value);
            return out;
        },
        py::arg("samples"), "Angular projection: [(deviation_deg, isc_over_dni), ...]");

    // --- scenario-level entry points ------------------------------------------
    m.def(
        "run_scenario",
        [](const std::string& scenario_path, const std::string& out_dir) {
            std::ostringstream os;
            int rc = cli::run_simulate(scenario_path, out_dir, os);
            return py::make_tuple(rc, os.str());
        },
        py::arg("scenario_path"), py::arg("out_dir"),
        "Run a scenario campaign; returns (exit_code, console_text)");
    m.def(
        "rate_log",
        [](const std::string& log_path, const std::string& scenario_path,
           const std::string& out_dir) {
            std::ostringstream os;
            int rc = cli::run_rate(log_path, scenario_path, out_dir, 1, os);
            return py::make_tuple(rc, os.str());
        },
        py::arg("log_path"), py::arg("scenario_path"), py::arg("out_dir"));
    m.def("read_measurement_log", &campaign::read_measurement_log, py::arg("path"));
    m.def("read_session_csv", &campaign::read_session_csv, py::arg("path"));
}
