#include "cpv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <vector>

#include "cpv/analysis.hpp"
#include "cpv/campaign.hpp"
#include "cpv/scenario.hpp"

namespace fs = std::filesystem;

namespace cpv::cli {

namespace {

int classify(const std::exception& e, std::ostream& os) {
    os << "error: " << e.what() << '\n';
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    return kExitRuntime;
}

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);
}

struct SubRating {
    analysis::CsocRating rating;
    analysis::LinearFit ff_fit;
    double c_eff = 0.0;
    double ctm = 0.0;
    std::vector<campaign::MeasurementRecord> kept;
    std::size_t rejected = 0;
};

SubRating rate_one(const cell::SubModuleSpec& spec,
                   const std::vector<campaign::MeasurementRecord>& records,
                   const std::vector<env::WeatherSample>& weather,
                   const analysis::FilterConfig& fcfg, const analysis::RatingOptions& ropt) {
    std::vector<campaign::MeasurementRecord> own;
    for (const auto& r : records)
        if (r.submodule_id == spec.id) own.push_back(r);

    analysis::FilterResult filtered = analysis::filter_samples(own, weather, fcfg);
    SubRating out;
    out.kept = std::move(filtered.kept);
    out.rejected = filtered.rejected.size();
    out.rating = analysis::regress_csoc(out.kept, spec.lens_aperture_cm2, ropt);
    out.ff_fit = analysis::ff_slope(out.kept, ropt.min_samples, ropt.min_dni_span_wm2);
    out.c_eff = analysis::effective_concentration(out.rating.isc_csoc_a, spec.jsc_eqe_ma_per_cm2,
                                                  spec.cell_area_cm2);
    out.ctm = analysis::ctm(out.c_eff, spec.c_geo);
    return out;
}

void write_plot_csv(const std::string& path, const char* value_header,
                    const std::vector<std::pair<std::string, const SubRating*>>& ratings,
                    double (*pick)(const campaign::MeasurementRecord&)) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "submodule,dni_wm2," << value_header << '\n';
    char buf[160];
    for (const auto& [id, sr] : ratings)
        for (const auto& r : sr->kept) {
            std::snprintf(buf, sizeof(buf), "%s,%.3f,%.8g\n", id.c_str(), r.weather.dni_wm2,
                          pick(r));
            out << buf;
        }
}

}  // namespace

int run_simulate(const std::string& scenario_path, const std::string& out_dir, std::ostream& os) {
    try {
        scenario::Scenario sc = scenario::load_scenario(scenario_path);
        ensure_dir(out_dir);
        std::vector<env::WeatherSample> weather = scenario::scenario_weather(sc);

        campaign::CampaignResult result = campaign::run_campaign(sc.setup, weather);
        campaign::write_measurement_log(result.records, (fs::path(out_dir) / "measurements.csv").string());
        campaign::write_skip_log(result.skips, (fs::path(out_dir) / "skips.csv").string());

        std::map<std::string, int> session_count;
        for (const auto& session : sc.sessions) {
            campaign::SessionResult sr = campaign::run_acceptance_session(sc.setup, session, weather);
            int k = ++session_count[session.submodule_id];
            std::string name = "acceptance_" + session.submodule_id +
                               (k > 1 ? "_" + std::to_string(k) : "") + ".csv";
            campaign::write_session_csv(sr.samples, (fs::path(out_dir) / name).string());
            if (!sr.complete)
                os << "session " << session.submodule_id << ": aborted (" << sr.abort_reason
                   << "), partial data written\n";
            if (sr.degenerate)
                os << "session " << session.submodule_id << ": degenerate (no signal)\n";
        }

        for (const auto& sm : sc.setup.submodules) {
            std::size_t n = 0, skips = 0;
            double isc_sum = 0.0;
            for (const auto& r : result.records)
                if (r.submodule_id == sm.id) {
                    ++n;
                    isc_sum += r.summary.isc_a;
                }
            for (const auto& s : result.skips)
                if (s.submodule_id == sm.id) ++skips;
            char line[160];
            std::snprintf(line, sizeof(line),
                          "%s: %zu records, %zu skips, mean Isc %.1f mA\n", sm.id.c_str(), n,
                          skips, n ? 1e3 * isc_sum / static_cast<double>(n) : 0.0);
            os << line;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify(e, os);
    }
}

int run_rate(const std::string& log_path, const std::string& scenario_path,
             const std::string& out_dir, int jobs, std::ostream& os) {
    try {
        if (jobs < 1) throw ConfigError("--jobs must be >= 1");
        scenario::Scenario sc = scenario::load_scenario(scenario_path);
        ensure_dir(out_dir);
        std::vector<campaign::MeasurementRecord> records =
            campaign::read_measurement_log(log_path);
        std::vector<env::WeatherSample> weather = scenario::scenario_weather(sc);

        std::vector<SubRating> ratings(sc.setup.submodules.size());
        if (jobs > 1) {
            std::vector<std::future<SubRating>> futs;
            for (const auto& sm : sc.setup.submodules)
                futs.push_back(std::async(std::launch::async, rate_one, std::cref(sm),
                                          std::cref(records), std::cref(weather),
                                          std::cref(sc.filter), std::cref(sc.rating)));
            for (std::size_t k = 0; k < futs.size(); ++k) ratings[k] = futs[k].get();
        } else {
            for (std::size_t k = 0; k < sc.setup.submodules.size(); ++k)
                ratings[k] = rate_one(sc.setup.submodules[k], records, weather, sc.filter,
                                      sc.rating);
        }

        std::ofstream report(fs::path(out_dir) / "rating.txt");
        if (!report) throw DataError("cannot write rating report");
        report << "# CSOC rating report\n";
        report << "scenario = " << sc.name << "\n";
        report << "log = " << log_path << "\n";
        char buf[256];
        for (std::size_t k = 0; k < ratings.size(); ++k) {
            const auto& sm = sc.setup.submodules[k];
            const auto& sr = ratings[k];
            const auto& rt = sr.rating;
            report << "\n[submodule " << sm.id << "]\n";
            std::snprintf(buf, sizeof(buf),
                          "n_samples = %zu\nn_rejected = %zu\nisc_csoc_a = %.8g\n"
                          "pmax_csoc_w = %.8g\nvoc_mean_v = %.6f\nff_csoc = %.6f\n",
                          rt.n_samples, sr.rejected, rt.isc_csoc_a, rt.pmax_csoc_w,
                          rt.voc_mean_v, rt.ff_csoc);
            report << buf;
            std::snprintf(buf, sizeof(buf),
                          "efficiency_csoc = %.6f\nefficiency_pct = %.1f\n"
                          "effective_concentration = %.2f\nctm = %.6f\nctm_pct = %.0f\n",
                          rt.efficiency_csoc, 100.0 * rt.efficiency_csoc, sr.c_eff, sr.ctm,
                          std::round(100.0 * sr.ctm));
            report << buf;
            std::snprintf(buf, sizeof(buf),
                          "ff_slope_per_wm2 = %.6g\nff_intercept = %.6f\nta_term_used = %s\n"
                          "isc_residual_rms_a = %.4g\npmax_residual_rms_w = %.4g\n",
                          sr.ff_fit.slope, sr.ff_fit.intercept, rt.ta_term_used ? "true" : "false",
                          rt.isc_residual_rms_a, rt.pmax_residual_rms_w);
            report << buf;
            for (std::size_t c = 0; c < rt.isc_coeffs.size(); ++c) {
                std::snprintf(buf, sizeof(buf), "isc_coeff_b%zu = %.10g\n", c + 1,
                              rt.isc_coeffs[c]);
                report << buf;
            }
            for (std::size_t c = 0; c < rt.pmax_coeffs.size(); ++c) {
                std::snprintf(buf, sizeof(buf), "pmax_coeff_a%zu = %.10g\n", c + 1,
                              rt.pmax_coeffs[c]);
                report << buf;
            }

            std::snprintf(buf, sizeof(buf),
                          "%s: Isc@CSOC %.1f mA, Pmax@CSOC %.1f mW, FF %.3f, eff %.1f%%, "
                          "CTM %.0f%%\n",
                          sm.id.c_str(), 1e3 * rt.isc_csoc_a, 1e3 * rt.pmax_csoc_w, rt.ff_csoc,
                          100.0 * rt.efficiency_csoc, std::round(100.0 * sr.ctm));
            os << buf;
        }

        std::vector<std::pair<std::string, const SubRating*>> by_id;
        for (std::size_t k = 0; k < ratings.size(); ++k)
            by_id.emplace_back(sc.setup.submodules[k].id, &ratings[k]);
        write_plot_csv((fs::path(out_dir) / "isc_vs_dni.csv").string(), "isc_a", by_id,
                       [](const campaign::MeasurementRecord& r) { return r.summary.isc_a; });
        write_plot_csv((fs::path(out_dir) / "pmax_vs_dni.csv").string(), "pmax_w", by_id,
                       [](const campaign::MeasurementRecord& r) { return r.summary.p_max_w; });
        write_plot_csv((fs::path(out_dir) / "ff_vs_dni.csv").string(), "ff", by_id,
                       [](const campaign::MeasurementRecord& r) { return r.summary.ff; });
        return kExitOk;
    } catch (const std::exception& e) {
        return classify(e, os);
    }
}

int run_acceptance(const std::string& session_csv, const std::string& out_dir, std::ostream& os) {
    try {
        ensure_dir(out_dir);
        std::vector<campaign::AcceptanceSample> all = campaign::read_session_csv(session_csv);

        // group by sub-module, preserving first-seen order
        std::vector<std::string> order;
        std::map<std::string, std::vector<campaign::AcceptanceSample>> groups;
        for (const auto& s : all) {
            if (!groups.count(s.submodule_id)) order.push_back(s.submodule_id);
            groups[s.submodule_id].push_back(s);
        }

        std::ofstream report(fs::path(out_dir) / "acceptance.txt");
        std::ofstream oned(fs::path(out_dir) / "acceptance_1d.csv");
        std::ofstream cont(fs::path(out_dir) / "contour90.csv");
        if (!report || !oned || !cont) throw DataError("cannot write acceptance outputs");
        oned << "submodule,deviation_deg,isc_norm\n";
        cont << "submodule,daz_deg,del_deg\n";
        report << "# acceptance-angle report\n";

        char buf[200];
        for (const std::string& id : order) {
            analysis::AcceptanceMap map = analysis::build_map(groups[id]);
            std::vector<analysis::ContourPoint> poly = analysis::contour90(map);
            std::vector<analysis::ProjectedSample> proj = analysis::project_map(map);
            analysis::AcceptanceResult res = analysis::acceptance_angle(proj);

            double az_lo = poly.front().az_deg, az_hi = az_lo;
            double el_lo = poly.front().el_deg, el_hi = el_lo;
            for (const auto& p : poly) {
                az_lo = std::min(az_lo, p.az_deg);
                az_hi = std::max(az_hi, p.az_deg);
                el_lo = std::min(el_lo, p.el_deg);
                el_hi = std::max(el_hi, p.el_deg);
            }

            report << "\n[submodule " << id << "]\n";
            std::snprintf(buf, sizeof(buf),
                          "acceptance_angle_deg = %.4f\nspread_deg = %.4f\nsamples_used = %zu\n"
                          "contour_semi_axis_az_deg = %.4f\ncontour_semi_axis_el_deg = %.4f\n"
                          "contour_center_az_deg = %.4f\ncontour_center_el_deg = %.4f\n",
                          res.angle_deg, res.spread_deg, res.samples_used,
                          0.5 * (az_hi - az_lo), 0.5 * (el_hi - el_lo), 0.5 * (az_hi + az_lo),
                          0.5 * (el_hi + el_lo));
            report << buf;

            for (const auto& p : proj) {
                std::snprintf(buf, sizeof(buf), "%s,%.4f,%.8g\n", id.c_str(), p.deviation_deg,
                              p.value / map.max_value);
                oned << buf;
            }
            for (const auto& p : poly) {
                std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f\n", id.c_str(), p.az_deg, p.el_deg);
                cont << buf;
            }
            std::snprintf(buf, sizeof(buf), "%s: acceptance angle %.2f deg (+/- %.2f)\n",
                          id.c_str(), res.angle_deg, res.spread_deg);
            os << buf;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify(e, os);
    }
}

int run_table2_check(std::ostream& os, double area_cm2, double c_geo) {
    try {
        struct Row {
            const char* id;
            const char* type;
            double isc_ma;
            double jsc;
        };
        const Row rows[] = {{"A", "micro_beads", 196.0, 13.24},
                            {"B", "micro_beads", 192.0, 13.20},
                            {"C", "reference", 172.0, 12.87},
                            {"D", "reference", 144.0, 12.75}};
        os << "submodule,type,isc_ma,jsc_ma_cm2,effective_concentration,ctm_pct\n";
        char buf[160];
        for (const Row& r : rows) {
            double c_eff = analysis::effective_concentration(r.isc_ma * 1e-3, r.jsc, area_cm2);
            double ctm_pct = 100.0 * analysis::ctm(c_eff, c_geo);
            std::snprintf(buf, sizeof(buf), "%s,%s,%.0f,%.2f,%.0f,%.0f\n", r.id, r.type, r.isc_ma,
                          r.jsc, std::round(c_eff), std::round(ctm_pct));
            os << buf;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify(e, os);
    }
}

}  // namespace cpv::cli
