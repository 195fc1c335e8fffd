#pragma once

#include <iosfwd>
#include <string>

namespace cpv::cli {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;  // data or numerical failure
inline constexpr int kExitConfig = 2;   // configuration or parse failure

/// Run the measurement campaign (and any configured acceptance-map
/// sessions) for a scenario; writes measurements.csv, skips.csv and
/// acceptance_<id>.csv into out_dir.
int run_simulate(const std::string& scenario_path, const std::string& out_dir, std::ostream& os);

/// Rate a measurement log under CSOC: filtering, regression, effective
/// concentration, CTM, efficiency and FF slope per sub-module. Writes
/// rating.txt plus isc_vs_dni.csv / pmax_vs_dni.csv / ff_vs_dni.csv.
int run_rate(const std::string& log_path, const std::string& scenario_path,
             const std::string& out_dir, int jobs, std::ostream& os);

/// Acceptance-map analysis of a session file: map build, 90% contour,
/// angular projection and acceptance angle. Writes acceptance.txt,
/// acceptance_1d.csv and contour90.csv.
int run_acceptance(const std::string& session_csv, const std::string& out_dir, std::ostream& os);

/// Arithmetic cross-check of the reference effective-concentration and CTM
/// table from the embedded (Isc@900, Jsc) rows.
int run_table2_check(std::ostream& os, double area_cm2 = 0.0655, double c_geo = 250.0);

}  // namespace cpv::cli
