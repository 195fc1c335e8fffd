// cpvsim: closed-loop CPV test-rig simulator and CSOC rating toolkit.

#include <CLI11.hpp>

#include <iostream>

#include "cpv/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cpvsim: concentrator-photovoltaic test-rig simulator and rating toolkit"};
    app.require_subcommand(1);

    // simulate
    std::string scenario_path, out_dir = "out";
    CLI::App* sim = app.add_subcommand("simulate", "Run the measurement campaign of a scenario");
    sim->add_option("scenario", scenario_path, "Scenario YAML file")->required();
    sim->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();

    // rate
    std::string log_path, rate_scenario, rate_out = "out";
    int jobs = 1;
    bool table2 = false;
    CLI::App* rate = app.add_subcommand("rate", "CSOC rating of a measurement log");
    rate->add_option("log", log_path, "Measurement log CSV");
    rate->add_option("scenario", rate_scenario, "Scenario YAML file");
    rate->add_option("-o,--out", rate_out, "Output directory")->capture_default_str();
    rate->add_option("-j,--jobs", jobs, "Parallel sub-module analyses")->capture_default_str();
    rate->add_flag("--table2-check", table2,
                   "Arithmetic cross-check of the reference concentration/CTM table");

    // acceptance
    std::string session_path, acc_out = "out";
    CLI::App* acc = app.add_subcommand("acceptance", "Acceptance-map analysis of a session file");
    acc->add_option("session", session_path, "Acceptance session CSV")->required();
    acc->add_option("-o,--out", acc_out, "Output directory")->capture_default_str();

    // table2-check
    double area = 0.0655, c_geo = 250.0;
    CLI::App* t2 = app.add_subcommand(
        "table2-check", "Effective concentration and CTM from the reference current table");
    t2->add_option("--area-cm2", area, "Cell active area")->capture_default_str();
    t2->add_option("--c-geo", c_geo, "Geometric concentration")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cpv::cli::kExitConfig;  // help exits 0, parse errors 2
    }

    if (sim->parsed()) return cpv::cli::run_simulate(scenario_path, out_dir, std::cout);
    if (rate->parsed()) {
        if (table2) return cpv::cli::run_table2_check(std::cout);
        if (log_path.empty() || rate_scenario.empty()) {
            std::cout << "error: rate needs <log> and <scenario> (or --table2-check)\n";
            return cpv::cli::kExitConfig;
        }
        return cpv::cli::run_rate(log_path, rate_scenario, rate_out, jobs, std::cout);
    }
    if (acc->parsed()) return cpv::cli::run_acceptance(session_path, acc_out, std::cout);
    if (t2->parsed()) return cpv::cli::run_table2_check(std::cout, area, c_geo);
    return cpv::cli::kExitConfig;
}
