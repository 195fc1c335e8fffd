#pragma once

#include <string>
#include <vector>

#include "cpv/analysis.hpp"
#include "cpv/campaign.hpp"

namespace cpv::scenario {

/// Everything one reproducible run needs: environment, the four sub-module
/// parameterizations, campaign timing, scan geometry and analysis options.
/// Loaded from a single YAML document; all physical quantities carry unit
/// suffixes in their keys.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;

    campaign::CampaignSetup setup;  // day config, sub-modules, campaign, scan

    bool weather_from_file = false;
    std::string weather_csv_path;
    env::SynthWeatherConfig weather;  // used when weather_from_file is false

    analysis::FilterConfig filter;
    analysis::RatingOptions rating;

    std::vector<campaign::SessionConfig> sessions;
};

/// Parse and validate a scenario file. Sub-module electrical parameters may
/// be given directly (eta_opt, r_s_ohm, i0_a) or as calibration targets
/// (target_isc_900_ma, ff_target, voc_target_v); targets are resolved here.
/// The CPVBENCH_SEED environment variable overrides the configured seed.
Scenario load_scenario(const std::string& path);

/// The scenario's weather series: synthesized from the config, or loaded
/// from the referenced CSV.
std::vector<env::WeatherSample> scenario_weather(const Scenario& sc);

}  // namespace cpv::scenario
