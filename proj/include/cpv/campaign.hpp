#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpv/cell.hpp"
#include "cpv/env.hpp"
#include "cpv/meter.hpp"
#include "cpv/tracker.hpp"

namespace cpv::campaign {

/// One timestamped sub-module characterization; the unit of the analysis
/// pipeline.
struct MeasurementRecord {
    std::int64_t timestamp = 0;
    std::string submodule_id;
    tracker::Mode mode = tracker::Mode::ScanAlign;
    optics::Pointing pointing;
    double deviation_deg = 0.0;  // optical axis to true sun
    meter::IVSummary summary;
    env::WeatherSample weather;  // snapshot at measurement time
};

struct SkipEntry {
    std::int64_t timestamp = 0;
    std::string submodule_id;
    std::string reason;
};

/// A mode taking effect at `start` (epoch seconds) until the next entry.
struct ModeWindow {
    std::int64_t start = 0;
    tracker::Mode mode = tracker::Mode::ScanAlign;
};

struct CampaignConfig {
    double cycle_period_s = 196.0;  // one full characterization round
    double slot_seconds = 10.0;     // align + measure budget per sub-module
    std::vector<ModeWindow> mode_schedule{{0, tracker::Mode::ScanAlign}};

    void validate(std::size_t n_submodules) const;
    tracker::Mode mode_at(std::int64_t time) const;
};

struct CampaignSetup {
    std::vector<cell::SubModuleSpec> submodules;
    env::DayConfig day;
    CampaignConfig config;
    tracker::ScanConfig scan;
    double tracker_resolution_deg = 0.01;
    double weather_interval_s = 10.0;
    double isc_noise_a = 0.0;  // additive current noise in every measurement
    std::uint64_t seed = 0;
};

struct CampaignResult {
    std::vector<MeasurementRecord> records;
    std::vector<SkipEntry> skips;
};

/// Run the full measurement campaign over the configured day windows.
/// Each cycle walks the sub-modules in order: sky gate, then scan-align (or
/// open-loop pointing), then a 32-point I-V sweep; sun and weather are
/// frozen within a slot. Deterministic for a fixed seed. A cycle only runs
/// when its full period fits inside the day window; the run ends cleanly
/// when the weather series is exhausted.
CampaignResult run_campaign(const CampaignSetup& setup,
                            const std::vector<env::WeatherSample>& weather);

/// One acceptance-map sample: normalized short-circuit current at an arc
/// offset from the astronomical position.
struct AcceptanceSample {
    std::string submodule_id;
    double daz_deg = 0.0;  // arc offsets (true on-sky angles)
    double del_deg = 0.0;
    double isc_over_dni = 0.0;  // A per W/m^2
};

struct SessionConfig {
    std::string submodule_id;
    std::int64_t start_time = 0;
    double frame_deg = 3.0;  // full frame width per axis
    double step_deg = 0.25;
    double dwell_s = 10.0;  // time per grid point
};

struct SessionResult {
    std::vector<AcceptanceSample> samples;
    bool complete = true;
    bool degenerate = false;  // no signal anywhere on the frame
    std::string abort_reason;
};

/// Sweep the acceptance frame around the astronomical position, one grid
/// point per dwell interval. A cloudy-sky gate aborts the session with the
/// partial data flagged.
SessionResult run_acceptance_session(const CampaignSetup& setup, const SessionConfig& session,
                                     const std::vector<env::WeatherSample>& weather);

// --- persistence -------------------------------------------------------------
// Measurement log schema:
//   timestamp_utc,submodule,mode,az_deg,el_deg,deviation_deg,isc_a,voc_v,
//   pmax_w,vmp_v,imp_a,ff,dni_wm2,dhi_wm2,t_ambient_c
// Acceptance session schema:
//   submodule,daz_deg,del_deg,isc_over_dni

void write_measurement_log(const std::vector<MeasurementRecord>& records,
                           const std::string& path);
std::vector<MeasurementRecord> read_measurement_log(const std::string& path);

void write_skip_log(const std::vector<SkipEntry>& skips, const std::string& path);

void write_session_csv(const std::vector<AcceptanceSample>& samples, const std::string& path);
std::vector<AcceptanceSample> read_session_csv(const std::string& path);

std::string mode_name(tracker::Mode mode);
tracker::Mode mode_from_name(const std::string& name);

}  // namespace cpv::campaign
