#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tdgl_ring/causal.hpp"
#include "tdgl_ring/experiment.hpp"
#include "tdgl_ring/tdgl.hpp"

namespace tdgl_ring::io {

/// Shortest representation that round-trips, '.' decimal, no grouping.
std::string format_double(double x);

/// time,mode_amp_n0,J,winding,rms_amp (mode_amp_n0 empty on unresolved grids,
/// winding empty when undefined). When `failure`
/// is set a trailing "# truncated: ..." marker row is appended.
std::string trajectory_csv(const experiment::Trajectory& trajectory);

/// phi,re_psi,im_psi
std::string field_csv(const FieldState& state);

/// time,mean_J,std_J (std_J empty for single-run ensembles).
std::string ensemble_series_csv(const experiment::EnsembleStats& stats);

/// run,seed,reached,t99,final_winding,late_mean_J,failure
std::string ensemble_runs_csv(const experiment::EnsembleStats& stats);

/// i,radius_norm,flux_norm,mean_t99,std_t99,n_reached,n_runs
std::string sweep_csv(const std::vector<experiment::SweepRow>& rows);

nlohmann::json to_json(const RingConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
RingConfig config_from_json(const nlohmann::json& j, RingConfig base = {});

nlohmann::json to_json(const causal::FeasibilityReport& report);

nlohmann::json summary_json(const experiment::EnsembleStats& stats);

std::string sha256_hex(std::string_view data);

/// Writes `content` to `path` (binary, creating parent directories).
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

const char* to_string(NoiseScaling scaling);
NoiseScaling noise_scaling_from_string(std::string_view s);

}  // namespace tdgl_ring::io
