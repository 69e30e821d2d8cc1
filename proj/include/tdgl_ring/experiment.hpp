#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdgl_ring/tdgl.hpp"

namespace tdgl_ring::experiment {

/// Quantity compared against 99% of its asymptote.
///
/// RmsAmplitude tracks the spatial amplitude sqrt(<|psi|^2>) against
/// sqrt(max_resolved_symbol), which equals sqrt(linear_symbol(n0)) on a resolved
/// grid. It saturates once the condensate has formed locally, whatever phase
/// texture remains, and is the only measure available in the envelope regime.
///
/// ModeAmplitude tracks the Fourier amplitude |c_{n0}| against
/// sqrt(linear_symbol(n0)). It additionally waits for the phase texture to
/// relax into a single winding, which takes ~ (R kappa)^2 and never happens
/// when noise seeds a different winding.
enum class AmplitudeMeasure { RmsAmplitude, ModeAmplitude };

const char* to_string(AmplitudeMeasure measure);
AmplitudeMeasure amplitude_measure_from_string(std::string_view s);

inline constexpr double kEquilibrationFraction = 0.99;

struct EquilibrationResult {
  std::optional<double> t99;
  bool reached = false;
  std::optional<std::int64_t> final_winding;
};

struct Snapshot {
  double time = 0.0;
  /// |c_{n0}|; empty when the grid cannot represent n0.
  std::optional<double> mode_amplitude;
  double rms_amplitude = 0.0;
  double integrated_current = 0.0;
  std::optional<std::int64_t> winding;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  EquilibrationResult equilibration;
  FieldState final_state;
  /// Set when the run stopped on a numerical blowup; snapshots stop there.
  std::optional<std::string> failure;
};

struct RunOptions {
  AmplitudeMeasure measure = AmplitudeMeasure::RmsAmplitude;
  /// Initial field; init_metastable when empty.
  std::optional<FieldState> initial;
  bool noise_enabled = true;
};

/// Mode tracked by the ModeAmplitude measure: winding_selector(flux_norm).
std::int64_t target_mode(const RingConfig& config);

/// Asymptotic value of the tracked amplitude.
double asymptotic_amplitude(const RingConfig& config, AmplitudeMeasure measure);

/// Amplitude floor used for winding extraction: 10 sigma.
double winding_floor(const RingConfig& config);

/// One trajectory from the initial state to t_max. Noise is drawn from the
/// stream `stream_seed`. Blowups are reported in Trajectory::failure.
Trajectory run_trajectory(const RingConfig& config, std::uint64_t stream_seed, const RunOptions& options = {});

/// Single noisy trajectory from the metastable state; stream derive_seed(config.seed, 0).
/// Requires a positive asymptote for `measure`. Throws NumericalBlowup on blowup.
EquilibrationResult equilibration_time(const RingConfig& config,
                                       AmplitudeMeasure measure = AmplitudeMeasure::RmsAmplitude);

struct RunSummary {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  EquilibrationResult equilibration;
  /// Time average of J over the second half of the run.
  double late_mean_current = 0.0;
  std::optional<std::string> failure;
};

struct EnsembleStats {
  std::size_t n_runs = 0;
  std::size_t n_reached = 0;
  std::size_t n_failed = 0;
  std::optional<double> mean_t99;
  /// Sample (n - 1) standard deviation; empty with fewer than two reached runs.
  std::optional<double> std_t99;
  std::vector<double> times;
  std::vector<double> mean_current;
  std::vector<double> std_current;
  /// Run average of the equilibration measure.
  std::vector<double> mean_amplitude;
  std::vector<RunSummary> runs;

  /// Time average of <J>(t) over the second half of the series.
  double late_mean_current() const;
  /// Standard error of late_mean_current across runs: sd(per-run late means)/sqrt(n).
  double late_standard_error() const;
  /// Fraction of completed runs whose final winding equals `n`.
  double winding_fraction(std::int64_t n) const;
};

struct EnsembleOptions {
  /// 0 = machine parallelism.
  unsigned threads = 0;
  AmplitudeMeasure measure = AmplitudeMeasure::RmsAmplitude;
  bool noise_enabled = true;
};

/// Runs n_runs trajectories; run r uses stream derive_seed(master_seed, r).
/// Aggregation is done in run-index order, so the result does not depend on
/// thread count or scheduling.
EnsembleStats run_ensemble(const RingConfig& config, std::size_t n_runs, std::uint64_t master_seed,
                           const EnsembleOptions& options = {});

/// Zero-flux control ensemble. Throws InvalidArgument when flux_norm != 0.
EnsembleStats control_run(const RingConfig& config, std::size_t n_runs, std::uint64_t master_seed,
                          const EnsembleOptions& options = {});

/// Ensemble on a grid deliberately too coarse to resolve n0, using the RMS
/// amplitude measure. Throws InvalidArgument when the grid is fine enough.
EnsembleStats coarse_grid_run(RingConfig config, std::size_t n_runs, std::uint64_t master_seed,
                              const EnsembleOptions& options = {});

/// Radius and flux for sweep index i: R = 1.5 (sqrt 10)^i, Phi = ceil((sqrt 10)^i) + 0.2.
double sweep_radius(int index);
double sweep_flux(int index);

struct SweepSpec {
  std::vector<int> indices;
  std::size_t runs_per_point = 50;
  RingConfig base_config{};
  std::uint64_t master_seed = 42;
  /// Fixed grid for every point; default_grid_points(flux) when empty.
  std::optional<int> grid_points;
};

void validate(const SweepSpec& spec);

struct SweepRow {
  int index = 0;
  double radius_norm = 0.0;
  double flux_norm = 0.0;
  int grid_points = 0;
  EnsembleStats stats;
  std::optional<std::string> failure;
};

/// Master seed of sweep point i: derive_seed(master_seed, 0x5EED0000 + i).
std::uint64_t sweep_point_seed(std::uint64_t master_seed, int index);

/// Points run in order; each point's ensemble is parallel internally.
/// A point that fails entirely is recorded and the sweep continues.
std::vector<SweepRow> sweep(const SweepSpec& spec, const EnsembleOptions& options = {});

/// Coefficient of variation (sample std / mean) of mean_t99 across rows that have one.
std::optional<double> t99_coefficient_of_variation(const std::vector<SweepRow>& rows);

struct OrganizedCurrent {
  bool organized = false;
  int sign = 0;
  double late_mean = 0.0;
  double threshold = 0.0;
};

/// The signal ensemble carries organized current when |late <J>| exceeds
/// 5 standard errors of the matched zero-flux control.
OrganizedCurrent organized_current(const EnsembleStats& signal, const EnsembleStats& control);

}  // namespace tdgl_ring::experiment
