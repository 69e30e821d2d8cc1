#include "tdgl_ring/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/error.hpp"
#include "tdgl_ring/rng.hpp"

namespace tdgl_ring::experiment {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Projection onto one Fourier mode with precomputed twiddles.
class ModeProjector {
 public:
  ModeProjector(int m, std::int64_t k) : twiddle_(static_cast<std::size_t>(m)) {
    for (int i = 0; i < m; ++i) {
      const std::int64_t turn = ((k % m) * i % m + m) % m;
      twiddle_[static_cast<std::size_t>(i)] =
          std::polar(1.0 / m, -2.0 * std::numbers::pi * static_cast<double>(turn) / m);
    }
  }

  double operator()(const FieldState& s) const {
    Complex sum{};
    for (std::size_t i = 0; i < twiddle_.size(); ++i) sum += s.psi[i] * twiddle_[i];
    return std::abs(sum);
  }

 private:
  std::vector<Complex> twiddle_;
};

bool grid_resolves(const RingConfig& c, std::int64_t k) {
  return k <= c.grid_points / 2 && k >= -(c.grid_points / 2);
}

struct RunRecord {
  RunSummary summary;
  std::vector<double> times;
  std::vector<double> current;
  std::vector<double> amplitude;
};

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return kNaN;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double half_power_of_ten(int index) {
  // Even indices are exact powers of ten; keeps ceil() away from 10.000000000000002.
  if (index % 2 == 0) return std::pow(10.0, index / 2);
  return std::pow(10.0, 0.5 * index);
}

}  // namespace

const char* to_string(AmplitudeMeasure measure) {
  return measure == AmplitudeMeasure::ModeAmplitude ? "mode" : "rms";
}

AmplitudeMeasure amplitude_measure_from_string(std::string_view s) {
  if (s == "rms") return AmplitudeMeasure::RmsAmplitude;
  if (s == "mode") return AmplitudeMeasure::ModeAmplitude;
  throw InvalidArgument("amplitude measure must be rms or mode");
}

std::int64_t target_mode(const RingConfig& config) { return analytic::winding_selector(config.flux_norm); }

double asymptotic_amplitude(const RingConfig& config, AmplitudeMeasure measure) {
  const double rate = measure == AmplitudeMeasure::ModeAmplitude ? linear_symbol(config, target_mode(config))
                                                                 : max_resolved_symbol(config);
  return std::sqrt(std::max(0.0, rate));
}

double winding_floor(const RingConfig& config) { return 10.0 * config.noise.sigma; }

Trajectory run_trajectory(const RingConfig& config, std::uint64_t stream_seed, const RunOptions& options) {
  validate(config);
  const std::int64_t n0 = target_mode(config);
  if (options.measure == AmplitudeMeasure::ModeAmplitude && !grid_resolves(config, n0)) {
    throw InvalidArgument("mode amplitude measure needs a grid that represents the selected winding");
  }

  RingSimulator sim(config);
  NoiseSource noise(config, stream_seed);
  std::optional<ModeProjector> projector;
  if (grid_resolves(config, n0)) projector.emplace(config.grid_points, n0);
  const bool by_mode = options.measure == AmplitudeMeasure::ModeAmplitude;
  auto amplitude = [&](const FieldState& s) { return by_mode ? (*projector)(s) : rms_amplitude(s); };

  const double threshold = kEquilibrationFraction * asymptotic_amplitude(config, options.measure);
  const double floor = winding_floor(config);

  Trajectory out;
  FieldState state = options.initial ? *options.initial : init_metastable(config);
  if (state.psi.size() != static_cast<std::size_t>(config.grid_points)) {
    throw InvalidArgument("initial field size does not match grid_points");
  }

  auto record = [&] {
    const auto profile = sim.current_profile(state);
    Snapshot snap;
    snap.time = state.time;
    if (projector) snap.mode_amplitude = (*projector)(state);
    snap.rms_amplitude = rms_amplitude(state);
    snap.integrated_current = profile.integrated;
    snap.winding = winding_number(state, floor);
    out.snapshots.push_back(snap);
  };
  auto check = [&](double amp) {
    if (!out.equilibration.reached && threshold > 0.0 && amp >= threshold) {
      out.equilibration.reached = true;
      out.equilibration.t99 = state.time;
    }
  };

  check(amplitude(state));
  record();

  const std::int64_t steps = config.step_count();
  NoiseSource* noise_ptr = options.noise_enabled ? &noise : nullptr;
  try {
    for (std::int64_t n = 1; n <= steps; ++n) {
      sim.advance(state, noise_ptr);
      check(amplitude(state));
      if (n % config.snapshot_every == 0 || n == steps) record();
    }
  } catch (const NumericalBlowup& e) {
    out.failure = e.what();
  }

  out.equilibration.final_winding = winding_number(state, floor);
  out.final_state = std::move(state);
  return out;
}

EquilibrationResult equilibration_time(const RingConfig& config, AmplitudeMeasure measure) {
  validate(config);
  if (!(asymptotic_amplitude(config, measure) > 0.0)) {
    throw InvalidArgument("selected mode is not supported; no asymptotic amplitude");
  }
  RunOptions opts;
  opts.measure = measure;
  auto traj = run_trajectory(config, derive_seed(config.seed, 0), opts);
  if (traj.failure) throw NumericalBlowup(traj.final_state.step + 1, *traj.failure);
  return traj.equilibration;
}

double EnsembleStats::late_mean_current() const {
  if (mean_current.empty()) return kNaN;
  const std::size_t start = mean_current.size() / 2;
  double sum = 0.0;
  for (std::size_t i = start; i < mean_current.size(); ++i) sum += mean_current[i];
  return sum / static_cast<double>(mean_current.size() - start);
}

double EnsembleStats::late_standard_error() const {
  std::vector<double> late;
  for (const auto& r : runs) {
    if (!r.failure) late.push_back(r.late_mean_current);
  }
  const double sd = sample_std(late);
  return std::isnan(sd) ? kNaN : sd / std::sqrt(static_cast<double>(late.size()));
}

double EnsembleStats::winding_fraction(std::int64_t n) const {
  std::size_t ok = 0, hit = 0;
  for (const auto& r : runs) {
    if (r.failure) continue;
    ++ok;
    if (r.equilibration.final_winding == n) ++hit;
  }
  return ok == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(ok);
}

EnsembleStats run_ensemble(const RingConfig& config, std::size_t n_runs, std::uint64_t master_seed,
                           const EnsembleOptions& options) {
  validate(config);
  if (n_runs < 1) throw InvalidArgument("n_runs must be at least 1");

  std::vector<RunRecord> records(n_runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < n_runs; r = next.fetch_add(1)) {
      try {
        RunOptions opts;
        opts.measure = options.measure;
        opts.noise_enabled = options.noise_enabled;
        const std::uint64_t seed = derive_seed(master_seed, r);
        Trajectory traj = run_trajectory(config, seed, opts);

        RunRecord& rec = records[r];
        rec.summary.run = r;
        rec.summary.seed = seed;
        rec.summary.equilibration = traj.equilibration;
        rec.summary.failure = traj.failure;
        for (const auto& s : traj.snapshots) {
          rec.times.push_back(s.time);
          rec.current.push_back(s.integrated_current);
          const bool by_mode = options.measure == AmplitudeMeasure::ModeAmplitude;
          rec.amplitude.push_back(by_mode ? s.mode_amplitude.value_or(0.0) : s.rms_amplitude);
        }
        const std::size_t start = rec.current.size() / 2;
        double late = 0.0;
        for (std::size_t i = start; i < rec.current.size(); ++i) late += rec.current[i];
        rec.summary.late_mean_current =
            rec.current.empty() ? 0.0 : late / static_cast<double>(rec.current.size() - start);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };

  const unsigned threads = resolve_threads(options.threads, n_runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  EnsembleStats stats;
  stats.n_runs = n_runs;
  std::vector<double> t99s;
  std::vector<const RunRecord*> ok;
  for (const auto& rec : records) {
    stats.runs.push_back(rec.summary);
    if (rec.summary.failure) {
      ++stats.n_failed;
      continue;
    }
    ok.push_back(&rec);
    if (rec.summary.equilibration.reached) {
      ++stats.n_reached;
      t99s.push_back(*rec.summary.equilibration.t99);
    }
  }

  if (!t99s.empty()) {
    double sum = 0.0;
    for (double t : t99s) sum += t;
    stats.mean_t99 = sum / static_cast<double>(t99s.size());
    if (t99s.size() >= 2) stats.std_t99 = sample_std(t99s);
  }

  if (!ok.empty()) {
    const std::size_t len = ok.front()->times.size();
    stats.times = ok.front()->times;
    stats.mean_current.assign(len, 0.0);
    stats.mean_amplitude.assign(len, 0.0);
    const auto n = static_cast<double>(ok.size());
    for (const RunRecord* rec : ok) {
      for (std::size_t i = 0; i < len; ++i) {
        stats.mean_current[i] += rec->current[i];
        stats.mean_amplitude[i] += rec->amplitude[i];
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      stats.mean_current[i] /= n;
      stats.mean_amplitude[i] /= n;
    }
    if (ok.size() >= 2) {
      stats.std_current.assign(len, 0.0);
      for (const RunRecord* rec : ok) {
        for (std::size_t i = 0; i < len; ++i) {
          const double d = rec->current[i] - stats.mean_current[i];
          stats.std_current[i] += d * d;
        }
      }
      for (auto& v : stats.std_current) v = std::sqrt(v / (n - 1.0));
    }
  }
  return stats;
}

EnsembleStats control_run(const RingConfig& config, std::size_t n_runs, std::uint64_t master_seed,
                          const EnsembleOptions& options) {
  if (config.flux_norm != 0.0) throw InvalidArgument("control run requires zero flux");
  return run_ensemble(config, n_runs, master_seed, options);
}

EnsembleStats coarse_grid_run(RingConfig config, std::size_t n_runs, std::uint64_t master_seed,
                              const EnsembleOptions& options) {
  // The zero-flux partner of a coarse run is always resolved; accept it as is.
  if (config.flux_norm != 0.0 && config.grid_points >= minimum_resolved_grid(config.flux_norm)) {
    throw InvalidArgument("coarse grid run needs grid_points below the resolution rule");
  }
  config.allow_coarse_grid = true;
  EnsembleOptions opts = options;
  opts.measure = AmplitudeMeasure::RmsAmplitude;
  return run_ensemble(config, n_runs, master_seed, opts);
}

double sweep_radius(int index) { return 1.5 * half_power_of_ten(index); }

double sweep_flux(int index) { return std::ceil(half_power_of_ten(index)) + 0.2; }

void validate(const SweepSpec& spec) {
  if (spec.runs_per_point < 1) throw InvalidArgument("runs_per_point must be at least 1");
  if (spec.grid_points && *spec.grid_points < 8) throw InvalidArgument("grid_points must be at least 8");
}

std::uint64_t sweep_point_seed(std::uint64_t master_seed, int index) {
  return derive_seed(master_seed, 0x5EED0000ULL + static_cast<std::uint64_t>(static_cast<std::int64_t>(index)));
}

std::vector<SweepRow> sweep(const SweepSpec& spec, const EnsembleOptions& options) {
  validate(spec);
  std::vector<SweepRow> rows;
  for (int i : spec.indices) {
    SweepRow row;
    row.index = i;
    row.radius_norm = sweep_radius(i);
    row.flux_norm = sweep_flux(i);
    try {
      RingConfig c = spec.base_config;
      c.radius_norm = row.radius_norm;
      c.flux_norm = row.flux_norm;
      c.grid_points = spec.grid_points ? *spec.grid_points : default_grid_points(row.flux_norm);
      row.grid_points = c.grid_points;
      EnsembleOptions opts = options;
      if (c.grid_points < minimum_resolved_grid(c.flux_norm)) {
        c.allow_coarse_grid = true;
        opts.measure = AmplitudeMeasure::RmsAmplitude;
      }
      row.stats = run_ensemble(c, spec.runs_per_point, sweep_point_seed(spec.master_seed, i), opts);
    } catch (const Error& e) {
      row.failure = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> t99_coefficient_of_variation(const std::vector<SweepRow>& rows) {
  std::vector<double> means;
  for (const auto& r : rows) {
    if (!r.failure && r.stats.mean_t99) means.push_back(*r.stats.mean_t99);
  }
  if (means.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  return sample_std(means) / mean;
}

OrganizedCurrent organized_current(const EnsembleStats& signal, const EnsembleStats& control) {
  OrganizedCurrent out;
  out.late_mean = signal.late_mean_current();
  out.threshold = 5.0 * control.late_standard_error();
  out.sign = out.late_mean > 0.0 ? 1 : (out.late_mean < 0.0 ? -1 : 0);
  out.organized = std::isfinite(out.threshold) && std::isfinite(out.late_mean) &&
                  std::abs(out.late_mean) > out.threshold;
  return out;
}

}  // namespace tdgl_ring::experiment
