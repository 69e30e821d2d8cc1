#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tdgl_ring/rng.hpp"

namespace tdgl_ring {

using Complex = std::complex<double>;

enum class NoiseInterpolation { Linear };
/// PerStep adds the drawn sample unchanged every step; SqrtDt multiplies it by sqrt(dt).
enum class NoiseScaling { PerStep, SqrtDt };

struct NoiseSpec {
  double sigma = 1e-6;  // per real component
  int sample_points = 200;
  NoiseInterpolation interpolation = NoiseInterpolation::Linear;
  NoiseScaling scaling = NoiseScaling::PerStep;
};

/// One normalized ring simulation: lengths in lambda, time in xi^2/D,
/// flux in flux quanta.
struct RingConfig {
  double radius_norm = 10.0;
  double kappa = 0.8;
  double flux_norm = 3.3;
  int grid_points = 256;
  double dt = 1e-2;
  double t_max = 50.0;
  NoiseSpec noise{};
  std::uint64_t seed = 42;
  /// Record a trajectory snapshot every this many steps.
  int snapshot_every = 10;
  /// Permit grids too coarse to represent the selected winding.
  bool allow_coarse_grid = false;

  /// A~ = Phi~ / (kappa R~).
  double vector_potential() const { return flux_norm / (kappa * radius_norm); }
  std::int64_t step_count() const;
};

/// max(256, smallest power of two >= 8 * ceil(|flux|)).
int default_grid_points(double flux_norm);

/// Smallest grid that represents the selected winding with margin: 4 (|n0| + 1).
int minimum_resolved_grid(double flux_norm);

/// A config with the default grid, dt and noise for the given geometry.
RingConfig make_config(double radius_norm, double flux_norm, double kappa = 0.8);

/// Throws InvalidArgument on a violated invariant.
void validate(const RingConfig& config);

/// Signed mode index of FFT bin `bin` on an M-point grid; on even grids the Nyquist bin maps to -M/2.
std::int64_t mode_of_bin(std::size_t bin, int grid_points);
std::size_t bin_of_mode(std::int64_t k, int grid_points);

/// Samples of psi~ at phi_i = 2 pi i / M.
struct FieldState {
  std::vector<Complex> psi;
  double time = 0.0;
  std::uint64_t step = 0;
};

inline constexpr double kFieldSanityBound = 2.0;

struct CurrentProfile {
  std::vector<double> j;
  double integrated = 0.0;  // sum_i j_i * 2 pi / M
  double time = 0.0;
};

/// All-zero field at t = 0.
FieldState init_metastable(const RingConfig& config);

/// Pure mode amplitude * e^{i k phi} on the config grid.
FieldState plane_wave(const RingConfig& config, std::int64_t k, Complex amplitude);

/// Per-mode linear growth rate 1 - (k/(R~ kappa) - A~)^2.
double linear_symbol(const RingConfig& config, std::int64_t k);

/// Highest linear_symbol over the modes the grid can represent.
double max_resolved_symbol(const RingConfig& config);

/// Interpolated complex noise. One stream per trajectory; draws are consumed
/// in a fixed order (anchor 0..P-1, real part then imaginary part).
class NoiseSource {
 public:
  NoiseSource(const RingConfig& config, std::uint64_t seed);

  /// Fills `out` (size M) with one noise realization, already scaled.
  void sample(std::span<Complex> out);
  std::vector<Complex> sample();

 private:
  NoiseSpec spec_;
  int grid_points_;
  double scale_;
  GaussianStream stream_;
  std::vector<Complex> anchors_;
};

/// Convenience form of NoiseSource::sample for one-off draws.
std::vector<Complex> noise_field(const RingConfig& config, NoiseSource& source);

/// Spectral first-order exponential time differencing for the normalized
/// TDGL equation on the ring. Owns FFT plans and scratch buffers, so one
/// instance must not be shared between threads; create one per trajectory.
class RingSimulator {
 public:
  explicit RingSimulator(const RingConfig& config);
  ~RingSimulator();
  RingSimulator(RingSimulator&&) noexcept;
  RingSimulator& operator=(RingSimulator&&) noexcept;
  RingSimulator(const RingSimulator&) = delete;
  RingSimulator& operator=(const RingSimulator&) = delete;

  const RingConfig& config() const;

  /// Advances `state` by one dt in place. `noise` may be null (noiseless step).
  /// Throws NumericalBlowup carrying the index of the failing step.
  void advance(FieldState& state, NoiseSource* noise);

  FieldState step(const FieldState& state, NoiseSource* noise);

  CurrentProfile current_profile(const FieldState& state);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-off step with a fresh simulator.
FieldState step(const FieldState& state, const RingConfig& config, NoiseSource* noise);

/// One-off current profile with a fresh transform.
CurrentProfile current_profile(const FieldState& state, const RingConfig& config);

/// Net phase winding around the ring, or nullopt when min |psi| is below
/// `amplitude_floor` (or exactly zero).
std::optional<std::int64_t> winding_number(const FieldState& state, double amplitude_floor = 0.0);

/// |(1/M) sum_i psi_i e^{-i k phi_i}|.
double mode_amplitude(const FieldState& state, std::int64_t k);

/// sqrt(mean |psi_i|^2).
double rms_amplitude(const FieldState& state);

}  // namespace tdgl_ring
