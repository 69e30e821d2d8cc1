#include "tdgl_ring/tdgl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "fourier.hpp"
#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/error.hpp"

namespace tdgl_ring {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kMaxGrid = std::int64_t{1} << 30;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double grid_angle(std::int64_t i, int m) { return kTwoPi * static_cast<double>(i) / m; }

}  // namespace

std::int64_t RingConfig::step_count() const { return std::llround(t_max / dt); }

int default_grid_points(double flux_norm) {
  const double want = 8.0 * std::ceil(std::abs(flux_norm));
  if (!(want <= static_cast<double>(kMaxGrid))) throw InvalidArgument("flux too large for a resolved grid");
  const auto m = std::bit_ceil(static_cast<std::uint64_t>(std::max(want, 1.0)));
  return static_cast<int>(std::max<std::uint64_t>(256, m));
}

int minimum_resolved_grid(double flux_norm) {
  const double n0 = std::abs(static_cast<double>(analytic::winding_selector(flux_norm)));
  const double m = 4.0 * (n0 + 1.0);
  return m > static_cast<double>(kMaxGrid) ? static_cast<int>(kMaxGrid) : static_cast<int>(m);
}

RingConfig make_config(double radius_norm, double flux_norm, double kappa) {
  RingConfig c;
  c.radius_norm = radius_norm;
  c.flux_norm = flux_norm;
  c.kappa = kappa;
  c.grid_points = default_grid_points(flux_norm);
  return c;
}

void validate(const RingConfig& c) {
  if (!positive_finite(c.radius_norm)) throw InvalidArgument("radius_norm must be positive");
  if (!positive_finite(c.kappa)) throw InvalidArgument("kappa must be positive");
  if (!std::isfinite(c.flux_norm)) throw InvalidArgument("flux_norm must be finite");
  if (!std::isfinite(c.vector_potential())) throw InvalidArgument("vector potential is not finite");
  if (c.grid_points < 8) throw InvalidArgument("grid_points must be at least 8");
  if (!positive_finite(c.dt)) throw InvalidArgument("dt must be positive");
  if (!(std::isfinite(c.t_max) && c.t_max >= 0.0)) throw InvalidArgument("t_max must be nonnegative");
  if (!(std::isfinite(c.noise.sigma) && c.noise.sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (c.noise.sample_points < 2) throw InvalidArgument("noise sample_points must be at least 2");
  if (c.snapshot_every < 1) throw InvalidArgument("snapshot_every must be at least 1");
  if (!c.allow_coarse_grid && c.grid_points < minimum_resolved_grid(c.flux_norm)) {
    throw InvalidArgument("grid_points " + std::to_string(c.grid_points) +
                          " cannot resolve the selected winding; need at least " +
                          std::to_string(minimum_resolved_grid(c.flux_norm)) + " (or allow_coarse_grid)");
  }
}

std::int64_t mode_of_bin(std::size_t bin, int m) {
  const auto b = static_cast<std::int64_t>(bin);
  return b < (m + 1) / 2 ? b : b - m;
}

std::size_t bin_of_mode(std::int64_t k, int m) {
  if (k > m / 2 || k < -(m / 2)) throw InvalidArgument("mode index outside the grid band");
  return static_cast<std::size_t>(((k % m) + m) % m);
}

FieldState init_metastable(const RingConfig& config) {
  validate(config);
  return FieldState{std::vector<Complex>(static_cast<std::size_t>(config.grid_points)), 0.0, 0};
}

FieldState plane_wave(const RingConfig& config, std::int64_t k, Complex amplitude) {
  validate(config);
  const int m = config.grid_points;
  FieldState s{std::vector<Complex>(static_cast<std::size_t>(m)), 0.0, 0};
  for (int i = 0; i < m; ++i) {
    // Reduce k*i mod M first so the angle stays exact for large k.
    const std::int64_t turn = ((k % m) * i % m + m) % m;
    s.psi[static_cast<std::size_t>(i)] = amplitude * std::polar(1.0, grid_angle(turn, m));
  }
  return s;
}

double linear_symbol(const RingConfig& config, std::int64_t k) {
  const double shift = (static_cast<double>(k) - config.flux_norm) / (config.radius_norm * config.kappa);
  return 1.0 - shift * shift;
}

double max_resolved_symbol(const RingConfig& config) {
  const int m = config.grid_points;
  const auto lo = static_cast<std::int64_t>(-(m / 2));
  const auto hi = static_cast<std::int64_t>(m - m / 2 - 1);
  // Concave in k: the best mode is the representable one nearest to the flux.
  const double target = std::clamp(config.flux_norm, static_cast<double>(lo), static_cast<double>(hi));
  const auto k0 = static_cast<std::int64_t>(std::floor(target));
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = std::max(lo, k0 - 1); k <= std::min(hi, k0 + 2); ++k) {
    best = std::max(best, linear_symbol(config, k));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Noise

NoiseSource::NoiseSource(const RingConfig& config, std::uint64_t seed)
    : spec_(config.noise),
      grid_points_(config.grid_points),
      scale_(config.noise.scaling == NoiseScaling::SqrtDt ? config.noise.sigma * std::sqrt(config.dt)
                                                          : config.noise.sigma),
      stream_(seed),
      anchors_(static_cast<std::size_t>(config.noise.sample_points)) {
  validate(config);
}

void NoiseSource::sample(std::span<Complex> out) {
  if (out.size() != static_cast<std::size_t>(grid_points_)) throw InvalidArgument("noise buffer has wrong size");
  if (scale_ == 0.0) {
    std::fill(out.begin(), out.end(), Complex{});
    return;
  }
  for (auto& a : anchors_) a = scale_ * stream_.complex_normal();

  // Periodic linear interpolation from P anchors at 2 pi j / P onto M points.
  const auto p = static_cast<std::int64_t>(anchors_.size());
  const auto m = static_cast<std::int64_t>(grid_points_);
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t num = i * p;
    const std::int64_t j = num / m;
    const double frac = static_cast<double>(num % m) / static_cast<double>(m);
    const Complex left = anchors_[static_cast<std::size_t>(j)];
    const Complex right = anchors_[static_cast<std::size_t>((j + 1) % p)];
    out[static_cast<std::size_t>(i)] = (1.0 - frac) * left + frac * right;
  }
}

std::vector<Complex> NoiseSource::sample() {
  std::vector<Complex> out(static_cast<std::size_t>(grid_points_));
  sample(out);
  return out;
}

std::vector<Complex> noise_field(const RingConfig& config, NoiseSource& source) {
  validate(config);
  return source.sample();
}

// ---------------------------------------------------------------------------
// Simulator

struct RingSimulator::Impl {
  explicit Impl(const RingConfig& c) : config(c), fft(c.grid_points) {
    const int m = c.grid_points;
    propagator.resize(static_cast<std::size_t>(m));
    forcing.resize(static_cast<std::size_t>(m));
    wavenumber.resize(static_cast<std::size_t>(m));
    field_modes.resize(static_cast<std::size_t>(m));
    noise.resize(static_cast<std::size_t>(m));
    const double inv_m = 1.0 / m;
    for (std::size_t b = 0; b < propagator.size(); ++b) {
      const std::int64_t k = mode_of_bin(b, m);
      const double rate = linear_symbol(c, k);
      const double x = rate * c.dt;
      // phi1 = (e^{rate dt} - 1) / rate, limit dt at rate = 0.
      const double phi1 = (rate == 0.0) ? c.dt : std::expm1(x) / rate;
      propagator[b] = std::exp(x) * inv_m;
      forcing[b] = phi1 * inv_m;
      wavenumber[b] = static_cast<double>(k);
    }
  }

  RingConfig config;
  detail::FourierTransform fft;
  std::vector<double> propagator;  // e^{L dt} / M
  std::vector<double> forcing;     // phi1(L dt) / M
  std::vector<double> wavenumber;
  std::vector<Complex> field_modes;
  std::vector<Complex> noise;
};

RingSimulator::RingSimulator(const RingConfig& config) {
  validate(config);
  impl_ = std::make_unique<Impl>(config);
}

RingSimulator::~RingSimulator() = default;
RingSimulator::RingSimulator(RingSimulator&&) noexcept = default;
RingSimulator& RingSimulator::operator=(RingSimulator&&) noexcept = default;

const RingConfig& RingSimulator::config() const { return impl_->config; }

void RingSimulator::advance(FieldState& state, NoiseSource* noise) {
  Impl& s = *impl_;
  const std::size_t m = s.propagator.size();
  if (state.psi.size() != m) throw InvalidArgument("field size does not match grid_points");

  auto space = s.fft.space();
  auto modes = s.fft.modes();

  std::copy(state.psi.begin(), state.psi.end(), space.begin());
  s.fft.forward();
  std::copy(modes.begin(), modes.end(), s.field_modes.begin());

  for (std::size_t i = 0; i < m; ++i) space[i] = -std::norm(state.psi[i]) * state.psi[i];
  s.fft.forward();

  for (std::size_t b = 0; b < m; ++b) modes[b] = s.propagator[b] * s.field_modes[b] + s.forcing[b] * modes[b];
  s.fft.backward();

  const std::uint64_t step_index = state.step + 1;
  if (noise != nullptr) {
    noise->sample(s.noise);
    for (std::size_t i = 0; i < m; ++i) space[i] += s.noise[i];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Complex v = space[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalBlowup(step_index, "non-finite sample at index " + std::to_string(i));
    }
    if (std::norm(v) > kFieldSanityBound * kFieldSanityBound) {
      throw NumericalBlowup(step_index, "|psi| exceeds sanity bound at index " + std::to_string(i));
    }
    state.psi[i] = v;
  }
  state.step = step_index;
  state.time = static_cast<double>(step_index) * s.config.dt;
}

FieldState RingSimulator::step(const FieldState& state, NoiseSource* noise) {
  FieldState next = state;
  advance(next, noise);
  return next;
}

CurrentProfile RingSimulator::current_profile(const FieldState& state) {
  Impl& s = *impl_;
  const std::size_t m = s.propagator.size();
  if (state.psi.size() != m) throw InvalidArgument("field size does not match grid_points");

  auto space = s.fft.space();
  auto modes = s.fft.modes();
  std::copy(state.psi.begin(), state.psi.end(), space.begin());
  s.fft.forward();
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t b = 0; b < m; ++b) modes[b] *= Complex{0.0, s.wavenumber[b] * inv_m};
  s.fft.backward();

  const double inv_rk = 1.0 / (s.config.kappa * s.config.radius_norm);
  const double a = s.config.vector_potential();
  CurrentProfile out;
  out.j.resize(m);
  out.time = state.time;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Complex psi = state.psi[i];
    // (-i / 2 kappa R)(psi* psi' - psi psi'*) = Im(psi* psi') / (kappa R)
    out.j[i] = std::imag(std::conj(psi) * space[i]) * inv_rk - a * std::norm(psi);
    total += out.j[i];
  }
  out.integrated = total * (2.0 * std::numbers::pi / static_cast<double>(m));
  return out;
}

FieldState step(const FieldState& state, const RingConfig& config, NoiseSource* noise) {
  RingSimulator sim(config);
  return sim.step(state, noise);
}

CurrentProfile current_profile(const FieldState& state, const RingConfig& config) {
  RingSimulator sim(config);
  return sim.current_profile(state);
}

std::optional<std::int64_t> winding_number(const FieldState& state, double amplitude_floor) {
  const auto& psi = state.psi;
  if (psi.empty()) return std::nullopt;
  double min_abs = std::numeric_limits<double>::infinity();
  for (const auto& v : psi) min_abs = std::min(min_abs, std::abs(v));
  if (!(min_abs > 0.0) || min_abs < amplitude_floor) return std::nullopt;

  double total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Complex next = psi[(i + 1) % psi.size()];
    total += std::arg(next * std::conj(psi[i]));
  }
  return static_cast<std::int64_t>(std::llround(total / kTwoPi));
}

double mode_amplitude(const FieldState& state, std::int64_t k) {
  const auto m = static_cast<int>(state.psi.size());
  if (m == 0) return 0.0;
  (void)bin_of_mode(k, m);
  Complex sum{};
  for (int i = 0; i < m; ++i) {
    const std::int64_t turn = ((k % m) * i % m + m) % m;
    sum += state.psi[static_cast<std::size_t>(i)] * std::polar(1.0, -grid_angle(turn, m));
  }
  return std::abs(sum) / m;
}

double rms_amplitude(const FieldState& state) {
  if (state.psi.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& v : state.psi) sum += std::norm(v);
  return std::sqrt(sum / static_cast<double>(state.psi.size()));
}

}  // namespace tdgl_ring
