#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/error.hpp"
#include "tdgl_ring/tdgl.hpp"

using namespace tdgl_ring;
using test_support::rel_err;
using test_support::uniform;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RingConfig small_config() {
  RingConfig c;
  c.grid_points = 64;
  return c;
}

}  // namespace

TEST_SUITE("tdgl") {
  TEST_CASE("grid sizing") {
    CHECK(default_grid_points(3.3) == 256);
    CHECK(default_grid_points(1000.2) == 8192);
    CHECK(default_grid_points(-40.0) == 512);
    CHECK(minimum_resolved_grid(3.3) == 16);
    CHECK(minimum_resolved_grid(1e7 + 0.2) == 40000004);
    const auto c = make_config(1500.0, 1000.2);
    CHECK(c.grid_points == 8192);
    CHECK(c.kappa == 0.8);
    CHECK(c.vector_potential() == doctest::Approx(1000.2 / 1200.0));
    CHECK(c.step_count() == 5000);
  }

  TEST_CASE("config validation") {
    auto c = small_config();
    CHECK_NOTHROW(validate(c));
    c.flux_norm = 100.2;
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    c.allow_coarse_grid = true;
    CHECK_NOTHROW(validate(c));
    for (auto mutate : std::initializer_list<void (*)(RingConfig&)>{
             [](RingConfig& r) { r.dt = 0.0; }, [](RingConfig& r) { r.radius_norm = -1.0; },
             [](RingConfig& r) { r.kappa = NAN; }, [](RingConfig& r) { r.grid_points = 4; },
             [](RingConfig& r) { r.noise.sigma = -1.0; }, [](RingConfig& r) { r.noise.sample_points = 1; },
             [](RingConfig& r) { r.snapshot_every = 0; }, [](RingConfig& r) { r.t_max = -1.0; }}) {
      auto bad = small_config();
      mutate(bad);
      CHECK_THROWS_AS(validate(bad), InvalidArgument);
    }
  }

  TEST_CASE("bin and mode indexing") {
    for (int m : {8, 9, 64, 256}) {
      for (std::int64_t k = -(m / 2); k < m - m / 2; ++k) CHECK(mode_of_bin(bin_of_mode(k, m), m) == k);
    }
    CHECK(mode_of_bin(4, 8) == -4);
    CHECK(mode_of_bin(3, 8) == 3);
    CHECK_THROWS_AS(bin_of_mode(5, 8), InvalidArgument);
  }

  TEST_CASE("linear symbol") {
    const RingConfig c;
    CHECK(linear_symbol(c, 3) == doctest::Approx(1.0 - std::pow(0.3 / 8.0, 2)).epsilon(1e-15));
    CHECK(linear_symbol(c, 4) == doctest::Approx(1.0 - std::pow(0.7 / 8.0, 2)).epsilon(1e-15));
    CHECK(max_resolved_symbol(c) == linear_symbol(c, 3));
    RingConfig coarse = c;
    coarse.flux_norm = 1e7 + 0.2;
    coarse.radius_norm = 1.5e7;
    coarse.grid_points = 4096;
    coarse.allow_coarse_grid = true;
    CHECK(max_resolved_symbol(coarse) == linear_symbol(coarse, 2047));
  }

  TEST_CASE("gauge shift leaves the linear symbol invariant") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 2000; ++i) {
      RingConfig c;
      c.radius_norm = test_support::log_uniform(rng, 0.5, 1e4);
      c.kappa = uniform(rng, 0.3, 3.0);
      c.flux_norm = std::round(uniform(rng, -1e3, 1e3) * 8.0) / 8.0;
      const auto k = static_cast<std::int64_t>(std::llround(uniform(rng, -2e3, 2e3)));
      RingConfig shifted = c;
      shifted.flux_norm += 1.0;
      CHECK(std::abs(linear_symbol(shifted, k + 1) - linear_symbol(c, k)) <= 1e-12);
    }
  }

  TEST_CASE("plane waves") {
    const auto c = small_config();
    const auto s = plane_wave(c, 3, {0.5, 0.0});
    CHECK(mode_amplitude(s, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mode_amplitude(s, 4) < 1e-15);
    CHECK(rms_amplitude(s) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(winding_number(s) == 3);
    CHECK(winding_number(plane_wave(c, -7, {0.0, 1e-3})) == -7);
    CHECK_FALSE(winding_number(init_metastable(c)).has_value());
    CHECK_FALSE(winding_number(s, 0.6).has_value());
  }

  TEST_CASE("current of a matched pure mode vanishes") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i) {
      RingConfig c = small_config();
      c.grid_points = 128;
      c.radius_norm = uniform(rng, 1.0, 100.0);
      const auto k = static_cast<std::int64_t>(std::llround(uniform(rng, -30.0, 30.0)));
      c.flux_norm = static_cast<double>(k);
      const auto s = plane_wave(c, k, std::polar(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, kTwoPi)));
      REQUIRE(winding_number(s) == k);
      CHECK(std::abs(current_profile(s, c).integrated) <= 1e-12);
    }
  }

  TEST_CASE("current profile matches the analytic derivative") {
    // psi = sum_k c_k e^{ik phi}; psi' = sum_k ik c_k e^{ik phi}
    std::mt19937_64 rng(12);
    RingConfig c = small_config();
    c.flux_norm = 2.7;
    std::vector<std::pair<int, Complex>> terms;
    for (int k = -5; k <= 5; ++k) terms.emplace_back(k, Complex{uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2)});
    FieldState s{std::vector<Complex>(64), 0.0, 0};
    std::vector<Complex> deriv(64);
    for (int i = 0; i < 64; ++i) {
      const double phi = kTwoPi * i / 64.0;
      for (auto [k, ck] : terms) {
        const Complex e = ck * std::polar(1.0, k * phi);
        s.psi[i] += e;
        deriv[i] += Complex{0.0, static_cast<double>(k)} * e;
      }
    }
    const auto prof = current_profile(s, c);
    const double rk = c.kappa * c.radius_norm;
    double total = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double expect = std::imag(std::conj(s.psi[i]) * deriv[i]) / rk - c.vector_potential() * std::norm(s.psi[i]);
      CHECK(std::abs(prof.j[i] - expect) < 1e-13);
      total += expect;
    }
    CHECK(prof.integrated == doctest::Approx(total * kTwoPi / 64.0).epsilon(1e-12));
  }

  TEST_CASE("noiseless single-mode run follows the logistic closed form") {
    RingConfig c = small_config();
    c.dt = 1e-3;
    c.noise.sigma = 0.0;
    const double eps = 1e-8;
    const double q = linear_symbol(c, 3);
    RingSimulator sim(c);
    auto s = plane_wave(c, 3, {std::sqrt(eps), 0.0});
    double worst = 0.0;
    for (int n = 1; n <= 50000; ++n) {
      sim.advance(s, nullptr);
      if (n % 100 == 0) {
        const double rho = std::pow(mode_amplitude(s, 3), 2);
        worst = std::max(worst, rel_err(rho, analytic::normalized_rho(q, eps, s.time)));
      }
    }
    CHECK(worst <= 1e-3);
    CHECK(std::abs(std::pow(mode_amplitude(s, 3), 2) - q) <= 1e-6);
    CHECK(std::abs(current_profile(s, c).integrated - kTwoPi * q * (3 - 3.3) / 8.0) < 1e-6);
  }

  TEST_CASE("unsupported modes decay monotonically") {
    RingConfig c = small_config();
    c.radius_norm = 1.0;
    c.flux_norm = 0.2;
    for (std::int64_t k : {2, -2, 5}) {
      REQUIRE(linear_symbol(c, k) < 0.0);
      RingSimulator sim(c);
      auto s = plane_wave(c, k, {0.3, 0.0});
      double prev = mode_amplitude(s, k);
      for (int n = 0; n < 500 && prev > 1e-20; ++n) {
        sim.advance(s, nullptr);
        const double a = mode_amplitude(s, k);
        CHECK(a < prev);
        prev = a;
      }
    }
  }

  TEST_CASE("identical configs give bit-identical trajectories") {
    RingConfig c = small_config();
    RingSimulator a(c), b(c);
    NoiseSource na(c, 77), nb(c, 77);
    auto sa = init_metastable(c), sb = init_metastable(c);
    for (int n = 0; n < 2000; ++n) {
      a.advance(sa, &na);
      b.advance(sb, &nb);
      REQUIRE(sa.psi == sb.psi);
    }
    CHECK(sa.time == sb.time);
    CHECK(sa.step == 2000);
  }

  TEST_CASE("step helpers agree with the simulator") {
    RingConfig c = small_config();
    NoiseSource n1(c, 5), n2(c, 5);
    RingSimulator sim(c);
    const auto s0 = plane_wave(c, 3, {0.1, 0.0});
    CHECK(step(s0, c, &n1).psi == sim.step(s0, &n2).psi);
  }

  TEST_CASE("noise statistics") {
    RingConfig c = small_config();
    c.grid_points = 400;
    c.noise.sigma = 0.5;
    NoiseSource src(c, 99);
    const int draws = 4000;
    double mean = 0.0, var_anchor = 0.0, var_mid = 0.0;
    for (int d = 0; d < draws; ++d) {
      const auto x = noise_field(c, src);
      mean += x[0].real() + x[0].imag();
      var_anchor += std::norm(x[10]) / 2.0;  // anchor 5
      var_mid += std::norm(x[11]) / 2.0;     // halfway between anchors 5 and 6
    }
    mean /= 2.0 * draws;
    var_anchor /= draws;
    var_mid /= draws;
    CHECK(std::abs(mean) < 5.0 * 0.5 / std::sqrt(2.0 * draws));
    CHECK(var_anchor == doctest::Approx(0.25).epsilon(0.08));
    CHECK(var_mid == doctest::Approx(0.125).epsilon(0.08));

    c.noise.scaling = NoiseScaling::SqrtDt;
    c.dt = 0.04;
    NoiseSource scaled(c, 99);
    RingConfig plain_cfg = c;
    plain_cfg.noise.scaling = NoiseScaling::PerStep;
    NoiseSource plain(plain_cfg, 99);
    const auto xs = scaled.sample(), xp = plain.sample();
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(xs[i] - 0.2 * xp[i]) < 1e-15);

    c.noise.sigma = 0.0;
    NoiseSource silent(c, 1);
    for (const auto& v : silent.sample()) CHECK(v == Complex{});
  }

  TEST_CASE("noise streams are seed dependent and wrong buffers are rejected") {
    auto c = small_config();
    NoiseSource a(c, 1), b(c, 2);
    CHECK(a.sample() != b.sample());
    std::vector<Complex> wrong(10);
    CHECK_THROWS_AS(a.sample(wrong), InvalidArgument);
  }

  TEST_CASE("blowup is reported with the step index") {
    RingConfig c = small_config();
    c.dt = 3.0;
    RingSimulator sim(c);
    auto s = plane_wave(c, 3, {1.9, 0.0});
    s.step = 41;
    try {
      sim.advance(s, nullptr);
      FAIL("expected a blowup");
    } catch (const NumericalBlowup& e) {
      CHECK(e.step() == 42);
    }
    FieldState wrong{std::vector<Complex>(10), 0.0, 0};
    CHECK_THROWS_AS(sim.advance(wrong, nullptr), InvalidArgument);
  }

  TEST_CASE("seed derivation") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 3) == derive_seed(42, 3));
    GaussianStream g(1);
    for (int i = 0; i < 1000; ++i) {
      const double u = g.uniform();
      CHECK(u > 0.0);
      CHECK(u <= 1.0);
    }
  }
}
