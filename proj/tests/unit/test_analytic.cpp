#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/error.hpp"

using namespace tdgl_ring;
using namespace tdgl_ring::analytic;
using test_support::rel_err;
using test_support::uniform;

namespace {

// Params whose kinetic scale equals `kinetic` (J) on a 1 m ring.
AnalyticParams make_params(double alpha, double beta, double gamma, double kinetic, double ratio, double epsilon) {
  AnalyticParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.radius = 1.0;
  p.mass_eff = kCodata.hbar * kCodata.hbar / (2.0 * kinetic);
  p.flux = ratio * flux_quantum();
  p.epsilon = epsilon;
  return p;
}

AnalyticParams random_params(std::mt19937_64& rng) {
  return make_params(uniform(rng, -2.0, 0.5), uniform(rng, 0.2, 3.0), uniform(rng, 0.1, 2.0), uniform(rng, 0.05, 2.0),
                     uniform(rng, -20.0, 20.0), test_support::log_uniform(rng, 1e-9, 9e-3));
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("lambda_n and kinetic scale") {
    const auto p = make_params(-1.0, 1.0, 1.0, 0.5, 3.3, 1e-4);
    CHECK(kinetic_scale(p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(flux_ratio(p) == doctest::Approx(3.3).epsilon(1e-14));
    CHECK(lambda_n(p, 3) == doctest::Approx(-1.0 + 0.5 * 0.09).epsilon(1e-12));
    CHECK(lambda_n(p, 4) == doctest::Approx(-1.0 + 0.5 * 0.49).epsilon(1e-12));
  }

  TEST_CASE("closed form matches adaptive integration") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_params(rng);
      const std::int64_t n = winding_selector(flux_ratio(p)) + static_cast<std::int64_t>(uniform(rng, -2.0, 3.0));
      const double lam = lambda_n(p, n);
      const double horizon = lam != 0.0 ? 25.0 / (2.0 * p.gamma * std::abs(lam)) : 100.0;
      const double t = uniform(rng, 0.0, std::min(horizon, 1e3));
      const double exact = rho_closed_form(p, n, t);
      const double ode = test_support::integrate_logistic(p.gamma, lam, p.beta, p.epsilon, t);
      INFO("lambda=", lam, " t=", t, " eps=", p.epsilon);
      CHECK(rel_err(exact, ode) <= 1e-6);
    }
  }

  TEST_CASE("closed form reference values") {
    // lambda_n = -1 at integer flux with n = n0
    const auto p = make_params(-1.0, 1.0, 0.5, 1.0, 2.0, 1e-4);
    REQUIRE(lambda_n(p, 2) == -1.0);
    CHECK(rho_closed_form(p, 2, 0.0) == 1e-4);
    CHECK(rel_err(rho_closed_form(p, 2, 5.0), test_support::integrate_logistic(0.5, -1.0, 1.0, 1e-4, 5.0)) <= 1e-8);
    CHECK(rho_closed_form(p, 2, 1e3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho_asymptotic(p, 2) == 1.0);
  }

  TEST_CASE("closed form is nonnegative and monotone for supported modes") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
      auto p = random_params(rng);
      p.alpha = uniform(rng, -2.0, -0.1);
      p.flux = flux_quantum() * std::round(uniform(rng, -10, 10));
      const std::int64_t n = winding_selector(flux_ratio(p));
      const double lam = lambda_n(p, n);
      REQUIRE(lam < 0.0);
      REQUIRE(p.epsilon < -lam / p.beta);
      double prev = 0.0;
      for (int k = 0; k <= 50; ++k) {
        const double rho = rho_closed_form(p, n, 0.5 * k / (p.gamma * -lam));
        CHECK(rho >= 0.0);
        CHECK(rho >= prev);
        prev = rho;
      }
      CHECK(prev == doctest::Approx(rho_asymptotic(p, n)).epsilon(1e-9));
    }
  }

  TEST_CASE("suppressed modes decay to zero") {
    const auto p = make_params(0.3, 1.0, 1.0, 1.0, 0.0, 1e-3);
    CHECK(classify_mode(p, 0) == ModeRegime::Suppressed);
    CHECK(rho_asymptotic(p, 0) == 0.0);
    CHECK(rho_closed_form(p, 0, 100.0) < 1e-28);
    CHECK(rho_closed_form(p, 0, 0.0) == 1e-3);
  }

  TEST_CASE("marginal mode decays algebraically") {
    auto p = make_params(-0.25, 2.0, 1.5, 1.0, 0.5, 1e-3);
    CHECK(lambda_n(p, 0) == 0.0);
    CHECK(classify_mode(p, 0) == ModeRegime::Marginal);
    CHECK(rho_closed_form(p, 0, 10.0) == doctest::Approx(1e-3 / (1.0 + 2.0 * 1.5 * 2.0 * 1e-3 * 10.0)));
    CHECK(rho_asymptotic(p, 0) == 0.0);
    // continuous through lambda = 0
    p.alpha = -0.25 + 1e-12;
    CHECK(rel_err(rho_closed_form(p, 0, 10.0), 1e-3 / (1.0 + 0.06)) < 1e-9);
  }

  TEST_CASE("short-time form agrees early") {
    const auto p = make_params(-1.0, 1.0, 1.0, 0.5, 3.3, 1e-8);
    for (double t : {0.0, 0.1, 1.0, 3.0}) {
      CHECK(rel_err(rho_short_time(p, 3, t), rho_closed_form(p, 3, t)) < 1e-5);
    }
  }

  TEST_CASE("supercurrent vanishes at integer flux") {
    std::mt19937_64 rng(9);
    for (std::int64_t k = -3000; k <= 3000; ++k) {
      auto p = random_params(rng);
      p.flux = static_cast<double>(k) * flux_quantum();
      const double t = uniform(rng, 0.0, 10.0);
      CHECK(supercurrent(p, k, t) == 0.0);
    }
  }

  TEST_CASE("supercurrent sign follows n - Phi/Phi_Q") {
    const auto p = make_params(-1.0, 1.0, 1.0, 0.5, 3.3, 1e-4);
    CHECK(supercurrent(p, 3, 1.0) < 0.0);
    CHECK(supercurrent(p, 4, 1.0) > 0.0);
  }

  TEST_CASE("winding selector") {
    CHECK(winding_selector(3.3) == 3);
    CHECK(winding_selector(3.7) == 4);
    CHECK(winding_selector(-3.3) == -3);
    CHECK(winding_selector(2.5) == 2);
    CHECK(winding_selector(3.5) == 4);
    CHECK(winding_selector(-0.5) == 0);
    CHECK(winding_selector(1e7 + 0.2) == 10000000);
    CHECK_THROWS_AS(winding_selector(NAN), InvalidArgument);
  }

  TEST_CASE("winding selector is translation covariant") {
    std::mt19937_64 rng(3);
    int checked = 0;
    while (checked < 5000) {
      const double x = uniform(rng, -1e6, 1e6);
      const double frac = x - std::floor(x);
      if (std::abs(frac - 0.5) < 1e-6) continue;
      CHECK(winding_selector(x + 1.0) == winding_selector(x) + 1);
      ++checked;
    }
  }

  TEST_CASE("at most one supported mode in the single-mode window") {
    std::mt19937_64 rng(17);
    int cases = 0;
    while (cases < 1000) {
      const double kinetic = uniform(rng, 0.1, 2.0);
      const double ratio = uniform(rng, -50.0, 50.0);
      const std::int64_t n0 = winding_selector(ratio);
      double gap = INFINITY;
      for (std::int64_t n = n0 - 10; n <= n0 + 10; ++n) {
        if (n == n0) continue;
        const double a = static_cast<double>(n) - ratio;
        const double b = static_cast<double>(n0) - ratio;
        gap = std::min(gap, a * a - b * b);
      }
      const double bound = kinetic * gap;
      if (!(bound > 0.0)) continue;
      const double alpha = -uniform(rng, 0.0, 1.0) * bound;
      if (alpha == 0.0) continue;
      const auto p = make_params(alpha, 1.0, 1.0, kinetic, ratio, 1e-4);
      int supported = 0;
      for (std::int64_t n = n0 - 10; n <= n0 + 10; ++n) {
        if (classify_mode(p, n) == ModeRegime::Supported) ++supported;
      }
      CHECK(supported <= 1);
      ++cases;
    }
  }

  TEST_CASE("normalized view agrees with the dimensionful solution") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
      auto p = random_params(rng);
      if (p.alpha == 0.0) continue;
      const std::int64_t n = winding_selector(flux_ratio(p));
      const double t = uniform(rng, 0.0, 5.0);
      const double q = normalized_growth_rate(p, n);
      const double eps_norm = p.beta * p.epsilon / std::abs(p.alpha);
      const double rho = normalized_rho(q, eps_norm, normalized_time(p, t)) * std::abs(p.alpha) / p.beta;
      CHECK(rel_err(rho, rho_closed_form(p, n, t)) <= 1e-9);
    }
    CHECK_THROWS_AS(normalized_growth_rate(make_params(0.0, 1.0, 1.0, 1.0, 0.0, 1e-4), 0), DomainError);
  }

  TEST_CASE("normalized logistic values") {
    const double q = 0.9, eps = 1e-8;
    CHECK(normalized_rho(q, eps, 0.0) == eps);
    CHECK(normalized_rho(q, eps, 100.0) == doctest::Approx(q).epsilon(1e-12));
    const double t = 5.0;
    CHECK(rel_err(normalized_rho(q, eps, t), q * eps / (eps + std::exp(-2 * q * t) * (q - eps))) < 1e-13);
    CHECK(normalized_rho(0.0, eps, 1.0) == doctest::Approx(eps / (1.0 + 2.0 * eps)));
  }

  TEST_CASE("parameter validation") {
    auto p = make_params(-1.0, 1.0, 1.0, 1.0, 0.0, 1e-4);
    auto bad = p;
    bad.epsilon = 1e-2;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = p;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = p;
    bad.beta = 0.0;
    CHECK_THROWS_AS(lambda_n(bad, 0), InvalidArgument);
    bad = p;
    bad.radius = -1.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    CHECK_THROWS_AS(rho_closed_form(p, 0, -1.0), InvalidArgument);
  }

  TEST_CASE("London relation") {
    LondonParams lp{2.0, 3.0, 4.0};
    CHECK(london_current(lp, 5.0) == doctest::Approx(-2.0 * 9.0 / 4.0 * 5.0));
    lp.carrier_mass = 0.0;
    CHECK_THROWS_AS(london_current(lp, 1.0), InvalidArgument);
  }
}
