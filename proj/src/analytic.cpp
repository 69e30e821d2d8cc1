#include "tdgl_ring/analytic.hpp"

#include <cmath>
#include <limits>

#include "tdgl_ring/error.hpp"

namespace tdgl_ring::analytic {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// epsilon / (e^x + beta*epsilon*expm1(x)/lambda), x = 2 Gamma lambda t.
double logistic_density(double lambda, double beta, double epsilon, double rate_time) {
  const double x = rate_time;
  const double growth = std::expm1(x) / lambda;
  const double denom = std::exp(x) + beta * epsilon * growth;
  if (std::isnan(denom) || denom <= 0.0) {
    throw DomainError("rho closed form: denominator is not positive");
  }
  return epsilon / denom;
}

}  // namespace

void validate(const AnalyticParams& p) {
  if (!positive_finite(p.gamma)) throw InvalidArgument("gamma must be positive");
  if (!positive_finite(p.beta)) throw InvalidArgument("beta must be positive");
  if (!positive_finite(p.radius)) throw InvalidArgument("radius must be positive");
  if (!positive_finite(p.mass_eff)) throw InvalidArgument("effective mass must be positive");
  if (!std::isfinite(p.alpha)) throw InvalidArgument("alpha must be finite");
  if (!std::isfinite(p.flux)) throw InvalidArgument("flux must be finite");
  if (!(p.epsilon > 0.0 && p.epsilon < kMaxEpsilon)) {
    throw InvalidArgument("epsilon must lie in (0, 1e-2)");
  }
}

const char* to_string(ModeRegime regime) {
  switch (regime) {
    case ModeRegime::Suppressed: return "suppressed";
    case ModeRegime::Supported: return "supported";
    case ModeRegime::Marginal: return "marginal";
  }
  return "?";
}

double kinetic_scale(const AnalyticParams& p) {
  const double hbar = p.constants.hbar;
  return hbar * hbar / (2.0 * p.mass_eff * p.radius * p.radius);
}

double flux_ratio(const AnalyticParams& p) {
  const double r = p.flux / flux_quantum(p.constants);
  // k * Phi_Q / Phi_Q is off by an ulp for ~10% of integers k.
  const double k = std::nearbyint(r);
  if (k != 0.0 && std::abs(r - k) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k)) return k;
  return r;
}

double lambda_n(const AnalyticParams& p, std::int64_t n) {
  validate(p);
  const double shift = static_cast<double>(n) - flux_ratio(p);
  return p.alpha + kinetic_scale(p) * shift * shift;
}

std::int64_t winding_selector(double ratio) {
  if (!std::isfinite(ratio)) throw InvalidArgument("flux ratio must be finite");
  // nearbyint under the default FE_TONEAREST mode rounds halves to even.
  return static_cast<std::int64_t>(std::nearbyint(ratio));
}

double rho_closed_form(const AnalyticParams& p, std::int64_t n, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be nonnegative");
  const double lam = lambda_n(p, n);
  if (lam == 0.0) {
    return p.epsilon / (1.0 + 2.0 * p.gamma * p.beta * p.epsilon * t);
  }
  return logistic_density(lam, p.beta, p.epsilon, 2.0 * p.gamma * lam * t);
}

double rho_short_time(const AnalyticParams& p, std::int64_t n, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be nonnegative");
  return p.epsilon * std::exp(-2.0 * p.gamma * lambda_n(p, n) * t);
}

double rho_asymptotic(const AnalyticParams& p, std::int64_t n) {
  const double lam = lambda_n(p, n);
  return lam < 0.0 ? -lam / p.beta : 0.0;
}

double supercurrent(const AnalyticParams& p, std::int64_t n, double t) {
  const double rho = rho_closed_form(p, n, t);
  const double e = p.constants.elementary_charge;
  const double prefactor = 2.0 * e * p.constants.hbar / (p.mass_eff * p.radius);
  return prefactor * rho * (static_cast<double>(n) - flux_ratio(p));
}

ModeRegime classify_mode(const AnalyticParams& p, std::int64_t n) {
  const double lam = lambda_n(p, n);
  if (lam < 0.0) return ModeRegime::Supported;
  if (lam == 0.0) return ModeRegime::Marginal;
  return ModeRegime::Suppressed;
}

void validate(const LondonParams& lp) {
  if (!positive_finite(lp.carrier_density)) throw InvalidArgument("carrier density must be positive");
  if (!positive_finite(lp.carrier_mass)) throw InvalidArgument("carrier mass must be positive");
  if (!std::isfinite(lp.carrier_charge) || lp.carrier_charge == 0.0) {
    throw InvalidArgument("carrier charge must be nonzero");
  }
}

double london_current(const LondonParams& lp, double vector_potential) {
  validate(lp);
  return -(lp.carrier_density * lp.carrier_charge * lp.carrier_charge / lp.carrier_mass) * vector_potential;
}

double normalized_rho(double growth_rate, double epsilon, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be nonnegative");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  // Same ODE with Gamma = 1, beta = 1, lambda = -growth_rate.
  if (growth_rate == 0.0) return epsilon / (1.0 + 2.0 * epsilon * t);
  return logistic_density(-growth_rate, 1.0, epsilon, -2.0 * growth_rate * t);
}

double normalized_growth_rate(const AnalyticParams& p, std::int64_t n) {
  if (p.alpha == 0.0) throw DomainError("normalized units need alpha != 0");
  return -lambda_n(p, n) / std::abs(p.alpha);
}

double normalized_time(const AnalyticParams& p, double t) {
  if (p.alpha == 0.0) throw DomainError("normalized units need alpha != 0");
  return p.gamma * std::abs(p.alpha) * t;
}

}  // namespace tdgl_ring::analytic
