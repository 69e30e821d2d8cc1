#pragma once

#include <cstdint>

#include "tdgl_ring/units.hpp"

namespace tdgl_ring::analytic {

/// Dimensionful parameters of the single-mode TDGL reduction on a thin ring.
///
/// `alpha` is the combination alpha0 * (T - Tc); it is negative below the
/// transition. `epsilon` is the Cooper-pair density rho_n(0) just after the
/// transition and must satisfy 0 < epsilon < 1e-2.
struct AnalyticParams {
  double gamma = 1.0;     // 1/(J s)
  double alpha = -1.0;    // J
  double beta = 1.0;      // J per density unit
  double mass_eff = 1.0;  // kg
  double radius = 1.0;    // m
  double flux = 0.0;      // Wb
  double epsilon = 1e-4;  // rho_n(0)
  PhysicalConstants constants = kCodata;
};

inline constexpr double kMaxEpsilon = 1e-2;

void validate(const AnalyticParams& p);

enum class ModeRegime { Suppressed, Supported, Marginal };

const char* to_string(ModeRegime regime);

/// hbar^2 / (2 m* R^2), the kinetic energy scale of one unit of winding.
double kinetic_scale(const AnalyticParams& p);

/// Phi / Phi_Q; values within a few ulps of an integer are returned as that integer.
double flux_ratio(const AnalyticParams& p);

/// lambda_n = alpha + hbar^2/(2 m* R^2) (n - Phi/Phi_Q)^2.
double lambda_n(const AnalyticParams& p, std::int64_t n);

/// Integer nearest to `flux_ratio`; exact half-integers go to the even neighbour.
std::int64_t winding_selector(double flux_ratio);

/// Exact solution of d(rho)/dt = 2 Gamma (-lambda_n - beta rho) rho, rho(0) = epsilon.
///
/// Evaluated as epsilon / (e^x + beta*epsilon*expm1(x)/lambda_n), x = 2 Gamma lambda_n t,
/// which is algebraically identical to the textbook form but stays accurate as
/// lambda_n -> 0 and reduces to epsilon / (1 + 2 Gamma beta epsilon t) at lambda_n = 0.
double rho_closed_form(const AnalyticParams& p, std::int64_t n, double t);

/// Linearized (beta = 0) solution epsilon * exp(-2 Gamma lambda_n t).
double rho_short_time(const AnalyticParams& p, std::int64_t n, double t);

/// t -> infinity limit of rho_closed_form: 0 for lambda_n >= 0, -lambda_n/beta otherwise.
double rho_asymptotic(const AnalyticParams& p, std::int64_t n);

/// j_s(t) = (2 e hbar / m* R) rho_n(t) (n - Phi/Phi_Q).
double supercurrent(const AnalyticParams& p, std::int64_t n, double t);

ModeRegime classify_mode(const AnalyticParams& p, std::int64_t n);

/// Carrier parameters of the London relation j = -(n_s e*^2 / m*) A.
struct LondonParams {
  double carrier_density = 1.0;  // 1/m^3
  double carrier_charge = 1.0;   // C
  double carrier_mass = 1.0;     // kg
};

void validate(const LondonParams& lp);

double london_current(const LondonParams& lp, double vector_potential);

/// Normalized (dimensionless) view of the single-mode solution, matching the
/// units of the field engine: time in xi^2/D, density in |alpha|/beta.
///
/// `growth_rate` q is the normalized per-mode linear rate (1 - gauge-shifted
/// kinetic term); the dimensionful correspondence is q = -lambda_n/|alpha|.
double normalized_rho(double growth_rate, double epsilon, double t);

/// Normalized growth rate for mode n of `p`, i.e. -lambda_n/|alpha|. Requires alpha != 0.
double normalized_growth_rate(const AnalyticParams& p, std::int64_t n);

/// Normalized time Gamma |alpha| t. Requires alpha != 0.
double normalized_time(const AnalyticParams& p, double t);

}  // namespace tdgl_ring::analytic
