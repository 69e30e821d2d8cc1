#include "tdgl_ring/causal.hpp"

#include <algorithm>
#include <cmath>

#include "tdgl_ring/error.hpp"

namespace tdgl_ring::causal {

void validate(const CausalScenario& s) {
  tdgl_ring::validate(s.material);
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(s.ring_radius_norm) || !positive(s.gap_norm) || !positive(s.equilibration_time_norm)) {
    throw InvalidGeometry("ring radius, gap and equilibration time must be positive");
  }
  if (!std::isfinite(s.transition_time_norm)) throw InvalidGeometry("transition time must be finite");
  if (!(s.cooling_duration_norm >= 0.0)) throw InvalidGeometry("cooling duration must be nonnegative");
  if (s.cooling_duration_norm >= s.gap_norm * light_time_per_lambda(s.material)) {
    throw InvalidGeometry("cooling must finish before light crosses the ring-solenoid gap");
  }
}

double light_time_per_lambda(const MaterialProps& m, const PhysicalConstants& c) {
  tdgl_ring::validate(m);
  return m.diffusion * m.lambda / (c.speed_of_light * m.xi * m.xi);
}

double min_radius_for_window(double t_eq_norm, const MaterialProps& m, const PhysicalConstants& c) {
  if (!(t_eq_norm >= 0.0)) throw InvalidArgument("equilibration time must be nonnegative");
  return t_eq_norm / light_time_per_lambda(m, c);
}

DetectorWindow detector_window(const CausalScenario& s, double x) {
  validate(s);
  if (!(x > 0.0 && x < s.gap_norm)) {
    throw InvalidGeometry("detector must sit strictly between the ring and the solenoid");
  }
  const double tau = light_time_per_lambda(s.material);
  return {s.transition_time_norm + x * tau, s.transition_time_norm + (2.0 * s.gap_norm - x) * tau};
}

FeasibilityReport feasibility_report(const std::vector<MaterialProps>& materials,
                                     const std::vector<double>& measured_t99) {
  FeasibilityReport report;
  report.assumptions = {
      "solenoid response bounded by a light-speed front launched at the phase transition",
      "cooling treated as instantaneous at the transition",
      "radial distances only",
      "equilibration time taken as the largest measured mean t99",
      "plausible means ring-solenoid gap <= 1 m",
  };
  std::vector<double> finite;
  for (double t : measured_t99) {
    if (std::isfinite(t) && t > 0.0) finite.push_back(t);
  }
  if (finite.empty() || materials.empty()) {
    report.inconclusive = true;
    return report;
  }
  const double t_eq = *std::max_element(finite.begin(), finite.end());
  for (const auto& m : materials) {
    FeasibilityEntry e;
    e.material = m.name;
    e.t_eq_norm = t_eq;
    e.r_min_lambda = min_radius_for_window(t_eq, m);
    e.d_min_m = length_from_normalized(e.r_min_lambda, m);
    e.plausible = e.d_min_m <= kPlausibleGapMeters;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace tdgl_ring::causal
