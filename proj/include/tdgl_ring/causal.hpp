#pragma once

#include <string>
#include <vector>

#include "tdgl_ring/units.hpp"

namespace tdgl_ring::causal {

/// Radial 1-D spacetime picture: ring at r = 0, solenoid at r = gap.
/// Lengths in lambda, times in xi^2/D.
struct CausalScenario {
  MaterialProps material;
  double ring_radius_norm = 1.0;
  double gap_norm = 1.0;
  double equilibration_time_norm = 1.0;
  /// Time of the (instantaneous) phase transition.
  double transition_time_norm = 0.0;
  /// Duration of the cooling stage; must be shorter than light needs to cross the gap.
  double cooling_duration_norm = 0.0;
};

void validate(const CausalScenario& scenario);

/// Time light needs to cross one penetration depth, D lambda / (c xi^2), in xi^2/D.
double light_time_per_lambda(const MaterialProps& material, const PhysicalConstants& constants = kCodata);

/// Gap (in lambda) that light crosses during t_eq: t_eq / light_time_per_lambda.
double min_radius_for_window(double t_eq_norm, const MaterialProps& material,
                             const PhysicalConstants& constants = kCodata);

struct DetectorWindow {
  double open = 0.0;
  double close = 0.0;
  double length() const { return close - open; }
};

/// Interval during which a detector at `detector_position_norm` (measured from
/// the ring, strictly inside the gap) can see the ring's response but not yet
/// any response of the solenoid. The solenoid response is bounded by a light
/// front launched at the transition that bounces off the solenoid.
/// Throws InvalidGeometry for positions outside (0, gap).
DetectorWindow detector_window(const CausalScenario& scenario, double detector_position_norm);

struct FeasibilityEntry {
  std::string material;
  double t_eq_norm = 0.0;
  double r_min_lambda = 0.0;
  double d_min_m = 0.0;
  bool plausible = false;
};

struct FeasibilityReport {
  bool inconclusive = false;
  std::vector<FeasibilityEntry> entries;
  std::vector<std::string> assumptions;
};

/// Laboratory-plausibility cutoff on the ring-solenoid gap.
inline constexpr double kPlausibleGapMeters = 1.0;

/// One entry per material, using the largest of the measured equilibration
/// times. No times -> inconclusive.
FeasibilityReport feasibility_report(const std::vector<MaterialProps>& materials,
                                     const std::vector<double>& measured_t99);

}  // namespace tdgl_ring::causal
