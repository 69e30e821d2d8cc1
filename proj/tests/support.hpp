#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace test_support {

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Adaptive Dormand-Prince integration of d(rho)/dt = 2 g (-lam - b rho) rho from rho(0)=eps.
inline double integrate_logistic(double g, double lam, double b, double eps, double t_end) {
  using namespace boost::numeric::odeint;
  double rho = eps;
  if (t_end == 0.0) return rho;
  auto rhs = [&](const double& r, double& drdt, double) { drdt = 2.0 * g * (-lam - b * r) * r; };
  auto stepper = make_controlled(0.0, 1e-12, runge_kutta_dopri5<double>());
  integrate_adaptive(stepper, rhs, rho, 0.0, t_end, t_end * 1e-4);
  return rho;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = std::filesystem::temp_directory_path() /
             ("tdgl_ring_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support
