#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>

namespace tdgl_ring::detail {

/// FFTW planning is not thread-safe; every plan create/destroy goes through this.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Aligned M-point complex buffer pair with forward (space -> modes) and
/// backward (modes -> space) plans. Transforms are unnormalized.
/// FFTW_ESTIMATE keeps the plan choice independent of timing, so
/// trajectories are reproducible run to run.
class FourierTransform {
 public:
  explicit FourierTransform(int n) : n_(n) {
    std::lock_guard lock(fftw_planner_mutex());
    space_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    modes_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    forward_ = fftw_plan_dft_1d(n, space_, modes_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, modes_, space_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~FourierTransform() {
    if (space_ == nullptr) return;
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(space_);
    fftw_free(modes_);
  }

  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  int size() const { return n_; }

  std::span<std::complex<double>> space() { return {reinterpret_cast<std::complex<double>*>(space_), size_t(n_)}; }
  std::span<std::complex<double>> modes() { return {reinterpret_cast<std::complex<double>*>(modes_), size_t(n_)}; }

  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  int n_;
  fftw_complex* space_ = nullptr;
  fftw_complex* modes_ = nullptr;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

}  // namespace tdgl_ring::detail
