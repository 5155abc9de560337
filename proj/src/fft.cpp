#include "spinquench/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace spinq::fft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

Fft2d::Fft2d(int nx, int nz) : nx_(nx), nz_(nz), planning_buffer_(size_t(nx) * nz) {
  if (nx < 1 || nz < 1) throw std::invalid_argument("Fft2d: bad dimensions");
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* buf = reinterpret_cast<fftw_complex*>(planning_buffer_.data());
  // FFTW_UNALIGNED lets the plans run on any caller array in-place.
  plan_fwd_ = fftw_plan_dft_2d(nx, nz, buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_2d(nx, nz, buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("Fft2d: planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft2d::forward(std::complex<double>* data) const {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void Fft2d::backward_unnormalized(std::complex<double>* data) const {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
}

void Fft2d::backward(std::complex<double>* data) const {
  backward_unnormalized(data);
  const double norm = 1.0 / (static_cast<double>(nx_) * nz_);
  const size_t n = static_cast<size_t>(nx_) * nz_;
  for (size_t i = 0; i < n; ++i) data[i] *= norm;
}

} // namespace spinq::fft
