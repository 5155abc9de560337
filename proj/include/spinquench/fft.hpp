#pragma once

#include <complex>
#include <vector>

namespace spinq::fft {

// Thin deterministic wrapper over FFTW (ESTIMATE plans, unaligned-tolerant,
// in-place). Plan creation is serialized internally; execution on distinct
// instances is thread-safe. One instance per thread/trajectory.
class Fft2d {
 public:
  Fft2d(int nx, int nz);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  // Unnormalized: forward sums exp(-i k r), backward sums exp(+i k r).
  void forward(std::complex<double>* data) const;
  void backward_unnormalized(std::complex<double>* data) const;
  // backward / (nx*nz): forward followed by backward is the identity.
  void backward(std::complex<double>* data) const;

  void forward(std::vector<std::complex<double>>& v) const { forward(v.data()); }
  void backward_unnormalized(std::vector<std::complex<double>>& v) const {
    backward_unnormalized(v.data());
  }
  void backward(std::vector<std::complex<double>>& v) const { backward(v.data()); }

 private:
  int nx_;
  int nz_;
  void* plan_fwd_;
  void* plan_bwd_;
  std::vector<std::complex<double>> planning_buffer_;
};

} // namespace spinq::fft
