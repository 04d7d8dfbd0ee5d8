#include "conveyor/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace conveyor {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Fft size must be positive");
  std::lock_guard<std::mutex> lock(plan_mutex());
  // Plan on a scratch buffer; FFTW_UNALIGNED lets execute_dft run on any
  // caller array of the same size.
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  fwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!fwd_ || !inv_) throw std::runtime_error("fftw plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft::forward(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), d, d);
}

void Fft::inverse(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(inv_), d, d);
  double s = 1.0 / n_;
  for (int i = 0; i < n_; ++i) data[i] *= s;
}

}  // namespace conveyor
