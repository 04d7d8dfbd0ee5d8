#pragma once

#include <complex>

namespace conveyor {

// Thin FFTW wrapper. Plan creation is serialized internally (FFTW planning is
// not thread-safe); execution on distinct data is. forward() is the
// unnormalized DFT, inverse() includes the 1/n factor.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  void forward(std::complex<double>* data) const;
  void inverse(std::complex<double>* data) const;

 private:
  int n_;
  void* fwd_;  // fftw_plan
  void* inv_;
};

}  // namespace conveyor
