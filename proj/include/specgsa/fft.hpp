#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace specgsa {

/// One-dimensional complex DFT of fixed length backed by FFTW.
///
/// forward:  X_m = sum_j x_j exp(-2 pi i j m / n)
/// inverse:  x_j = (1/n) sum_m X_m exp(+2 pi i j m / n)
///
/// Plans use FFTW_ESTIMATE so results are reproducible run to run. Plan
/// creation is serialized internally; execution on distinct objects is
/// thread-safe.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  std::size_t size() const { return n_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  void release() noexcept;

  std::size_t n_ = 0;
  std::complex<double>* in_ = nullptr;
  std::complex<double>* out_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace specgsa
