#include "specgsa/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace specgsa {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_size(std::size_t expected, std::size_t in, std::size_t out) {
  if (in != expected || out != expected) throw std::invalid_argument("FFT buffer length mismatch");
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  in_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  out_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (in_ == nullptr || out_ == nullptr) {
    fftw_free(in_);
    fftw_free(out_);
    throw std::bad_alloc();
  }
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(in_), as_fftw(out_), FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(in_), as_fftw(out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    in_ = std::exchange(other.in_, nullptr);
    out_ = std::exchange(other.out_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void Fft::release() noexcept {
  if (forward_plan_ == nullptr && in_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(in_);
  fftw_free(out_);
  forward_plan_ = inverse_plan_ = nullptr;
  in_ = out_ = nullptr;
}

void Fft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  check_size(n_, in.size(), out.size());
  for (std::size_t j = 0; j < n_; ++j) in_[j] = {in[j], 0.0};
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(out_, out_ + n_, out.begin());
}

void Fft::forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  check_size(n_, in.size(), out.size());
  std::copy(in.begin(), in.end(), in_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(out_, out_ + n_, out.begin());
}

void Fft::inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  check_size(n_, in.size(), out.size());
  std::copy(in.begin(), in.end(), in_);
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = out_[j] * scale;
}

}  // namespace specgsa
