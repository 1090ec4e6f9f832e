#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "specgsa/fft.hpp"
#include "specgsa/scheme.hpp"

namespace specgsa {

/// u(x, 0) = exp(-a (x - x0)^2) sin(k0 x), with the carrier given through k0 dx.
struct WavePacket {
  double x0 = 5.0;
  double a = 10.0;
  double k0dx = 0.22;
};

/// Periodic domain [0, L) with N points, u_t + c u_x = nu u_xx.
struct SimConfig {
  std::size_t N = 4096;
  double L = 10.0;
  double c = 0.5;
  double nu = 0.0;
  Scheme scheme = Scheme::RK4;
  double dt = 0.0;
  std::int64_t steps = 0;
  WavePacket ic;

  double dx() const { return L / static_cast<double>(N); }
  double Nc() const { return c * dt / dx(); }
  double Pe() const { return nu * dt / (dx() * dx()); }
  double k0() const { return ic.k0dx / dx(); }

  /// Throws std::invalid_argument unless N is a power of two >= 4, L, c and
  /// dt are positive, nu >= 0 and steps >= 0.
  void validate() const;

  /// dt = Nc dx / c and nu = Pe dx^2 / dt.
  static SimConfig from_numbers(Scheme scheme, std::size_t N, double L, double c, double Nc,
                                double Pe, std::int64_t steps);
};

/// Parameter sets of the three wave-packet benchmarks:
///   fig1: Nc = 0.1, Pe = 0,    30000 steps
///   fig2: Nc = 0.1, Pe = 0.01, 30000 steps
///   fig3: Nc = 0.5, Pe = 0.01, 101 steps
/// all with N = 4096, L = 10, c = 0.5.
SimConfig figure_preset(std::string_view figure, Scheme scheme);

struct SimState {
  double t = 0.0;
  std::int64_t step = 0;
  std::vector<double> u;
  /// Largest |Im| discarded by the inverse transforms of the last step.
  double max_imag = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step, double max_abs);
  std::int64_t step() const { return step_; }
  double max_abs() const { return max_abs_; }

 private:
  std::int64_t step_;
  double max_abs_;
};

std::vector<double> grid_points(const SimConfig& cfg);
std::vector<double> initial_condition(const SimConfig& cfg);

/// Signed mode index of FFT slot i: 0..N/2 then -N/2+1..-1.
std::int64_t mode_index(std::size_t i, std::size_t N);

/// Fourier-spectral derivative of a periodic real signal on [0, L).
/// order 1 multiplies mode k by ik (zero at the Nyquist mode), order 2 by -k^2.
std::vector<double> spectral_derivative(std::span<const double> u, double L, int order);

/// Discrete L2 norm sqrt(dx sum u^2), evaluated with scaling so that very
/// large fields do not overflow.
double l2_norm(std::span<const double> u, double dx);
double linf_norm(std::span<const double> u);

/// Pseudo-spectral model of one configuration: FFT plans, per-mode operator
/// and the initial spectrum. Per mode the semi-discrete operator is
///   lambda_m = -c (i k_m)' - nu k_m^2,  (i k)' = 0 at the Nyquist mode.
class SpectralModel {
 public:
  explicit SpectralModel(SimConfig cfg);
  /// Same, with arbitrary real initial data of length cfg.N instead of the packet.
  SpectralModel(SimConfig cfg, std::vector<double> u0);

  const SimConfig& config() const { return cfg_; }

  SimState initial_state() const;

  /// Advances one step with the s-stage scheme of the configuration
  /// (midpoint RK2, Shu-Osher RK3, classical RK4; exact per-mode
  /// exponential for Scheme::Exact). Throws DivergenceError on a non-finite
  /// sample.
  void step(SimState& state);

  /// du/dt = -c u_x + nu u_xx evaluated spectrally.
  std::vector<double> rhs(std::span<const double> u);

  /// Analytic evolution of the discrete initial spectrum to time t.
  std::vector<double> exact(double t);

  /// Initial spectrum times G_m^n per mode, where G_m is the stability
  /// function of `scheme` at lambda_m dt.
  std::vector<double> predicted(std::int64_t n, Scheme scheme);
  std::vector<double> predicted(std::int64_t n) { return predicted(n, cfg_.scheme); }

  /// Per-mode amplification factor used by step() (slot order).
  std::vector<std::complex<double>> mode_amplification(Scheme scheme) const;

  const std::vector<std::complex<double>>& initial_spectrum() const { return u0_hat_; }
  std::vector<double> wavenumbers() const { return k_; }

  Fft& fft() { return fft_; }

 private:
  double real_inverse(std::span<std::complex<double>> spectrum, std::span<double> out);

  SimConfig cfg_;
  Fft fft_;
  std::vector<double> k_;
  std::vector<std::complex<double>> symbol_;  // lambda_m
  std::vector<double> u0_;
  std::vector<std::complex<double>> u0_hat_;

  // Work buffers.
  std::vector<std::complex<double>> hat_;
  std::vector<std::complex<double>> phys_;
  std::vector<std::vector<double>> stages_;
  std::vector<double> trial_;
};

/// One step of cfg.scheme from `state`.
SimState rk_step(const SimState& state, const SimConfig& cfg);

std::vector<double> exact_solution(const SimConfig& cfg, double t);

/// Mode-by-mode prediction u_hat0 G^n of the time-stepped solution.
std::vector<double> gsa_predicted_solution(const SimConfig& cfg, std::int64_t n);

struct NormRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double l2_error = 0.0;
  double linf_error = 0.0;
  double l2_norm = 0.0;
};

struct Snapshot {
  SimState state;
  std::vector<double> exact;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<NormRecord> norms;
};

/// Steps cfg.steps times, recording a snapshot and error norms at step 0,
/// every `snapshot_stride` steps and at the final step. stride = 0 records
/// only the first and last steps. Propagates DivergenceError.
RunResult run(const SimConfig& cfg, std::int64_t snapshot_stride);

/// Fields of the error-forcing decomposition at t = n dt:
///   diffusion mismatch   sum (nu_N - nu) k^2 F_k
///   boundary             c_N(k_max) sum i k F_k
///   dispersion          -sum_k (V_gN - c_N)/k  I(k) dk,  I(k) = sum_{k' <= k} i k' F_k'
///   phase               -sum i k c F_k
/// with F_k = U0(k) |G|^n exp(i k (x - c_N t)). For nu = 0 the first field
/// is the growth term -sum (ln|G| / dt) F_k.
struct ErrorBudget {
  double t = 0.0;
  std::vector<double> term_diffusion_mismatch;
  std::vector<double> term_boundary;
  std::vector<double> term_dispersion;
  std::vector<double> term_phase;

  std::vector<double> total() const;
};

/// Throws std::invalid_argument for n < 0.
ErrorBudget error_budget(const SimConfig& cfg, std::int64_t n);

void write_snapshot_csv(std::ostream& out, std::span<const double> x, std::span<const double> u_num,
                        std::span<const double> u_exact);
void write_norms_csv(std::ostream& out, std::span<const NormRecord> norms);
void write_budget_csv(std::ostream& out, std::span<const double> x, const ErrorBudget& budget);

}  // namespace specgsa
