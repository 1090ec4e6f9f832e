#include "specgsa/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "specgsa/format.hpp"
#include "specgsa/gsa.hpp"

namespace specgsa {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Explicit Butcher tableau, lower-triangular part stored row by row.
struct Tableau {
  int stages;
  std::array<std::array<double, 4>, 4> a;
  std::array<double, 4> b;
};

const Tableau& tableau(Scheme scheme) {
  // Midpoint method.
  static const Tableau rk2{2, {{{0, 0, 0, 0}, {0.5, 0, 0, 0}, {}, {}}}, {0.0, 1.0, 0, 0}};
  // Shu-Osher (SSP) third-order scheme.
  static const Tableau rk3{
      3, {{{0, 0, 0, 0}, {1.0, 0, 0, 0}, {0.25, 0.25, 0, 0}, {}}}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 0}};
  // Classical fourth-order scheme.
  static const Tableau rk4{4,
                           {{{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1.0, 0}}},
                           {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};
  switch (scheme) {
    case Scheme::RK2: return rk2;
    case Scheme::RK3: return rk3;
    default: return rk4;
  }
}

std::complex<double> integer_power(std::complex<double> base, std::int64_t n) {
  std::complex<double> result{1.0, 0.0};
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double max_abs_finite(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) {
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

void SimConfig::validate() const {
  if (!is_power_of_two(N) || N < 4) throw std::invalid_argument("N must be a power of two >= 4");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be non-negative");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  if (!std::isfinite(ic.x0) || !std::isfinite(ic.a) || !std::isfinite(ic.k0dx) || ic.a < 0.0) {
    throw std::invalid_argument("invalid wave-packet parameters");
  }
}

SimConfig SimConfig::from_numbers(Scheme scheme, std::size_t N, double L, double c, double Nc,
                                  double Pe, std::int64_t steps) {
  SimConfig cfg;
  cfg.scheme = scheme;
  cfg.N = N;
  cfg.L = L;
  cfg.c = c;
  cfg.steps = steps;
  const double dx = cfg.dx();
  cfg.dt = Nc * dx / c;
  cfg.nu = Pe * dx * dx / cfg.dt;
  return cfg;
}

SimConfig figure_preset(std::string_view figure, Scheme scheme) {
  if (figure == "fig1") return SimConfig::from_numbers(scheme, 4096, 10.0, 0.5, 0.1, 0.0, 30000);
  if (figure == "fig2") return SimConfig::from_numbers(scheme, 4096, 10.0, 0.5, 0.1, 0.01, 30000);
  if (figure == "fig3") return SimConfig::from_numbers(scheme, 4096, 10.0, 0.5, 0.5, 0.01, 101);
  throw std::invalid_argument("unknown figure preset '" + std::string(figure) +
                              "' (expected fig1, fig2 or fig3)");
}

DivergenceError::DivergenceError(std::int64_t step, double max_abs)
    : std::runtime_error("solution diverged at step " + std::to_string(step) +
                         " (max |u| before the step: " + format_double(max_abs) + ")"),
      step_(step),
      max_abs_(max_abs) {}

std::vector<double> grid_points(const SimConfig& cfg) {
  std::vector<double> x(cfg.N);
  const double dx = cfg.dx();
  for (std::size_t j = 0; j < cfg.N; ++j) x[j] = dx * static_cast<double>(j);
  return x;
}

std::vector<double> initial_condition(const SimConfig& cfg) {
  std::vector<double> u(cfg.N);
  const double k0 = cfg.k0();
  const auto x = grid_points(cfg);
  for (std::size_t j = 0; j < cfg.N; ++j) {
    const double r = x[j] - cfg.ic.x0;
    u[j] = std::exp(-cfg.ic.a * r * r) * std::sin(k0 * x[j]);
  }
  return u;
}

std::int64_t mode_index(std::size_t i, std::size_t N) {
  const auto m = static_cast<std::int64_t>(i);
  return i <= N / 2 ? m : m - static_cast<std::int64_t>(N);
}

std::vector<double> spectral_derivative(std::span<const double> u, double L, int order) {
  const std::size_t N = u.size();
  if (!is_power_of_two(N)) throw std::invalid_argument("spectral_derivative needs a power-of-two length");
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  Fft fft(N);
  std::vector<std::complex<double>> hat(N);
  fft.forward(u, hat);
  for (std::size_t i = 0; i < N; ++i) {
    const std::int64_t m = mode_index(i, N);
    const double k = kTwoPi * static_cast<double>(m) / L;
    if (order == 1) {
      hat[i] *= (2 * m == static_cast<std::int64_t>(N)) ? std::complex<double>{} : std::complex<double>{0.0, k};
    } else {
      hat[i] *= -k * k;
    }
  }
  std::vector<std::complex<double>> phys(N);
  fft.inverse(hat, phys);
  std::vector<double> out(N);
  for (std::size_t j = 0; j < N; ++j) out[j] = phys[j].real();
  return out;
}

double linf_norm(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(std::span<const double> u, double dx) {
  const double scale = linf_norm(u);
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double v : u) {
    const double r = v / scale;
    sum += r * r;
  }
  return scale * std::sqrt(dx * sum);
}

SpectralModel::SpectralModel(SimConfig cfg) : SpectralModel(cfg, initial_condition(cfg)) {}

SpectralModel::SpectralModel(SimConfig cfg, std::vector<double> u0)
    : cfg_(std::move(cfg)), fft_((cfg_.validate(), cfg_.N)), u0_(std::move(u0)) {
  if (u0_.size() != cfg_.N) throw std::invalid_argument("initial data size does not match N");
  const std::size_t N = cfg_.N;
  k_.resize(N);
  symbol_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::int64_t m = mode_index(i, N);
    const double k = kTwoPi * static_cast<double>(m) / cfg_.L;
    k_[i] = k;
    const double convective = (2 * m == static_cast<std::int64_t>(N)) ? 0.0 : -cfg_.c * k;
    symbol_[i] = {-cfg_.nu * k * k, convective};
  }
  u0_hat_.resize(N);
  fft_.forward(u0_, u0_hat_);
  hat_.resize(N);
  phys_.resize(N);
  stages_.assign(4, std::vector<double>(N));
  trial_.resize(N);
}

SimState SpectralModel::initial_state() const {
  SimState s;
  s.u = u0_;
  return s;
}

double SpectralModel::real_inverse(std::span<std::complex<double>> spectrum, std::span<double> out) {
  fft_.inverse(spectrum, phys_);
  double max_imag = 0.0;
  for (std::size_t j = 0; j < cfg_.N; ++j) {
    out[j] = phys_[j].real();
    max_imag = std::max(max_imag, std::abs(phys_[j].imag()));
  }
  return max_imag;
}

std::vector<double> SpectralModel::rhs(std::span<const double> u) {
  std::vector<double> out(cfg_.N);
  fft_.forward(u, hat_);
  for (std::size_t i = 0; i < cfg_.N; ++i) hat_[i] *= symbol_[i];
  real_inverse(hat_, out);
  return out;
}

void SpectralModel::step(SimState& state) {
  const std::size_t N = cfg_.N;
  if (state.u.size() != N) throw std::invalid_argument("state size does not match the configuration");
  const double before = max_abs_finite(state.u);
  double max_imag = 0.0;

  if (cfg_.scheme == Scheme::Exact) {
    fft_.forward(state.u, hat_);
    for (std::size_t i = 0; i < N; ++i) hat_[i] *= std::exp(symbol_[i] * cfg_.dt);
    max_imag = real_inverse(hat_, state.u);
  } else {
    const Tableau& tab = tableau(cfg_.scheme);
    const double dt = cfg_.dt;
    for (int s = 0; s < tab.stages; ++s) {
      std::copy(state.u.begin(), state.u.end(), trial_.begin());
      for (int j = 0; j < s; ++j) {
        const double w = dt * tab.a[s][j];
        if (w == 0.0) continue;
        for (std::size_t n = 0; n < N; ++n) trial_[n] += w * stages_[j][n];
      }
      fft_.forward(trial_, hat_);
      for (std::size_t i = 0; i < N; ++i) hat_[i] *= symbol_[i];
      max_imag = std::max(max_imag, real_inverse(hat_, stages_[s]));
    }
    for (int s = 0; s < tab.stages; ++s) {
      const double w = dt * tab.b[s];
      if (w == 0.0) continue;
      for (std::size_t n = 0; n < N; ++n) state.u[n] += w * stages_[s][n];
    }
  }

  state.step += 1;
  state.t = static_cast<double>(state.step) * cfg_.dt;
  state.max_imag = max_imag;
  for (double v : state.u) {
    if (!std::isfinite(v)) throw DivergenceError(state.step, before);
  }
}

std::vector<double> SpectralModel::exact(double t) {
  const std::size_t N = cfg_.N;
  // Translation by c t, expressed as a fraction of the period so that whole
  // revolutions cancel exactly.
  const double shift = cfg_.c * t / cfg_.L;
  for (std::size_t i = 0; i < N; ++i) {
    const auto m = static_cast<double>(mode_index(i, N));
    const double turns = std::fmod(m * shift, 1.0);
    const double decay = std::exp(-cfg_.nu * k_[i] * k_[i] * t);
    hat_[i] = u0_hat_[i] * std::polar(decay, -kTwoPi * turns);
  }
  std::vector<double> out(N);
  real_inverse(hat_, out);
  return out;
}

std::vector<std::complex<double>> SpectralModel::mode_amplification(Scheme scheme) const {
  std::vector<std::complex<double>> G(cfg_.N);
  for (std::size_t i = 0; i < cfg_.N; ++i) G[i] = stability_function(scheme, symbol_[i] * cfg_.dt);
  return G;
}

std::vector<double> SpectralModel::predicted(std::int64_t n, Scheme scheme) {
  if (n < 0) throw std::invalid_argument("step count must be non-negative");
  const auto G = mode_amplification(scheme);
  for (std::size_t i = 0; i < cfg_.N; ++i) hat_[i] = u0_hat_[i] * integer_power(G[i], n);
  std::vector<double> out(cfg_.N);
  real_inverse(hat_, out);
  return out;
}

SimState rk_step(const SimState& state, const SimConfig& cfg) {
  SpectralModel model(cfg);
  SimState next = state;
  model.step(next);
  return next;
}

std::vector<double> exact_solution(const SimConfig& cfg, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  SpectralModel model(cfg);
  return model.exact(t);
}

std::vector<double> gsa_predicted_solution(const SimConfig& cfg, std::int64_t n) {
  SpectralModel model(cfg);
  return model.predicted(n);
}

RunResult run(const SimConfig& cfg, std::int64_t snapshot_stride) {
  if (snapshot_stride < 0) throw std::invalid_argument("snapshot stride must be non-negative");
  SpectralModel model(cfg);
  RunResult result;
  const double dx = cfg.dx();

  auto record = [&](const SimState& state) {
    std::vector<double> exact = model.exact(state.t);
    std::vector<double> err(cfg.N);
    for (std::size_t j = 0; j < cfg.N; ++j) err[j] = exact[j] - state.u[j];
    result.norms.push_back({state.step, state.t, l2_norm(err, dx), linf_norm(err), l2_norm(state.u, dx)});
    result.snapshots.push_back({state, std::move(exact)});
  };

  SimState state = model.initial_state();
  record(state);
  for (std::int64_t n = 1; n <= cfg.steps; ++n) {
    model.step(state);
    const bool on_stride = snapshot_stride > 0 && n % snapshot_stride == 0;
    if (on_stride || n == cfg.steps) record(state);
  }
  return result;
}

std::vector<double> ErrorBudget::total() const {
  std::vector<double> sum(term_phase.size());
  for (std::size_t j = 0; j < sum.size(); ++j) {
    sum[j] = term_diffusion_mismatch[j] + term_boundary[j] + term_dispersion[j] + term_phase[j];
  }
  return sum;
}

ErrorBudget error_budget(const SimConfig& cfg, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("budget step count must be non-negative");
  SpectralModel model(cfg);
  const std::size_t N = cfg.N;
  const std::size_t half = N / 2;
  const SchemeSpec spec{cfg.scheme, cfg.Nc(), cfg.Pe()};
  const double c = cfg.c;
  const double dt = cfg.dt;
  const double dk = kTwoPi / cfg.L;
  const auto nd = static_cast<double>(n);

  // GSA quantities for m = 0..N/2; negative modes follow by conjugate symmetry.
  std::vector<GsaPoint> pts(half + 1);
  std::vector<double> log_mod(half + 1);
  double prev_kdx = 0.0;
  double prev_phi = 0.0;
  for (std::size_t m = 0; m <= half; ++m) {
    const double kdx = kTwoPi * static_cast<double>(m) / static_cast<double>(N);
    pts[m] = gsa_point(spec, kdx, continue_phase(spec, prev_kdx, prev_phi, kdx));
    prev_kdx = kdx;
    prev_phi = pts[m].phi;
    log_mod[m] = log_modulus(cfg.scheme, lambda_dt(spec, kdx));
  }

  // Modes in increasing wavenumber order: m = -N/2+1 .. N/2.
  const std::size_t count = N;
  auto slot_of = [&](std::size_t ordered) {
    const auto m = static_cast<std::int64_t>(ordered) - static_cast<std::int64_t>(half) + 1;
    return static_cast<std::size_t>(m < 0 ? m + static_cast<std::int64_t>(N) : m);
  };

  // d(k) = (V_gN - c_N) / k, which is dc_N/dk; odd in k, zero at k = 0.
  auto slope_at = [&](const GsaPoint& p, double k) { return c * (p.VgN_over_c - p.cN_over_c) / k; };
  std::vector<double> slope(count);
  for (std::size_t o = 0; o < count; ++o) {
    const std::int64_t m = mode_index(slot_of(o), N);
    if (m == 0) continue;
    slope[o] = slope_at(pts[static_cast<std::size_t>(std::abs(m))], dk * static_cast<double>(m));
  }
  // Midpoint values for Simpson's rule: mid[m] sits at k = (m + 1/2) dk.
  std::vector<double> mid(half);
  for (std::size_t m = 0; m < half; ++m) {
    const double kdx = kTwoPi * (static_cast<double>(m) + 0.5) / static_cast<double>(N);
    const GsaPoint p = gsa_point(spec, kdx, continue_phase(spec, pts[m].kdx, pts[m].phi, kdx));
    mid[m] = slope_at(p, dk * (static_cast<double>(m) + 0.5));
  }
  // Suffix sums of the per-interval integrals: the k' prefix sums of the
  // inner integral, with the order of summation exchanged.
  std::vector<double> tail(count, 0.0);
  for (std::size_t o = count - 1; o-- > 0;) {
    const std::int64_t m = mode_index(slot_of(o), N);
    const double mid_value = m >= 0 ? mid[static_cast<std::size_t>(m)] : -mid[static_cast<std::size_t>(-m - 1)];
    tail[o] = tail[o + 1] + (slope[o] + 4.0 * mid_value + slope[o + 1]) * dk / 6.0;
  }
  const double cN_max = c * pts[half].cN_over_c;

  std::vector<std::complex<double>> diff(N), boundary(N), dispersion(N), phase(N);
  const auto& u0_hat = model.initial_spectrum();
  for (std::size_t o = 0; o < count; ++o) {
    const std::size_t slot = slot_of(o);
    const std::int64_t m = mode_index(slot, N);
    const auto am = static_cast<std::size_t>(std::abs(m));
    const double sign = m < 0 ? -1.0 : 1.0;
    const double k = dk * static_cast<double>(m);
    const double phi = sign * pts[am].phi;
    const std::complex<double> F = u0_hat[slot] * std::polar(std::exp(nd * log_mod[am]), -nd * phi);
    const std::complex<double> ikF = std::complex<double>{0.0, k} * F;

    diff[slot] = (-log_mod[am] / dt - cfg.nu * k * k) * F;
    boundary[slot] = cN_max * ikF;
    dispersion[slot] = -tail[o] * ikF;
    phase[slot] = -c * ikF;
  }

  ErrorBudget budget;
  budget.t = nd * dt;
  auto to_field = [&](std::vector<std::complex<double>>& coef) {
    std::vector<std::complex<double>> phys(N);
    model.fft().inverse(coef, phys);
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) out[j] = phys[j].real();
    return out;
  };
  budget.term_diffusion_mismatch = to_field(diff);
  budget.term_boundary = to_field(boundary);
  budget.term_dispersion = to_field(dispersion);
  budget.term_phase = to_field(phase);
  return budget;
}

void write_snapshot_csv(std::ostream& out, std::span<const double> x, std::span<const double> u_num,
                        std::span<const double> u_exact) {
  out << "x,u_num,u_exact,error\n";
  for (std::size_t j = 0; j < x.size(); ++j) {
    out << format_double(x[j]) << ',' << format_double(u_num[j]) << ',' << format_double(u_exact[j])
        << ',' << format_double(u_exact[j] - u_num[j]) << '\n';
  }
}

void write_norms_csv(std::ostream& out, std::span<const NormRecord> norms) {
  out << "step,t,l2_error,linf_error,l2_norm\n";
  for (const NormRecord& r : norms) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.l2_error) << ','
        << format_double(r.linf_error) << ',' << format_double(r.l2_norm) << '\n';
  }
}

void write_budget_csv(std::ostream& out, std::span<const double> x, const ErrorBudget& budget) {
  out << "x,term_diff_mismatch,term_boundary,term_dispersion,term_phase\n";
  for (std::size_t j = 0; j < x.size(); ++j) {
    out << format_double(x[j]) << ',' << format_double(budget.term_diffusion_mismatch[j]) << ','
        << format_double(budget.term_boundary[j]) << ',' << format_double(budget.term_dispersion[j])
        << ',' << format_double(budget.term_phase[j]) << '\n';
  }
}

}  // namespace specgsa
