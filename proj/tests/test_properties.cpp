#include <doctest.h>

#include <cmath>
#include <random>

#include "specgsa/charts.hpp"
#include "specgsa/gsa.hpp"
#include "specgsa/solver.hpp"

using namespace specgsa;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& ref) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - ref[i];
  return l2_norm(d, 1.0) / l2_norm(ref, 1.0);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> random_field(std::size_t N, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> u(N);
  for (double& v : u) v = g(rng);
  return u;
}

}  // namespace

// ---------------------------------------------------------------- gsa

TEST_CASE("lambda dt worked values") {
  CHECK(lambda_dt({Scheme::RK2, 0.1, 0.0}, 0.0) == Complex{0.0, 0.0});
  const Complex a = lambda_dt({Scheme::RK2, 0.1, 0.01}, kPi);
  CHECK(a.real() == doctest::Approx(-0.01 * kPi * kPi));
  CHECK(a.imag() == doctest::Approx(-0.1 * kPi));
  const Complex b = lambda_dt({Scheme::RK4, 0.5, 0.0}, 1.0);
  CHECK(b.real() == 0.0);
  CHECK(b.imag() == doctest::Approx(-0.5));
}

TEST_CASE("RK2 closed form at the Nyquist limit") {
  const GsaPoint p = gsa_point({Scheme::RK2, 0.1, 0.0}, kPi);
  CHECK(p.ratio == doctest::Approx(std::sqrt(1.0 + std::pow(0.1 * kPi, 4) / 4.0)).epsilon(1e-14));
  CHECK(p.ratio == doctest::Approx(1.0012168).epsilon(1e-7));
}

TEST_CASE("G = 1 at kdx = 0 for every scheme") {
  for (Scheme s : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
    CHECK(amplification_factor({s, 0.7, 0.05}, 0.0) == Complex{1.0, 0.0});
  }
}

TEST_CASE("RK4 is exactly neutral at z = 2 sqrt 2") {
  const Complex G = stability_function(Scheme::RK4, Complex{0.0, -2.0 * std::sqrt(2.0)});
  CHECK(std::abs(G) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("conjugate input gives the conjugate factor") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Complex z{-std::abs(u(rng)), u(rng)};
    for (Scheme s : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
      const Complex a = stability_function(s, std::conj(z));
      const Complex b = std::conj(stability_function(s, z));
      CHECK(std::abs(a - b) <= 1e-15 * std::abs(b));
    }
  }
}

TEST_CASE("ratio equals Gmod / Gphys and is bounded below") {
  for (double Pe : {0.0, 0.01, 0.1}) {
    for (double kdx : {0.3, 1.7, kPi}) {
      const GsaPoint p = gsa_point({Scheme::RK3, 0.4, Pe}, kdx);
      CHECK(p.Gphys_mod == doctest::Approx(std::exp(-Pe * kdx * kdx)));
      CHECK(p.ratio == doctest::Approx(p.Gmod / p.Gphys_mod).epsilon(1e-14));
      CHECK(p.ratio >= p.Gmod * std::exp(-Pe * kPi * kPi));
      CHECK(p.Gmod == doctest::Approx(std::hypot(p.G.real(), p.G.imag())).epsilon(1e-15));
    }
  }
}

TEST_CASE("halving the difference step barely moves the group velocity") {
  for (Scheme s : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
    for (double Pe : {0.0, 0.01}) {
      for (double kdx = 0.1; kdx < 3.1; kdx += 0.25) {
        const SchemeSpec spec{s, 0.1, Pe};
        const double a = gsa_point(spec, kdx, std::nullopt, kPhaseDiffStep).VgN_over_c;
        const double b = gsa_point(spec, kdx, std::nullopt, kPhaseDiffStep / 2).VgN_over_c;
        CHECK(std::abs(a - b) < 1e-6);
      }
    }
  }
}

TEST_CASE("RK3 and RK4 imaginary-axis stability intervals") {
  auto stable = [](Scheme s, double z) { return log_modulus(s, Complex{0.0, -z}) <= 1e-15; };
  CHECK(stable(Scheme::RK3, std::sqrt(3.0) - 1e-4));
  CHECK_FALSE(stable(Scheme::RK3, std::sqrt(3.0) + 1e-4));
  CHECK(stable(Scheme::RK4, 2.0 * std::sqrt(2.0) - 1e-4));
  CHECK_FALSE(stable(Scheme::RK4, 2.0 * std::sqrt(2.0) + 1e-4));
}

// ---------------------------------------------------------------- charts

TEST_CASE("RK2 Pe = 0 single-row sweep matches the closed form") {
  const ChartGrid g = sweep(Scheme::RK2, 0.0, {0.1}, {0.0, kPi / 2, kPi});
  CHECK(g.at(0, 0).ratio == 1.0);
  CHECK(g.at(0, 1).ratio == doctest::Approx(std::sqrt(1.0 + std::pow(0.05 * kPi, 4) / 4.0)).epsilon(1e-14));
  CHECK(g.at(0, 2).ratio == doctest::Approx(std::sqrt(1.0 + std::pow(0.1 * kPi, 4) / 4.0)).epsilon(1e-14));
}

TEST_CASE("kdx = 0 column has unit ratio") {
  for (Scheme s : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
    const ChartGrid g = sweep(s, 0.01, linspace(0.05, 1.0, 8), linspace(0.0, kPi, 5));
    for (std::size_t i = 0; i < g.rows(); ++i) CHECK(g.at(i, 0).ratio == 1.0);
  }
}

TEST_CASE("RK2 at Pe = 0.01 has a contiguous stable band of Nc") {
  const ChartGrid g = sweep(Scheme::RK2, 0.01, linspace(0.05, 1.0, 96), linspace(0.0, kPi, 200));
  std::vector<bool> ok(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, g.at(i, j).ratio);
    ok[i] = worst <= 1.0;
  }
  std::size_t first = g.rows();
  std::size_t last = 0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]) {
      first = std::min(first, i);
      last = i;
    }
  }
  REQUIRE(first < g.rows());
  for (std::size_t i = first; i <= last; ++i) CHECK(ok[i]);
  CHECK(last < g.rows() - 1);
}

TEST_CASE("RK3 Pe = 0 neutral curve follows Nc kdx = sqrt 3") {
  const ChartGrid g = sweep(Scheme::RK3, 0.0, linspace(0.6, 1.2, 61), linspace(1.4, kPi, 161));
  const auto lines = neutral_boundary(g, 1.0, ChartField::Gmod);
  REQUIRE_FALSE(lines.empty());
  for (const auto& l : lines) {
    for (const auto& p : l) CHECK(p.Nc * p.kdx == doctest::Approx(std::sqrt(3.0)).epsilon(2e-3));
  }
}

TEST_CASE("refining the grid moves the contour by less than a coarse cell") {
  auto max_offset = [](std::size_t n) {
    const ChartGrid g = sweep(Scheme::RK4, 0.0, linspace(0.9, 1.5, n), linspace(1.5, kPi, n));
    double worst = 0.0;
    for (const auto& l : neutral_boundary(g, 1.0, ChartField::Gmod)) {
      for (const auto& p : l) worst = std::max(worst, std::abs(p.kdx - 2.0 * std::sqrt(2.0) / p.Nc));
    }
    return worst;
  };
  const double coarse_diag = std::hypot(0.6 / 20.0, (kPi - 1.5) / 20.0);
  CHECK(max_offset(21) < coarse_diag);
  CHECK(max_offset(41) < coarse_diag);
}

TEST_CASE("sweep is bit-identical across repeated runs") {
  const auto nc = linspace(0.1, 1.0, 9);
  const auto kdx = linspace(0.0, kPi, 33);
  const ChartGrid a = sweep(Scheme::RK3, 0.01, nc, kdx, 3);
  const ChartGrid b = sweep(Scheme::RK3, 0.01, nc, kdx, 2);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i].G == b.values[i].G);
    CHECK(a.values[i].VgN_over_c == b.values[i].VgN_over_c);
  }
}

// ---------------------------------------------------------------- solver

TEST_CASE("constant field has zero derivative") {
  for (double v : spectral_derivative(std::vector<double>(32, 3.5), 2.0, 1)) CHECK(std::abs(v) <= 1e-13);
  for (double v : spectral_derivative(std::vector<double>(32, 3.5), 2.0, 2)) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("second derivative equals the first applied twice") {
  const std::size_t N = 128;
  const double L = 5.0;
  auto u = random_field(N, 21);
  // Remove the Nyquist component, where the two operators differ by design.
  double nyq = 0.0;
  for (std::size_t j = 0; j < N; ++j) nyq += (j % 2 == 0 ? 1.0 : -1.0) * u[j];
  for (std::size_t j = 0; j < N; ++j) u[j] -= (j % 2 == 0 ? 1.0 : -1.0) * nyq / N;
  const auto twice = spectral_derivative(spectral_derivative(u, L, 1), L, 1);
  const auto direct = spectral_derivative(u, L, 2);
  const double kmax = (N / 2.0) * 2.0 * kPi / L;
  CHECK(max_diff(twice, direct) <= 1e-10 * linf_norm(u) * kmax * kmax);
}

TEST_CASE("zero field stays zero") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK3, 64, 10.0, 0.5, 0.3, 0.01, 1);
  SpectralModel m(c, std::vector<double>(64, 0.0));
  SimState s = m.initial_state();
  m.step(s);
  for (double v : s.u) CHECK(v == 0.0);
}

TEST_CASE("single mode: one step and 1000 steps follow G") {
  const std::size_t N = 64;
  for (Scheme sch : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
    const SimConfig c = SimConfig::from_numbers(sch, N, 10.0, 0.5, 0.3, 0.01, 1000);
    const int m = 7;
    const double kdx = 2.0 * kPi * m / N;
    std::vector<double> u0(N);
    const auto x = grid_points(c);
    const double k = 2.0 * kPi * m / c.L;
    for (std::size_t j = 0; j < N; ++j) u0[j] = std::cos(k * x[j]);
    const Complex G = amplification_factor({sch, c.Nc(), c.Pe()}, kdx);

    auto expected = [&](int n) {
      // cos(kx) = Re e^{ikx}; the mode evolves as G^n e^{ikx}.
      const Complex Gn = std::pow(G, n);
      std::vector<double> e(N);
      for (std::size_t j = 0; j < N; ++j) e[j] = (Gn * std::polar(1.0, k * x[j])).real();
      return e;
    };
    SpectralModel model(c, u0);
    SimState s = model.initial_state();
    model.step(s);
    CHECK(rel_l2(s.u, expected(1)) <= 1e-12);
    for (int n = 1; n < 1000; ++n) model.step(s);
    CHECK(rel_l2(s.u, expected(1000)) <= 1e-10);
  }
}

TEST_CASE("prediction at n = 0 is the initial condition") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK4, 256, 10.0, 0.5, 0.1, 0.01, 0);
  CHECK(max_diff(gsa_predicted_solution(c, 0), initial_condition(c)) <= 1e-15);
}

TEST_CASE("101 composed steps match the prediction at Nc = 0.5") {
  for (Scheme s : {Scheme::RK2, Scheme::RK3, Scheme::RK4}) {
    const SimConfig c = SimConfig::from_numbers(s, 512, 10.0, 0.5, 0.5, 0.01, 101);
    SpectralModel m(c);
    SimState st = m.initial_state();
    for (int i = 0; i < 101; ++i) m.step(st);
    const double err = rel_l2(st.u, m.predicted(101));
    double gmax = 0.0;
    for (const auto& g : m.mode_amplification(s)) gmax = std::max(gmax, std::abs(g));
    if (gmax <= 1.0 + 1e-12) {
      CHECK(err <= 1e-10);
    } else {
      // RK2 is unstable here: roundoff grows like max|G|^n.
      CHECK(err <= 1e-14 * std::pow(gmax, 101));
    }
  }
}

TEST_CASE("diagonalization holds up to 10^4 steps") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK4, 64, 10.0, 0.5, 0.5, 0.01, 10000);
  SpectralModel m(c, random_field(64, 4));
  SimState st = m.initial_state();
  for (int i = 0; i < 10000; ++i) m.step(st);
  CHECK(rel_l2(st.u, m.predicted(10000)) <= 1e-10);
}

TEST_CASE("RK2 Nyquist-adjacent growth over the fig1 run") {
  const SimConfig c = figure_preset("fig1", Scheme::RK2);
  const double growth = 30000.0 * log_modulus(Scheme::RK2, lambda_dt({Scheme::RK2, c.Nc(), 0.0}, kPi));
  CHECK(growth == doctest::Approx(36.5).epsilon(0.005));
  SpectralModel m(c);
  const auto G = m.mode_amplification(Scheme::RK2);
  CHECK(30000.0 * std::log(std::abs(G[c.N / 2 - 1])) == doctest::Approx(growth).epsilon(3e-3));
}

TEST_CASE("diffusion drives the exact field to its mean") {
  SimConfig c = SimConfig::from_numbers(Scheme::RK4, 64, 10.0, 0.5, 0.3, 0.01, 0);
  c.nu = 1.0;
  const auto u0 = initial_condition(c);
  double mean = 0.0;
  for (double v : u0) mean += v / 64.0;
  for (double v : exact_solution(c, 1e3)) CHECK(v == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("fig1 exact solution is the translated packet") {
  const SimConfig c = figure_preset("fig1", Scheme::RK4);
  const double t = 30000 * c.dt;
  const auto u = exact_solution(c, t);
  const auto x = grid_points(c);
  const double shift = std::fmod(c.c * t, c.L);
  for (std::size_t j = 0; j < c.N; j += 97) {
    const double xs = std::fmod(x[j] - shift + c.L, c.L);
    const double r = xs - c.ic.x0;
    CHECK(u[j] == doctest::Approx(std::exp(-c.ic.a * r * r) * std::sin(c.k0() * xs)).epsilon(1e-9));
  }
}

TEST_CASE("translation by whole cells is a circular shift") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK4, 256, 10.0, 0.5, 0.25, 0.0, 0);
  const int cells = 12;
  const double t = cells * c.dx() / c.c;
  const auto u0 = initial_condition(c);
  const auto u = exact_solution(c, t);
  std::vector<double> shifted(c.N);
  for (std::size_t j = 0; j < c.N; ++j) shifted[(j + cells) % c.N] = u0[j];
  CHECK(max_diff(u, shifted) <= 1e-13);
}

TEST_CASE("imaginary residue stays below 1e-12 of the field at every step") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK3, 256, 10.0, 0.5, 0.4, 0.01, 50);
  SpectralModel m(c, random_field(256, 8));
  SimState st = m.initial_state();
  for (int i = 0; i < 50; ++i) {
    m.step(st);
    CHECK(st.max_imag <= 1e-12 * linf_norm(st.u));
  }
}

TEST_CASE("exact-factor prediction conserves the L2 norm at Pe = 0") {
  const SimConfig c = SimConfig::from_numbers(Scheme::Exact, 256, 10.0, 0.5, 0.7, 0.0, 0);
  SpectralModel m(c, random_field(256, 12));
  const double n0 = l2_norm(m.predicted(0, Scheme::Exact), c.dx());
  for (std::int64_t n : {1, 10, 1000, 100000}) {
    CHECK(l2_norm(m.predicted(n, Scheme::Exact), c.dx()) == doctest::Approx(n0).epsilon(1e-12));
  }
}

TEST_CASE("L2 norm is non-increasing when every mode has ratio <= 1") {
  const SimConfig c = SimConfig::from_numbers(Scheme::RK2, 256, 10.0, 0.5, 0.1, 0.01, 0);
  SpectralModel m(c, random_field(256, 14));
  SimState st = m.initial_state();
  double prev = l2_norm(st.u, c.dx());
  for (int i = 0; i < 100; ++i) {
    m.step(st);
    const double now = l2_norm(st.u, c.dx());
    CHECK(now <= prev * (1.0 + 1e-14));
    prev = now;
  }
}

TEST_CASE("fig3 RK2 budget is dominated by the growth and mismatch term") {
  const SimConfig c = figure_preset("fig3", Scheme::RK2);
  const ErrorBudget b = error_budget(c, 101);
  CHECK(l2_norm(b.term_diffusion_mismatch, c.dx()) > l2_norm(b.term_dispersion, c.dx()));
}

TEST_CASE("presets echo the benchmark Nc and Pe exactly") {
  CHECK(figure_preset("fig1", Scheme::RK2).Nc() == 0.1);
  CHECK(figure_preset("fig1", Scheme::RK2).Pe() == 0.0);
  CHECK(figure_preset("fig2", Scheme::RK2).Nc() == 0.1);
  CHECK(figure_preset("fig2", Scheme::RK2).Pe() == 0.01);
  CHECK(figure_preset("fig3", Scheme::RK2).Nc() == 0.5);
  CHECK(figure_preset("fig3", Scheme::RK2).Pe() == 0.01);
}
