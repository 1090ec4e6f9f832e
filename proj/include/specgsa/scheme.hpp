#pragma once

#include <string>
#include <string_view>

namespace specgsa {

/// Explicit time integrator paired with the Fourier-spectral space operator.
///
/// `Exact` is not a Runge-Kutta scheme: it advances every mode by exp(lambda dt)
/// and serves as the reference integrator in diagnostics and tests.
enum class Scheme { RK2, RK3, RK4, Exact };

/// Number of stages (and polynomial degree of the stability function).
/// Returns 0 for `Scheme::Exact`.
int stage_count(Scheme scheme);

std::string to_string(Scheme scheme);

/// Accepts "rk2", "rk3", "rk4", "exact" (case-insensitive).
/// Throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view name);

/// Scheme plus the two nondimensional step parameters.
///   Nc = c dt / dx   (CFL number)
///   Pe = nu dt / dx^2 (Peclet number); Pe = 0 is pure convection.
struct SchemeSpec {
  Scheme scheme = Scheme::RK4;
  double Nc = 0.1;
  double Pe = 0.0;

  /// Throws std::invalid_argument unless Nc > 0 and Pe >= 0 (both finite).
  void validate() const;
};

}  // namespace specgsa
