#pragma once

#include <complex>
#include <optional>

#include "specgsa/scheme.hpp"

namespace specgsa {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Step in kdx used for the central difference of the phase when computing
/// the numerical group velocity.
inline constexpr double kPhaseDiffStep = 1e-5;

/// Per-mode Fourier-spectral operator times the step:
///   lambda dt = -i Nc kdx - Pe kdx^2.
Complex lambda_dt(const SchemeSpec& spec, double kdx);

/// Stability function of `scheme` at z = lambda dt. For the s-stage schemes
/// this is the degree-s truncation of exp(z); for Scheme::Exact it is exp(z).
Complex stability_function(Scheme scheme, Complex z);

/// G - 1, computed without the cancellation that forming G first would cause
/// for small |z|.
Complex stability_increment(Scheme scheme, Complex z);

/// ln|G(z)|, accurate for |G| close to 1.
double log_modulus(Scheme scheme, Complex z);

/// Amplification factor G(kdx) of the fully discrete scheme.
Complex amplification_factor(const SchemeSpec& spec, double kdx);

/// All diagnostics at one nondimensional wavenumber.
struct GsaPoint {
  double kdx = 0.0;
  Complex G{1.0, 0.0};
  double Gmod = 1.0;
  /// Phase shift per step, tan(phi) = -G_i / G_r, continuous in kdx with phi(0) = 0.
  double phi = 0.0;
  double cN_over_c = 1.0;
  double VgN_over_c = 1.0;
  /// Undefined (empty) when Pe = 0.
  std::optional<double> nuN_over_nu;
  /// |G_phys| = exp(-Pe kdx^2).
  double Gphys_mod = 1.0;
  /// |G| / |G_phys|.
  double ratio = 1.0;
  /// Set when G = 0 exactly: the mode is annihilated and the phase is undefined.
  bool degenerate = false;
};

/// Moves `raw` by a multiple of 2 pi to the branch closest to `reference`.
double unwrap_phase(double raw, double reference);

/// Continuous phase phi(kdx), obtained by unwrapping along increasing kdx from
/// phi(0) = 0 on a fine walk.
double continuous_phase(const SchemeSpec& spec, double kdx);

/// Continues a known phase `from_phi` at `from_kdx` to `to_kdx` with the same
/// fine walk, so that coarse sample spacing cannot skip a branch.
double continue_phase(const SchemeSpec& spec, double from_kdx, double from_phi, double to_kdx);

/// Evaluates every GsaPoint field at kdx in [0, pi].
///
/// `phi_reference` is the (unwrapped) phase at a nearby kdx, typically the
/// previous sample of a sweep; without it the phase is unwrapped by walking
/// from kdx = 0. The group velocity is a second-order difference of phi with
/// step `dphi_step`, one-sided within one step of either end of [0, pi].
///
/// Throws std::invalid_argument for an invalid spec or kdx outside [0, pi].
GsaPoint gsa_point(const SchemeSpec& spec, double kdx,
                   std::optional<double> phi_reference = std::nullopt,
                   double dphi_step = kPhaseDiffStep);

}  // namespace specgsa
