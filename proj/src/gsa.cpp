#include "specgsa/gsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specgsa {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Largest kdx increment used when unwrapping from kdx = 0 without a reference.
constexpr double kUnwrapWalkStep = 5e-3;

double raw_phase(Complex G) { return std::atan2(-G.imag(), G.real()); }

double phase_at(const SchemeSpec& spec, double kdx, double reference) {
  return unwrap_phase(raw_phase(amplification_factor(spec, kdx)), reference);
}

}  // namespace

Complex lambda_dt(const SchemeSpec& spec, double kdx) {
  return {-spec.Pe * kdx * kdx, -spec.Nc * kdx};
}

Complex stability_increment(Scheme scheme, Complex z) {
  if (scheme == Scheme::Exact) {
    // expm1 for complex argument: e^a (cos b + i sin b) - 1.
    const double a = z.real();
    const double b = z.imag();
    const double half_sin = std::sin(0.5 * b);
    const double re = std::expm1(a) * std::cos(b) - 2.0 * half_sin * half_sin;
    const double im = std::exp(a) * std::sin(b);
    return {re, im};
  }
  // Horner form of sum_{j=1..s} z^j / j!.
  const int stages = stage_count(scheme);
  Complex acc{1.0, 0.0};
  for (int j = stages; j >= 2; --j) {
    acc = 1.0 + z / static_cast<double>(j) * acc;
  }
  return z * acc;
}

Complex stability_function(Scheme scheme, Complex z) {
  return 1.0 + stability_increment(scheme, z);
}

double log_modulus(Scheme scheme, Complex z) {
  if (scheme == Scheme::Exact) return z.real();
  const Complex w = stability_increment(scheme, z);
  // |1 + w|^2 - 1 = 2 Re(w) + |w|^2
  return 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
}

Complex amplification_factor(const SchemeSpec& spec, double kdx) {
  return stability_function(spec.scheme, lambda_dt(spec, kdx));
}

double unwrap_phase(double raw, double reference) {
  return raw + kTwoPi * std::round((reference - raw) / kTwoPi);
}

double continue_phase(const SchemeSpec& spec, double from_kdx, double from_phi, double to_kdx) {
  const double span = to_kdx - from_kdx;
  if (span == 0.0) return from_phi;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kUnwrapWalkStep)));
  double phi = from_phi;
  for (int i = 1; i <= steps; ++i) {
    const double k = from_kdx + span * static_cast<double>(i) / static_cast<double>(steps);
    phi = phase_at(spec, k, phi);
  }
  return phi;
}

double continuous_phase(const SchemeSpec& spec, double kdx) {
  return kdx == 0.0 ? 0.0 : continue_phase(spec, 0.0, 0.0, kdx);
}

GsaPoint gsa_point(const SchemeSpec& spec, double kdx, std::optional<double> phi_reference,
                   double dphi_step) {
  spec.validate();
  if (!std::isfinite(kdx) || kdx < 0.0 || kdx > kPi) {
    throw std::invalid_argument("kdx must lie in [0, pi]");
  }
  if (!(dphi_step > 0.0) || dphi_step > 0.25 * kPi) {
    throw std::invalid_argument("phase difference step must lie in (0, pi/4]");
  }

  GsaPoint p;
  p.kdx = kdx;
  const Complex z = lambda_dt(spec, kdx);
  p.G = stability_function(spec.scheme, z);
  p.Gmod = std::abs(p.G);
  p.Gphys_mod = std::exp(-spec.Pe * kdx * kdx);
  p.ratio = p.Gmod / p.Gphys_mod;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (p.Gmod == 0.0) {
    p.degenerate = true;
    p.phi = p.cN_over_c = p.VgN_over_c = nan;
    if (spec.Pe > 0.0) p.nuN_over_nu = std::numeric_limits<double>::infinity();
    return p;
  }

  const double reference = phi_reference ? *phi_reference : continuous_phase(spec, kdx);
  p.phi = kdx == 0.0 ? 0.0 : unwrap_phase(raw_phase(p.G), reference);

  p.cN_over_c = kdx == 0.0 ? 1.0 : p.phi / (spec.Nc * kdx);

  const double h = dphi_step;
  double dphi = 0.0;
  if (kdx - h >= 0.0 && kdx + h <= kPi) {
    const double fwd = phase_at(spec, kdx + h, p.phi);
    const double bwd = phase_at(spec, kdx - h, p.phi);
    dphi = (fwd - bwd) / (2.0 * h);
  } else if (kdx - h < 0.0) {
    const double f1 = phase_at(spec, kdx + h, p.phi);
    const double f2 = phase_at(spec, kdx + 2.0 * h, f1);
    dphi = (-3.0 * p.phi + 4.0 * f1 - f2) / (2.0 * h);
  } else {
    const double b1 = phase_at(spec, kdx - h, p.phi);
    const double b2 = phase_at(spec, kdx - 2.0 * h, b1);
    dphi = (3.0 * p.phi - 4.0 * b1 + b2) / (2.0 * h);
  }
  p.VgN_over_c = dphi / spec.Nc;

  if (spec.Pe > 0.0) {
    p.nuN_over_nu =
        kdx == 0.0 ? 1.0 : -log_modulus(spec.scheme, z) / (spec.Pe * kdx * kdx);
  }
  return p;
}

}  // namespace specgsa
