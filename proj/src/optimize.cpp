#include "specgsa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "specgsa/gsa.hpp"

namespace specgsa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bracket {
  double lo;
  double hi;
  double x;
  double fx;
};

template <class F>
Bracket golden_section(F&& f, double lo, double hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Bracket{a, b, c, fc} : Bracket{a, b, d, fd};
}

}  // namespace

std::string to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::MaxAbs ? "maxabs" : "l2";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "maxabs" || name == "MaxAbs") return ObjectiveKind::MaxAbs;
  if (name == "l2" || name == "L2") return ObjectiveKind::L2;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "' (expected maxabs or l2)");
}

std::string to_string(InstabilityPolicy policy) {
  return policy == InstabilityPolicy::ExcludeUnstable ? "exclude-unstable" : "penalize";
}

InstabilityPolicy parse_instability_policy(std::string_view name) {
  if (name == "exclude-unstable") return InstabilityPolicy::ExcludeUnstable;
  if (name == "penalize") return InstabilityPolicy::Penalize;
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected exclude-unstable or penalize)");
}

void Objective::validate() const {
  if (kdx_samples < 64) throw std::invalid_argument("objective needs at least 64 kdx samples");
  if (!(instability_tolerance >= 0.0)) throw std::invalid_argument("instability tolerance must be >= 0");
}

ErrorProfile error_profile(Scheme scheme, double Nc, double Pe, std::size_t kdx_samples) {
  const SchemeSpec spec{scheme, Nc, Pe};
  spec.validate();
  if (kdx_samples == 0) throw std::invalid_argument("error profile needs at least one sample");

  ErrorProfile profile;
  profile.kdx.resize(kdx_samples);
  profile.error.resize(kdx_samples);
  double prev_kdx = 0.0;
  double prev_phi = 0.0;
  for (std::size_t i = 0; i < kdx_samples; ++i) {
    const double kdx = kPi * static_cast<double>(i + 1) / static_cast<double>(kdx_samples);
    const GsaPoint p = gsa_point(spec, kdx, continue_phase(spec, prev_kdx, prev_phi, kdx));
    if (!p.degenerate) {
      prev_kdx = kdx;
      prev_phi = p.phi;
    }
    profile.kdx[i] = kdx;
    profile.error[i] = std::abs(1.0 - p.ratio);
    profile.max_Gmod = std::max(profile.max_Gmod, p.Gmod);
  }
  return profile;
}

double objective_value(Scheme scheme, double Nc, double Pe, const Objective& objective) {
  objective.validate();
  const ErrorProfile profile = error_profile(scheme, Nc, Pe, objective.kdx_samples);
  if (objective.policy == InstabilityPolicy::ExcludeUnstable &&
      profile.max_Gmod > 1.0 + objective.instability_tolerance) {
    return kInf;
  }
  double J = 0.0;
  if (objective.kind == ObjectiveKind::MaxAbs) {
    for (double e : profile.error) J = std::max(J, e);
  } else {
    double sum = 0.0;
    for (double e : profile.error) sum += e * e;
    J = std::sqrt(sum / static_cast<double>(profile.error.size()));
  }
  if (objective.policy == InstabilityPolicy::Penalize) J += std::max(0.0, profile.max_Gmod - 1.0);
  return J;
}

SearchInterval default_search_interval() { return {}; }

OptimalResult optimal_nc(Scheme scheme, double Pe, const Objective& objective,
                         SearchInterval interval) {
  objective.validate();
  SchemeSpec{scheme, 1.0, Pe}.validate();
  if (!(interval.lo > 0.0) || !(interval.hi <= 2.0) || !(interval.lo < interval.hi)) {
    throw std::invalid_argument("search interval must satisfy 0 < lo < hi <= 2");
  }

  auto J = [&](double nc) { return objective_value(scheme, nc, Pe, objective); };

  OptimalResult result;
  result.scheme = scheme;
  result.Pe = Pe;
  result.objective = objective;
  result.interval = interval;

  const Bracket golden = golden_section(J, interval.lo, interval.hi, kGoldenTolerance);
  result.golden_Nc = golden.x;
  result.golden_J = golden.fx;

  const auto audit_count =
      static_cast<std::size_t>(std::floor((interval.hi - interval.lo) / kAuditSpacing + 1e-9)) + 1;
  for (std::size_t i = 0; i < audit_count; ++i) {
    const double nc = interval.lo + kAuditSpacing * static_cast<double>(i);
    result.audit.push_back({nc, J(nc)});
  }

  // Narrow valleys can fall between audit points, so every local minimum of
  // the audit table is refined, not only the smallest entry.
  Bracket best = golden;
  const std::size_t last = audit_count - 1;
  for (std::size_t i = 0; i < audit_count; ++i) {
    const double Ji = result.audit[i].J;
    if (!std::isfinite(Ji)) continue;
    if (i > 0 && result.audit[i - 1].J < Ji) continue;
    if (i < last && result.audit[i + 1].J < Ji) continue;
    const double lo = result.audit[i > 0 ? i - 1 : 0].Nc;
    const double hi = i < last ? result.audit[i + 1].Nc : interval.hi;
    Bracket local = golden_section(J, lo, hi, kGoldenTolerance);
    if (Ji < local.fx) local = {lo, hi, result.audit[i].Nc, Ji};
    if (local.fx < best.fx) best = local;
  }

  if (!std::isfinite(best.fx)) {
    throw NoAdmissibleNc("no admissible Nc: every Nc in [" + std::to_string(interval.lo) + ", " +
                         std::to_string(interval.hi) + "] is numerically unstable");
  }

  result.Nc_star = best.x;
  result.J_star = J(best.x);
  result.bracket_lo = best.lo;
  result.bracket_hi = best.hi;
  result.profile = error_profile(scheme, result.Nc_star, Pe, objective.kdx_samples);
  return result;
}

nlohmann::json optimal_to_json(const OptimalResult& result) {
  nlohmann::json doc;
  doc["schema"] = "gsa_opt_v1";
  doc["scheme"] = to_string(result.scheme);
  doc["Pe"] = result.Pe;
  doc["objective"] = {
      {"kind", to_string(result.objective.kind)},
      {"kdx_samples", result.objective.kdx_samples},
      {"policy", to_string(result.objective.policy)},
      {"instability_tolerance", result.objective.instability_tolerance},
  };
  doc["search_interval"] = {result.interval.lo, result.interval.hi};
  doc["Nc_star"] = result.Nc_star;
  doc["J_star"] = result.J_star;
  doc["bracket"] = {result.bracket_lo, result.bracket_hi};
  doc["golden_pass"] = {{"Nc", result.golden_Nc},
                        {"J", std::isfinite(result.golden_J) ? nlohmann::json(result.golden_J)
                                                             : nlohmann::json(nullptr)}};
  nlohmann::json audit = nlohmann::json::array();
  for (const AuditEntry& entry : result.audit) {
    // Excluded Nc are reported with J = null.
    audit.push_back({entry.Nc, std::isfinite(entry.J) ? nlohmann::json(entry.J) : nlohmann::json(nullptr)});
  }
  doc["audit_spacing"] = kAuditSpacing;
  doc["audit"] = std::move(audit);
  doc["profile"] = {{"kdx", result.profile.kdx}, {"error", result.profile.error}};
  return doc;
}

}  // namespace specgsa
