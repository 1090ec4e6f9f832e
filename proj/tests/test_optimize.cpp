#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "specgsa/gsa.hpp"
#include "specgsa/optimize.hpp"

using namespace specgsa;

TEST_CASE("exact integrator has an identically zero profile") {
  const ErrorProfile p = error_profile(Scheme::Exact, 0.3, 0.01, 256);
  REQUIRE(p.error.size() == 256);
  for (double e : p.error) CHECK(e <= 1e-13);
}

TEST_CASE("profile samples (0, pi] uniformly") {
  const ErrorProfile p = error_profile(Scheme::RK4, 0.3, 0.01, 64);
  CHECK(p.kdx.front() == doctest::Approx(kPi / 64));
  CHECK(p.kdx.back() == doctest::Approx(kPi));
}

TEST_CASE("RK2 profile at Nc = 0.2 is below its neighbours on the dominant range") {
  const auto p1 = error_profile(Scheme::RK2, 0.1, 0.01, 512);
  const auto p2 = error_profile(Scheme::RK2, 0.2, 0.01, 512);
  const auto p3 = error_profile(Scheme::RK2, 0.3, 0.01, 512);
  // Beyond the small-kdx region where all three are near zero.
  for (std::size_t i = 128; i < 512; ++i) {
    CHECK(p2.error[i] <= p1.error[i]);
    CHECK(p2.error[i] <= p3.error[i]);
  }
}

TEST_CASE("RK2 profile at Nc = 0.2 grows monotonically with kdx") {
  const auto p = error_profile(Scheme::RK2, 0.2, 0.01, 512);
  for (std::size_t i = 1; i < p.error.size(); ++i) CHECK(p.error[i] >= p.error[i - 1]);
}

TEST_CASE("objective is deterministic to the bit") {
  Objective o;
  CHECK(objective_value(Scheme::RK3, 0.123, 0.01, o) == objective_value(Scheme::RK3, 0.123, 0.01, o));
}

TEST_CASE("unstable Nc are excluded or penalised") {
  Objective exclude;
  CHECK(std::isinf(objective_value(Scheme::RK2, 0.5, 0.01, exclude)));
  Objective penalize;
  penalize.policy = InstabilityPolicy::Penalize;
  const double J = objective_value(Scheme::RK2, 0.5, 0.01, penalize);
  CHECK(std::isfinite(J));
  CHECK(J > error_profile(Scheme::RK2, 0.5, 0.01, 2048).max_Gmod - 1.0);
}

TEST_CASE("objective is finite on the admissible audit grid") {
  Objective o;
  for (double nc = 0.05; nc <= 0.3; nc += 0.01) CHECK(std::isfinite(objective_value(Scheme::RK2, nc, 0.01, o)));
}

TEST_CASE("L2 objective never exceeds MaxAbs") {
  Objective maxabs;
  Objective l2;
  l2.kind = ObjectiveKind::L2;
  for (double nc : {0.1, 0.3, 0.6}) {
    CHECK(objective_value(Scheme::RK4, nc, 0.01, l2) <= objective_value(Scheme::RK4, nc, 0.01, maxabs));
  }
}

TEST_CASE("objective validation") {
  Objective o;
  o.kdx_samples = 63;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  CHECK_THROWS_AS(objective_value(Scheme::RK4, 0.1, 0.01, o), std::invalid_argument);
  CHECK(parse_objective_kind("l2") == ObjectiveKind::L2);
  CHECK(parse_instability_policy("penalize") == InstabilityPolicy::Penalize);
  CHECK_THROWS_AS(parse_objective_kind("linf"), std::invalid_argument);
}

TEST_CASE("optimal_nc result is consistent") {
  Objective o;
  o.kdx_samples = 256;
  const OptimalResult r = optimal_nc(Scheme::RK2, 0.01, o, {0.05, 0.4});
  CHECK(r.Nc_star >= 0.05);
  CHECK(r.Nc_star <= 0.4);
  CHECK(std::abs(r.J_star - objective_value(Scheme::RK2, r.Nc_star, 0.01, o)) <= 1e-14);
  for (const AuditEntry& e : r.audit) CHECK(r.J_star <= e.J);
  CHECK(r.bracket_lo <= r.Nc_star);
  CHECK(r.Nc_star <= r.bracket_hi);
  CHECK(r.profile.error.size() == 256);
  // Audit grid spacing and extent.
  CHECK(r.audit.front().Nc == doctest::Approx(0.05));
  CHECK(r.audit.back().Nc == doctest::Approx(0.4));
  CHECK(r.audit[1].Nc - r.audit[0].Nc == doctest::Approx(kAuditSpacing));
}

TEST_CASE("RK2 optimum at Pe = 0.01 is near 0.2") {
  const OptimalResult r = optimal_nc(Scheme::RK2, 0.01, Objective{});
  CHECK(r.Nc_star == doctest::Approx(0.2).epsilon(0.1));
  // Golden pass and audit agree here.
  CHECK(std::abs(r.golden_Nc - r.Nc_star) <= 2 * kAuditSpacing);
}

TEST_CASE("a narrow valley between audit points is still found") {
  // The RK4 valley near 0.244 is narrower than the audit spacing; the
  // golden pass on [0.05, 1] lands at the lower edge instead.
  const OptimalResult r = optimal_nc(Scheme::RK4, 0.01, Objective{});
  CHECK(r.Nc_star == doctest::Approx(0.243793).epsilon(0.02));
  CHECK(r.J_star < objective_value(Scheme::RK4, 0.05, 0.01, Objective{}));
}

TEST_CASE("wholly unstable interval reports no admissible Nc") {
  CHECK_THROWS_AS(optimal_nc(Scheme::RK2, 0.0, Objective{}, {0.1, 0.5}), NoAdmissibleNc);
  Objective pen;
  pen.policy = InstabilityPolicy::Penalize;
  pen.kdx_samples = 128;
  CHECK_NOTHROW(optimal_nc(Scheme::RK2, 0.0, pen, {0.1, 0.2}));
}

TEST_CASE("bad search intervals are rejected") {
  CHECK_THROWS_AS(optimal_nc(Scheme::RK4, 0.01, Objective{}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_nc(Scheme::RK4, 0.01, Objective{}, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_nc(Scheme::RK4, 0.01, Objective{}, {0.5, 2.5}), std::invalid_argument);
}

TEST_CASE("result JSON has the documented fields") {
  Objective o;
  o.kdx_samples = 128;
  const auto j = optimal_to_json(optimal_nc(Scheme::RK3, 0.01, o, {0.05, 0.1}));
  CHECK(j.at("schema") == "gsa_opt_v1");
  CHECK(j.at("scheme") == "rk3");
  CHECK(j.at("objective").at("kind") == "maxabs");
  CHECK(j.contains("Nc_star"));
  CHECK(j.contains("J_star"));
  CHECK(j.at("audit").size() == 51);
}
