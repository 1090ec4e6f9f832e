#include "specgsa/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace specgsa {

int stage_count(Scheme scheme) {
  switch (scheme) {
    case Scheme::RK2: return 2;
    case Scheme::RK3: return 3;
    case Scheme::RK4: return 4;
    case Scheme::Exact: return 0;
  }
  return 0;
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::RK2: return "rk2";
    case Scheme::RK3: return "rk3";
    case Scheme::RK4: return "rk4";
    case Scheme::Exact: return "exact";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "rk2") return Scheme::RK2;
  if (lower == "rk3") return Scheme::RK3;
  if (lower == "rk4") return Scheme::RK4;
  if (lower == "exact") return Scheme::Exact;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected rk2, rk3, rk4 or exact)");
}

void SchemeSpec::validate() const {
  if (!std::isfinite(Nc) || Nc <= 0.0) {
    throw std::invalid_argument("Nc must be a finite positive number");
  }
  if (!std::isfinite(Pe) || Pe < 0.0) {
    throw std::invalid_argument("Pe must be finite and non-negative");
  }
}

}  // namespace specgsa
