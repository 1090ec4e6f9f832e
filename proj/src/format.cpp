#include "specgsa/format.hpp"

#include <cstdio>

namespace specgsa {

std::string format_double(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace specgsa
