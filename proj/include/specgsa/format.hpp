#pragma once

#include <string>

namespace specgsa {

/// "%.17g" rendering (17 significant digits); round-trips every finite double.
std::string format_double(double value);

}  // namespace specgsa
