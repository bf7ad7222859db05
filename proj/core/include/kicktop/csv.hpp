#pragma once

#include <string>

namespace kicktop::csv {

// Shortest form with at most 12 significant digits, '.' separator,
// independent of the global locale.
std::string format_number(double value);

}  // namespace kicktop::csv
