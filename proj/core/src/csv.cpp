#include "kicktop/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace kicktop::csv {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // fold -0 into 0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 12);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

}  // namespace kicktop::csv
