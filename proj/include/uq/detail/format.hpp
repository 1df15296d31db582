#pragma once

#include <array>
#include <charconv>
#include <string>

namespace uq::detail {

// Shortest round-trip decimal form; keeps emitted files byte-stable.
inline std::string format_double(double v) {
  std::array<char, 40> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace uq::detail
