#pragma once

#include <charconv>
#include <string>

#include "error.hpp"

namespace pup {

// Shortest decimal form that parses back to the same double, so emitted
// files are byte-stable across runs and platforms.
inline std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) fail(ErrorCode::internal, "double formatting failed");
  return std::string(buffer, ptr);
}

}  // namespace pup
