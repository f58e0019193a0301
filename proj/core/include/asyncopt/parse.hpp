#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "asyncopt/error.hpp"

namespace asyncopt {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("field '" + std::string(key) + "': cannot parse '" + std::string(text) +
                      "' as a number");
  }
  return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("field '" + std::string(key) + "': expected true/false, got '" +
                    std::string(text) + "'");
}

}  // namespace asyncopt
