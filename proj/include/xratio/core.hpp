#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xratio {

inline constexpr std::string_view kVersion = "0.1.0";

// malformed or out-of-contract input text
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// a computation exceeded its wall-clock budget
struct Timeout : std::runtime_error {
  explicit Timeout(const std::string& what) : std::runtime_error(what) {}
};

// a file could not be read or written
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xratio
