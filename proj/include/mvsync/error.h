#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvsync {

/// Base exception for all library failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

#define MVSYNC_CHECK(cond, msg)          \
  do {                                   \
    if (!(cond)) throw ::mvsync::Error(msg); \
  } while (0)

}  // namespace mvsync
