#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmconv {

// Precondition and invariant violations raise std::domain_error. The two
// types below separate malformed external input from programming errors so
// the CLI can map them to distinct exit codes.

/// A text file (graph, checkpoint, config) could not be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Binary dataset or directory layout is invalid (bad magic, truncation,
/// missing labels, empty directory).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmconv
