#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pompeiu {

// An iterative procedure ran out of iterations before reaching its tolerance.
// Carries the last bracket so callers can report how far the search got.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double bracket_lo, double bracket_hi, int iterations)
      : std::runtime_error(what), lo_(bracket_lo), hi_(bracket_hi), iterations_(iterations) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }
  int iterations() const noexcept { return iterations_; }

private:
  double lo_;
  double hi_;
  int iterations_;
};

// Degenerate or mutually inconsistent grid/boundary data.
class MeshError : public std::runtime_error {
public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; line is 1-based.
class FileFormatError : public std::runtime_error {
public:
  FileFormatError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace pompeiu
