#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gkdv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grid dimensions that violate the power-of-two / positivity contract.
class SizingError : public Error {
public:
  using Error::Error;
};

/// Two fields (or a field and a projector) built on different grids.
class GridMismatch : public Error {
public:
  using Error::Error;
};

/// Expression text that does not conform to the coefficient grammar.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t column)
      : Error(message + " at column " + std::to_string(column)), column_(column) {}
  /// 1-based column of the offending character.
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t column_;
};

/// Requested derivative order outside the cached range.
class OrderError : public Error {
public:
  using Error::Error;
};

/// Coefficient evaluation produced a non-finite value on the sampled domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Dispersion coefficient that is not bounded away from zero.
class CoercivityError : public Error {
public:
  using Error::Error;
};

/// Point outside the sampled range of the straightening map.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Solution mass reaching the edge of the periodic box.
class SupportOverflow : public Error {
public:
  using Error::Error;
};

/// Weight field with negative samples where b >= 0 is required.
class NegativeWeight : public Error {
public:
  using Error::Error;
};

/// Test function that is not compactly supported inside the trajectory window.
class SupportViolation : public Error {
public:
  using Error::Error;
};

/// Invalid argument combination not covered by a more specific type.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Configuration document with one or more schema violations.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace gkdv
