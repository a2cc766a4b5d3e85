#pragma once

#include <stdexcept>
#include <string>

namespace microdl {

/// Failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorKind {
  kConfig = 2,
  kData = 3,
  kNumeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

// Shapes of arguments disagree.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kData, "dimension error: " + what) {}
};

// A scalar parameter is outside its domain (sigma <= 0, eps <= 0, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::kConfig, "parameter error: " + what) {}
};

// Operation requested on the wrong visible-unit kind.
class KindError : public Error {
 public:
  explicit KindError(const std::string& what)
      : Error(ErrorKind::kConfig, "kind error: " + what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, "numeric error: " + what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorKind::kData, "data error: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, "config error: " + what) {}
};

}  // namespace microdl
