#pragma once

#include <stdexcept>
#include <string>

namespace msv {

/// Coarse classification used by the CLI to map failures onto exit codes.
enum class ErrorKind { usage, data, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Inputs outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// A VIX-constraint inversion produced a negative variance.
class InfeasibleStateError : public Error {
 public:
  InfeasibleStateError(const std::string& what, double solved)
      : Error(ErrorKind::numerical, what), solved_(solved) {}
  [[nodiscard]] double solved_value() const noexcept { return solved_; }

 private:
  double solved_;
};

/// Adaptive quadrature ran out of nodes before meeting its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(ErrorKind::numerical, what), achieved_(achieved_error) {}
  [[nodiscard]] double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ContourError : public Error {
 public:
  explicit ContourError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// g(k) e^{tau d(k)} hit the pole of the correction factors.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class SeriesError : public Error {
 public:
  explicit SeriesError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class NoRootError : public Error {
 public:
  explicit NoRootError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

}  // namespace msv
