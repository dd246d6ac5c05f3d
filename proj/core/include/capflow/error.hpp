#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace capflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point or level outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (exponent, tolerance, spacing...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable numerical result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Failed level-set extraction or degenerate mesh.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Iteration that did not reach its tolerance; keeps the residual log.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Malformed configuration text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Well-formed configuration with missing or inconsistent content.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace capflow
