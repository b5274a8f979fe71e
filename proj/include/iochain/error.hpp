#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace iochain {

// Error families map one-to-one onto CLI exit codes:
//   InputError -> 1, IoError -> 2, NumericalError -> 3.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

// --- input / validation ----------------------------------------------------

class DimensionMismatch : public InputError {
public:
  using InputError::InputError;
};

class ParseError : public InputError {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : InputError("parse error at line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public InputError {
public:
  using InputError::InputError;
};

class ZeroOutputPole : public ValidationError {
public:
  explicit ZeroOutputPole(std::string pole)
      : ValidationError("pole '" + pole + "' has zero total output"), pole_(std::move(pole)) {}

  const std::string& pole() const noexcept { return pole_; }

private:
  std::string pole_;
};

class NotStochastic : public InputError {
public:
  using InputError::InputError;
};

class IndexOutOfRange : public InputError {
public:
  using InputError::InputError;
};

class InvalidRates : public InputError {
public:
  using InputError::InputError;
};

class DegenerateNodes : public InputError {
public:
  using InputError::InputError;
};

class NotTransientStart : public InputError {
public:
  using InputError::InputError;
};

class NoAbsorbingState : public InputError {
public:
  using InputError::InputError;
};

class LengthMismatch : public InputError {
public:
  using InputError::InputError;
};

class ConstantSeries : public InputError {
public:
  using InputError::InputError;
};

class TooFewPoints : public InputError {
public:
  using InputError::InputError;
};

// --- numerical -------------------------------------------------------------

class SingularMatrix : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
  NoConvergence(const std::string& what, double last_estimate, double last_residual)
      : NumericalError(what), estimate_(last_estimate), residual_(last_residual) {}

  double last_estimate() const noexcept { return estimate_; }
  double last_residual() const noexcept { return residual_; }

private:
  double estimate_;
  double residual_;
};

class NonProductive : public NumericalError {
public:
  NonProductive(const std::string& what, double spectral_radius)
      : NumericalError(what), radius_(spectral_radius) {}

  double spectral_radius() const noexcept { return radius_; }

private:
  double radius_;
};

}  // namespace iochain
