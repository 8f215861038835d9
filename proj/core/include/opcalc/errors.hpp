#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opcalc {

// Base class for every error the engine raises deliberately.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the expression parser; `position` is a character offset into the
// input, always <= input length.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position),
        message_(message) {}

  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

// Domain errors and non-finite results during expression evaluation.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, rank deficiency, divergent tail models, and similar
// structural failures in the numeric kernels.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// A claim or operation parameter falls in an excluded set (e.g. alpha in
// {-1, -2, ...}) or a derived exponent would.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

// A transform or constructor precondition (growth certificate, sector, sign)
// is not satisfied.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace opcalc
