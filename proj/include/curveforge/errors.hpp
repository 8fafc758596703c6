#pragma once

#include <stdexcept>
#include <string>

namespace curveforge {

// Input outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Curve speed vanishes somewhere on the sampling grid.
class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No derivative order yields a well-defined Frenet frame at a sample.
class FrameUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration (bad field, missing gate context, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation-specific precondition that the input does not satisfy.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values appeared during a numerical procedure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curveforge
