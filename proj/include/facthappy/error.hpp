#pragma once

#include <stdexcept>
#include <string>

namespace facthappy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  /// Short machine-readable tag, printed by the CLI before the message.
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed textual input (digit strings, decimal numbers).
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

/// A digit list that violates 0 <= a_i <= i or has a zero top digit.
class InvalidRepresentation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-representation"; }
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

class IterationCapExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "iteration-cap"; }
};

/// The descent certificate for an exponent did not verify.
class CertificateFailed : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "certificate"; }
};

/// A memo table or materialization would exceed its configured size.
class SizeCapExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "size-cap"; }
};

/// An offset l does not send every attractor member to p.
class WitnessFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "witness"; }
};

/// Symbolic replay of a sequence certificate did not reach p.
class ReplayFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "replay"; }
};

}  // namespace facthappy
