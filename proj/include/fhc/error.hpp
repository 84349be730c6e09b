#pragma once

#include <stdexcept>
#include <string>

namespace fhc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or type invariant was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A threshold sequence stays bounded along a subsequence, so no full-support
/// law can make the tail-probability series converge.
class DivergenceRequired : public Error {
 public:
  using Error::Error;
};

/// An orbit step needs stream coefficients that the truncation has discarded.
class OrbitHorizonExceeded : public Error {
 public:
  using Error::Error;
};

/// A configuration document is malformed; the message carries the line.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A greedy search ran past its hard horizon.
class HorizonExhausted : public Error {
 public:
  using Error::Error;
};

/// A prerequisite certificate failed (or is missing) and was not waived.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Numerical self-check failed after a construction.
class ResidualCheckFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace fhc
