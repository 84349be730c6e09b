#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace fhc {

/// A nonzero scalar stored as exp(log_mag) * sign with |sign| = 1, or zero
/// when log_mag is -inf. Products never overflow.
struct SignedLogScalar {
  double log_mag = 0.0;
  std::complex<double> sign = 1.0;

  static SignedLogScalar zero() { return {-std::numeric_limits<double>::infinity(), 1.0}; }
  static SignedLogScalar from(std::complex<double> z) {
    if (z == 0.0) return zero();
    if (z.imag() == 0.0) return {std::log(std::fabs(z.real())), z.real() < 0 ? -1.0 : 1.0};
    const double m = std::abs(z);
    return {std::log(m), z / m};
  }

  bool is_zero() const { return log_mag == -std::numeric_limits<double>::infinity(); }
  std::complex<double> value() const { return is_zero() ? std::complex<double>(0.0) : std::exp(log_mag) * sign; }
  SignedLogScalar inverse() const { return {-log_mag, 1.0 / sign}; }

  friend SignedLogScalar operator*(SignedLogScalar a, SignedLogScalar b) {
    return {a.log_mag + b.log_mag, a.sign * b.sign};
  }
  friend SignedLogScalar operator/(SignedLogScalar a, SignedLogScalar b) {
    return {a.log_mag - b.log_mag, a.sign / b.sign};
  }
};

}  // namespace fhc
