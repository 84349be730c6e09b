#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fhc {

using Scalar = std::complex<double>;

enum class Field { Real, Complex };

std::string to_string(Field f);

// ---------------------------------------------------------------------------
// Space families
// ---------------------------------------------------------------------------

struct LpFamily {
  double p = 2.0;
};

struct C0Family {};

/// H(C) with seminorms q_r(f) = sum |c_n| r^n over an ascending radii grid.
struct EntireFamily {
  std::vector<double> radii;
};

/// H(D(0,R)); every grid radius lies strictly inside the disk.
struct DiskFamily {
  double R = 1.0;
  std::vector<double> radii;
};

using SpaceFamily = std::variant<LpFamily, C0Family, EntireFamily, DiskFamily>;

class SpaceSpec {
 public:
  static SpaceSpec lp(double p, Field field = Field::Real);
  static SpaceSpec c0(Field field = Field::Real);
  static SpaceSpec entire(Field field = Field::Real);
  static SpaceSpec entire(std::vector<double> radii, Field field = Field::Real);
  static SpaceSpec disk(double R, Field field = Field::Real);
  static SpaceSpec disk(double R, std::vector<double> radii, Field field = Field::Real);

  const SpaceFamily& family() const { return family_; }
  Field field() const { return field_; }

  bool is_lp() const { return std::holds_alternative<LpFamily>(family_); }
  bool is_c0() const { return std::holds_alternative<C0Family>(family_); }
  bool is_holomorphic() const {
    return std::holds_alternative<EntireFamily>(family_) || std::holds_alternative<DiskFamily>(family_);
  }
  /// Bilateral (negative) indices are meaningful only for l^p and c0.
  bool allows_bilateral() const { return is_lp() || is_c0(); }

  double p() const;                          // l^p exponent; throws otherwise
  const std::vector<double>& radii() const;  // holomorphic grid; throws otherwise
  double disk_radius() const;                // R; throws unless DiskFamily

  std::string name() const;

 private:
  SpaceSpec(SpaceFamily family, Field field);
  SpaceFamily family_;
  Field field_;
};

std::vector<double> default_entire_radii();
std::vector<double> default_disk_radii(double R);

// ---------------------------------------------------------------------------
// Truncated vectors against the canonical basis e_n
// ---------------------------------------------------------------------------

/// Coefficients on the integer window [lo, hi]; entry j belongs to e_{lo+j}.
class TruncatedVector {
 public:
  TruncatedVector();  // the zero vector on [0, 0]
  TruncatedVector(long lo, std::vector<Scalar> coeffs);

  static TruncatedVector zeros(long lo, long hi);
  static TruncatedVector unit(long n, Scalar value = 1.0);
  static TruncatedVector real(long lo, std::span<const double> values);

  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(coeffs_.size()) - 1; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient of e_n; zero outside the window.
  Scalar at(long n) const;
  Scalar& ref(long n);  // n must lie in the window
  std::span<const Scalar> coeffs() const { return coeffs_; }
  std::span<Scalar> coeffs() { return coeffs_; }

  bool all_finite() const;
  bool is_zero() const;

  /// Copy re-windowed to [lo, hi]; entries outside the old window are zero,
  /// entries outside the new one are dropped.
  TruncatedVector rewindow(long lo, long hi) const;
  /// Drop leading and trailing exact zeros (keeps at least one entry).
  TruncatedVector trimmed() const;

  TruncatedVector& operator+=(const TruncatedVector& other);
  TruncatedVector& operator-=(const TruncatedVector& other);
  TruncatedVector& operator*=(Scalar alpha);

  friend TruncatedVector operator+(TruncatedVector a, const TruncatedVector& b) { return a += b; }
  friend TruncatedVector operator-(TruncatedVector a, const TruncatedVector& b) { return a -= b; }
  friend TruncatedVector operator*(Scalar alpha, TruncatedVector v) { return v *= alpha; }

  /// Exact coefficientwise equality on the union window.
  bool equals(const TruncatedVector& other) const;

 private:
  long lo_;
  std::vector<Scalar> coeffs_;
};

/// Max relative coefficient difference on the union window, scaled by the
/// larger sup-norm of the two vectors (0 when both are zero).
double relative_difference(const TruncatedVector& a, const TruncatedVector& b);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double fnorm(const SpaceSpec& space, const TruncatedVector& v);
double seminorm_majorant(const SpaceSpec& space, const TruncatedVector& v, double r);
double distance(const SpaceSpec& space, const TruncatedVector& u, const TruncatedVector& v);
double tail_norm(const SpaceSpec& space, const TruncatedVector& v, long cutoff);

/// Sum_n |c_n| r^n over the window; used by the holomorphic F-norm.
double coefficient_majorant(std::span<const Scalar> coeffs, long lo, double r);

/// Combine seminorm values q_k into sum_k 2^{-k-1} q_k / (1 + q_k).
double combine_seminorms(std::span<const double> q);

/// Throws InvalidArgument when v is not a legal element of the space.
void validate_vector(const SpaceSpec& space, const TruncatedVector& v);

}  // namespace fhc
