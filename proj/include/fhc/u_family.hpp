#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhc/shift.hpp"
#include "fhc/space.hpp"

namespace fhc {

class FhcConstruction;

enum class FamilyKind { Zero, UnilateralShift, BilateralShift, PolynomialShift, FhcCriterion };

std::string to_string(FamilyKind k);

/// A backward-orbit family (u_n) with T u_n = u_{n-1}, together with the
/// operator T it belongs to.
class UFamily {
 public:
  static UFamily zero(bool bilateral = false);
  /// u_n = e_n / beta_n (and u_n = 0 for n < 0 when w is unilateral).
  static UFamily shift(WeightSequence w);
  /// Columns of the polynomial basis, available for n = 0..N.
  static UFamily polynomial(WeightSequence w, PolynomialSpec P, long N);
  static UFamily fhc(std::shared_ptr<const FhcConstruction> c);

  FamilyKind kind() const { return kind_; }
  std::string name() const;

  /// u_n = s_n e_n for every n.
  bool diagonal() const { return kind_ == FamilyKind::Zero || kind_ == FamilyKind::UnilateralShift || kind_ == FamilyKind::BilateralShift; }
  /// u_n can be nonzero for some n < 0.
  bool bilateral_index() const { return kind_ == FamilyKind::BilateralShift || kind_ == FamilyKind::FhcCriterion; }
  /// Largest n for which u_n is available; unbounded kinds report LONG_MAX.
  long max_index() const;

  /// s_n for n in [lo, hi] (diagonal kinds only).
  std::vector<Scalar> scales(long lo, long hi) const;
  /// log |s_n| (diagonal kinds only); -inf for a zero vector.
  double log_scale(long n) const;

  TruncatedVector u(long n) const;
  TruncatedVector apply_operator(const TruncatedVector& v) const;

  const WeightSequence& weights() const;
  const PolynomialBasis& basis() const;
  const FhcConstruction& construction() const;

  // certificate bookkeeping
  std::string certificate;
  bool waived = false;

 private:
  explicit UFamily(FamilyKind k) : kind_(k) {}
  FamilyKind kind_;
  bool zero_bilateral_ = false;
  std::optional<WeightSequence> w_;
  std::optional<PolynomialSpec> P_;
  std::shared_ptr<const PolynomialBasis> basis_;
  std::shared_ptr<const FhcConstruction> fhc_;
};

/// Attach the Plain series certificate for shift kinds; throws
/// CertificateError when it does not pass and the waiver flag is absent.
UFamily certified(UFamily family, const SpaceSpec& space, bool waive, long horizon = 512);

}  // namespace fhc
