#include "fhc/u_family.hpp"

#include <climits>
#include <cmath>
#include <limits>

#include "fhc/error.hpp"
#include "fhc/fhc_construction.hpp"

namespace fhc {

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Zero: return "zero";
    case FamilyKind::UnilateralShift: return "unilateral-shift";
    case FamilyKind::BilateralShift: return "bilateral-shift";
    case FamilyKind::PolynomialShift: return "polynomial-shift";
    default: return "fhc-criterion";
  }
}

UFamily UFamily::zero(bool bilateral) {
  UFamily f(FamilyKind::Zero);
  f.zero_bilateral_ = bilateral;
  return f;
}

UFamily UFamily::shift(WeightSequence w) {
  UFamily f(w.bilateral() ? FamilyKind::BilateralShift : FamilyKind::UnilateralShift);
  f.w_ = std::move(w);
  return f;
}

UFamily UFamily::polynomial(WeightSequence w, PolynomialSpec P, long N) {
  UFamily f(FamilyKind::PolynomialShift);
  f.basis_ = std::make_shared<const PolynomialBasis>(polynomial_basis(w, P, N));
  f.w_ = std::move(w);
  f.P_ = std::move(P);
  return f;
}

UFamily UFamily::fhc(std::shared_ptr<const FhcConstruction> c) {
  if (!c) throw InvalidArgument("null construction");
  UFamily f(FamilyKind::FhcCriterion);
  f.w_ = c->weights();
  f.fhc_ = std::move(c);
  return f;
}

std::string UFamily::name() const {
  std::string s = to_string(kind_);
  if (w_) s += " [" + w_->name() + "]";
  if (P_) s += " " + P_->name();
  return s;
}

long UFamily::max_index() const {
  if (kind_ == FamilyKind::PolynomialShift) return static_cast<long>(basis_->columns.size()) - 1;
  return LONG_MAX;
}

const WeightSequence& UFamily::weights() const {
  if (!w_) throw InvalidArgument("family has no weight sequence");
  return *w_;
}

const PolynomialBasis& UFamily::basis() const {
  if (!basis_) throw InvalidArgument("family has no polynomial basis");
  return *basis_;
}

const FhcConstruction& UFamily::construction() const {
  if (!fhc_) throw InvalidArgument("family has no criterion construction");
  return *fhc_;
}

std::vector<Scalar> UFamily::scales(long lo, long hi) const {
  if (!diagonal()) throw InvalidArgument("scales need a diagonal family");
  if (hi < lo) throw InvalidArgument("scales need hi >= lo");
  if (kind_ == FamilyKind::Zero) return std::vector<Scalar>(static_cast<std::size_t>(hi - lo + 1), 0.0);
  if (kind_ == FamilyKind::UnilateralShift && lo < 0) {
    std::vector<Scalar> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
    if (hi >= 0) {
      const auto pos = w_->inverse_betas(0, hi);
      std::copy(pos.begin(), pos.end(), out.begin() + (-lo));
    }
    return out;
  }
  return w_->inverse_betas(lo, hi);
}

double UFamily::log_scale(long n) const {
  if (!diagonal()) throw InvalidArgument("log_scale needs a diagonal family");
  if (kind_ == FamilyKind::Zero || (kind_ == FamilyKind::UnilateralShift && n < 0))
    return -std::numeric_limits<double>::infinity();
  return -w_->log_beta(n).log_mag;
}

TruncatedVector UFamily::u(long n) const {
  switch (kind_) {
    case FamilyKind::Zero: return TruncatedVector::zeros(std::max(0L, n), std::max(0L, n));
    case FamilyKind::UnilateralShift:
      if (n < 0) return TruncatedVector::zeros(0, 0);
      [[fallthrough]];
    case FamilyKind::BilateralShift: return TruncatedVector::unit(n, scales(n, n)[0]);
    case FamilyKind::PolynomialShift:
      if (n < 0) return TruncatedVector::zeros(0, 0);
      if (n > max_index()) throw InvalidArgument("polynomial basis was built only up to n = " + std::to_string(max_index()));
      return basis_->columns[static_cast<std::size_t>(n)];
    default: return fhc_->u(n);
  }
}

TruncatedVector UFamily::apply_operator(const TruncatedVector& v) const {
  switch (kind_) {
    case FamilyKind::Zero: return v;  // any operator fixes the zero family; identity keeps windows
    case FamilyKind::PolynomialShift: return apply_poly_shift(*w_, *P_, v);
    default: return apply_shift(*w_, v, 1);
  }
}

UFamily certified(UFamily family, const SpaceSpec& space, bool waive, long horizon) {
  if (family.kind() != FamilyKind::UnilateralShift && family.kind() != FamilyKind::BilateralShift) {
    family.certificate = "not applicable";
    return family;
  }
  const SeriesCertificate cert = check_series_condition(space, family.weights(), SeriesKind::Plain, horizon, 1e-6);
  family.certificate = "plain series: " + to_string(cert.verdict) + (cert.witness.empty() ? "" : " (" + cert.witness + ")");
  if (cert.verdict != Verdict::Pass) {
    if (!waive) throw CertificateError("series condition for " + family.name() + " did not pass: " + family.certificate);
    family.waived = true;
    family.certificate += ", waived";
  }
  return family;
}

}  // namespace fhc
