#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fhc/log_scalar.hpp"
#include "fhc/series.hpp"
#include "fhc/space.hpp"

namespace fhc {

// ---------------------------------------------------------------------------
// Weight rules for T e_n = w_n e_{n-1}
// ---------------------------------------------------------------------------

struct ConstantWeights {
  Scalar lambda = 2.0;
};

/// w_n = n (the differentiation operator on power series).
struct LinearWeights {};

struct TableWeights {
  std::map<long, Scalar> entries;
  Scalar fallback = 1.0;
};

/// w_n = positive for n >= 1 and negative for n <= 0.
struct TwoSidedWeights {
  Scalar positive = 2.0;
  Scalar negative = 0.5;
};

/// beta_n = log(n)^a n^b for n >= 2 and beta_0 = beta_1 = 1.
struct PowerLogBeta {
  double a = 1.0;
  double b = 0.5;
};

using WeightRule = std::variant<ConstantWeights, LinearWeights, TableWeights, TwoSidedWeights, PowerLogBeta>;

class WeightSequence {
 public:
  WeightSequence(WeightRule rule, bool bilateral);

  static WeightSequence constant(Scalar lambda, bool bilateral = false) { return {ConstantWeights{lambda}, bilateral}; }
  static WeightSequence linear() { return {LinearWeights{}, false}; }
  static WeightSequence two_sided(Scalar pos, Scalar neg) { return {TwoSidedWeights{pos, neg}, true}; }
  static WeightSequence power_log(double a, double b) { return {PowerLogBeta{a, b}, false}; }

  const WeightRule& rule() const { return rule_; }
  bool bilateral() const { return bilateral_; }
  std::string name() const;

  /// w_n; n >= 1 unless bilateral.
  Scalar weight(long n) const;
  /// beta_n with beta_0 = 1, beta_n = beta_{n-1} w_n and beta_{n-1} = beta_n / w_n.
  SignedLogScalar log_beta(long n) const;

  /// 1/beta_n for n in [lo, hi], by running products from index 0 so that
  /// dyadic and integer weights give exact values.
  std::vector<Scalar> inverse_betas(long lo, long hi) const;

 private:
  void check_index(long n) const;
  WeightRule rule_;
  bool bilateral_;
};

// ---------------------------------------------------------------------------
// Shift application
// ---------------------------------------------------------------------------

/// T^m v. Coefficient c_n moves to n-m with factor w_n w_{n-1} ... w_{n-m+1};
/// unilateral shifts drop everything that would land below 0.
TruncatedVector apply_shift(const WeightSequence& w, const TruncatedVector& v, long m);

/// S^m v for the right inverse S e_n = e_{n+1} / w_{n+1} (unilateral only).
TruncatedVector apply_forward_shift(const WeightSequence& w, const TruncatedVector& v, long m);

// ---------------------------------------------------------------------------
// Series certificates
// ---------------------------------------------------------------------------

enum class SeriesKind { Plain, SqrtLog };

std::string to_string(SeriesKind k);

struct ComponentTail {
  std::string label;  // "p-sum", "sup", "r=..." and a side suffix when bilateral
  TailClass tail;
};

struct SeriesCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<ComponentTail> components;
  std::vector<double> tail_estimates;
  bool below_tol = false;  // every tail estimate < tol at the horizon
  std::string witness;     // name of the deciding failure rule, if any
};

SeriesCertificate check_series_condition(const SpaceSpec& space, const WeightSequence& w, SeriesKind kind,
                                         long horizon, double tol);

struct ChaosCertificate {
  Verdict verdict = Verdict::Fail;
  std::vector<double> roots;  // |beta_n|^{1/n}, n = 1..horizon
  double statistic = 0.0;
  std::string note;
};

/// Horizon-limited trend test on |beta_n|^{1/n}; never a statement about the limit.
ChaosCertificate chaoticity_criterion(const SpaceSpec& space, const WeightSequence& w, long horizon,
                                      double growth_threshold = 0.05, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Polynomials of the shift
// ---------------------------------------------------------------------------

class PolynomialSpec {
 public:
  explicit PolynomialSpec(std::vector<Scalar> a);  // a[0] is a_1
  const std::vector<Scalar>& coefficients() const { return a_; }
  std::size_t degree() const { return a_.size(); }
  Scalar a(std::size_t k) const { return a_.at(k - 1); }
  std::string name() const;

 private:
  std::vector<Scalar> a_;
};

/// Columns u_0..u_N with P(T) u_n = u_{n-1}; the free coefficient beta_{0,n}
/// is fixed to 0.
struct PolynomialBasis {
  std::vector<TruncatedVector> columns;
  double max_residual = 0.0;
  Scalar beta(long j, long n) const { return columns.at(static_cast<std::size_t>(n)).at(j); }
};

PolynomialBasis polynomial_basis(const WeightSequence& w, const PolynomialSpec& P, long N);

TruncatedVector apply_poly_shift(const WeightSequence& w, const PolynomialSpec& P, const TruncatedVector& v);

}  // namespace fhc
