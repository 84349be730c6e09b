#pragma once

#include <string>
#include <vector>

#include "fhc/shift.hpp"
#include "fhc/space.hpp"

namespace fhc {

/// Fixed enumeration of the finite-support dyadic vectors m_j / 2^d on
/// indices 0..s-1 (real field). Vectors are grouped by the height
/// s + d + max|m_j| with d minimal, then ordered by (s, d, max|m_j|), then
/// lexicographically with entries ranked 0, 1, -1, 2, -2, ...
/// Index 1 is the zero vector, index 2 is e_0 and index 3 is -e_0.
TruncatedVector enumerate_dense(const SpaceSpec& space, long index);

/// Inverse of enumerate_dense; throws InvalidArgument for a vector that is
/// not dyadic or has support outside n >= 0.
long dense_index(const SpaceSpec& space, const TruncatedVector& v);

struct AChoice {
  double a = 1.0;
  double s_sum = 0.0;  // sum over n >= 0 of ||S^n x||, tail included
  double t_sum = 0.0;  // same for T^n x
  bool ok = true;      // false when a series could not be certified
  std::string note;
};

/// a_k = min(1, 2^-k / max(sum ||S^n x||, sum ||T^n x||)).
AChoice choose_a(const SpaceSpec& space, const WeightSequence& w, const TruncatedVector& x, long k,
                 long horizon = 1024);

struct FhcBlock {
  long k = 0;
  long index = 0;  // position of x in the dense enumeration
  TruncatedVector x;
  AChoice a;
  long n = 0;
  double s_norm = 0.0;  // ||a_k S^{n_k} x_k||
};

/// Smallest n > n_{k-1} such that ||a S^n x|| <= 2^-k and every block l <= k
/// keeps ||(1/a_l) T^{n_l} y - x_l|| < 2^-l, y = sum_{j<=k} a_j S^{n_j} x_j.
/// Throws HorizonExhausted naming the inequality that still fails.
long choose_n(const SpaceSpec& space, const WeightSequence& w, const std::vector<FhcBlock>& built,
              const TruncatedVector& x, double a, long k, long horizon = 4096);

struct LedgerRow {
  long k = 0;
  long l = 0;          // 0 on the row for ||a_k S^{n_k} x_k||
  std::string check;   // "forward-norm", "approximation" or "block-majorant"
  double lhs = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct FhcChecks {
  double majorant_plus = 0.0;   // sum over n >= 1 of ||u_n||, tail included
  double majorant_minus = 0.0;  // sum over n >= 0 of ||u_{-n}||
  Verdict plus_verdict = Verdict::Inconclusive;
  double orbit_residual = 0.0;  // max relative error of T u_n = u_{n-1}, |n| <= 3
  bool ledger_holds = false;
};

/// Criterion construction for a unilateral weighted shift on real l^p.
class FhcConstruction {
 public:
  static FhcConstruction assemble(const SpaceSpec& space, const WeightSequence& w, long K, long n_horizon = 4096,
                                  long series_horizon = 1024);

  const SpaceSpec& space() const { return space_; }
  const WeightSequence& weights() const { return w_; }
  const std::vector<FhcBlock>& blocks() const { return blocks_; }
  const std::vector<LedgerRow>& ledger() const { return ledger_; }
  const std::vector<std::string>& skipped() const { return skipped_; }
  const FhcChecks& checks() const { return checks_; }
  const TruncatedVector& x() const { return x_; }

  /// u_n = sum_k a_k S^{n_k + n} x_k for n >= 1 and T^{-n} x for n <= 0.
  TruncatedVector u(long n) const;

 private:
  FhcConstruction(SpaceSpec space, WeightSequence w) : space_(std::move(space)), w_(std::move(w)) {}
  void verify(long series_horizon);

  SpaceSpec space_;
  WeightSequence w_;
  std::vector<FhcBlock> blocks_;
  std::vector<LedgerRow> ledger_;
  std::vector<std::string> skipped_;
  FhcChecks checks_;
  TruncatedVector x_;
};

}  // namespace fhc
