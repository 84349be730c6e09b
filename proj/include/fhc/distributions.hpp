#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fhc/rng.hpp"
#include "fhc/series.hpp"
#include "fhc/space.hpp"

namespace fhc {

// ---------------------------------------------------------------------------
// Threshold sequences
// ---------------------------------------------------------------------------

enum class DeltaProvenance { UserGiven, DeltaBuilder, Symmetrized };

std::string to_string(DeltaProvenance p);

/// Nonnegative thresholds delta_n over N or Z, evaluated on demand.
class DeltaSequence {
 public:
  using Generator = std::function<double(long)>;

  DeltaSequence(Generator g, bool bilateral, DeltaProvenance provenance, std::string description);

  /// delta_n = slope * |n| + offset.
  static DeltaSequence linear(double slope, double offset, bool bilateral = false);
  static DeltaSequence constant(double c, bool bilateral = false);
  /// Table over n = 0..size-1, continued past the end by repeating the last gap.
  static DeltaSequence table(std::vector<double> values);

  double operator()(long n) const;
  /// The same values viewed as an N-indexed sequence.
  DeltaSequence naturals() const;
  bool bilateral() const { return bilateral_; }
  DeltaProvenance provenance() const { return provenance_; }
  const std::string& description() const { return description_; }

 private:
  Generator g_;
  bool bilateral_;
  DeltaProvenance provenance_;
  std::string description_;
};

// ---------------------------------------------------------------------------
// Laws of the coefficient variable X
// ---------------------------------------------------------------------------

/// rho = 2^{-1} sum_k 2^{-k} m_k^{-1} 1_{U_k}, U_k the k-th annulus between
/// consecutive thresholds. Thresholds past the stored table grow by the last gap.
struct AnnulusDensity {
  Field field = Field::Real;
  std::vector<double> thresholds;  // strictly increasing, positive
  std::vector<long> source_index;  // original n behind each kept threshold
  double extension_gap = 1.0;

  double threshold(long k) const;  // t_k; t_{-1} = 0
  double mass(long k) const;       // Lebesgue measure m_k of U_k
  double height(long k) const { return std::ldexp(1.0, -static_cast<int>(k) - 1) / mass(k); }
  long annulus_of(double t) const;  // k with t_{k-1} <= t < t_k
};

/// Real: N(mean, variance). Complex: circular with E|Z|^2 = variance, mean 0.
struct GaussianLaw {
  Field field = Field::Real;
  double mean = 0.0;
  double variance = 1.0;
};

/// Uniform on [-bound, bound] or on the closed disk of radius bound.
struct UniformBoundedLaw {
  Field field = Field::Real;
  double bound = 1.0;
};

/// P(|X| >= t) given at knots (t_0 = 0, P = 1), log-linear in between and
/// continued with the last log-slope. The phase of X is uniform.
struct CustomTailLaw {
  Field field = Field::Real;
  std::vector<double> t;
  std::vector<double> log_p;
};

using DistributionSpec = std::variant<AnnulusDensity, GaussianLaw, UniformBoundedLaw, CustomTailLaw>;

std::string describe(const DistributionSpec& d);
Field field_of(const DistributionSpec& d);
bool has_full_support(const DistributionSpec& d);

GaussianLaw make_gaussian(double mean, double variance, Field field = Field::Real);
UniformBoundedLaw make_uniform(double bound, Field field = Field::Real);
CustomTailLaw make_custom_tail(std::vector<double> t, std::vector<double> p, Field field = Field::Real);

/// Preprocess (inf-tail, then perturb-and-drop when needed) and build rho.
/// Throws DivergenceRequired when delta stays bounded along a subsequence:
/// min over [H, 2H] not above the median over [0, H/4].
AnnulusDensity build_annulus_density(const DeltaSequence& deltas, Field field, long check_horizon = 2048);

double tail_prob(const DistributionSpec& d, double t);
double log_tail_prob(const DistributionSpec& d, double t);
double cdf_abs(const DistributionSpec& d, double t);

Scalar draw(const DistributionSpec& d, Rng& rng);
std::vector<Scalar> sample(const DistributionSpec& d, Rng& rng, long count);
double standard_normal(Rng& rng);

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct TailSumCertificate {
  Verdict verdict = Verdict::Inconclusive;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  bool below_tol = false;
  std::string rule;
  std::string witness;
};

/// Returns the first index n in [H, 2H] whose delta does not exceed the
/// median over [0, H/4], or -1 when none does.
long bounded_subsequence_witness(const DeltaSequence& deltas, long H, int side = 1);

TailSumCertificate tail_sum(const DistributionSpec& d, const DeltaSequence& deltas, long horizon, double tol = 1e-6);

struct SubgaussianParams {
  double K = 1.0;
  double tau = 1.0;
  std::optional<DistributionSpec> law;  // needed only for validation
};

/// Throws InvalidArgument unless P(|X| > t) <= K exp(-t^2/tau^2) on a grid.
void validate_subgaussian(const SubgaussianParams& params);

struct SubgaussianCertificate {
  double exponent = 0.0;
  double series_bound = 0.0;  // K * sum_{|n| >= 2} |n|^{-exponent}
  Verdict verdict = Verdict::Fail;
};

SubgaussianCertificate subgaussian_certificate(const SubgaussianParams& params, double c);

}  // namespace fhc
