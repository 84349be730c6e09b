#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <span>

#include "fhc/distributions.hpp"
#include "fhc/kernels.hpp"
#include "fhc/majorant.hpp"
#include "fhc/space.hpp"
#include "fhc/u_family.hpp"

namespace fhc {


/// One draw of v = sum X_n u_n truncated to the assembly window [lo, hi].
/// The coefficient stream may run past hi so that orbit points T^m v keep a
/// full window.
struct RandomVectorSample {
  std::shared_ptr<const UFamily> family;
  SpaceSpec space = SpaceSpec::lp(2.0);
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long lo = 0, hi = 0;
  long stream_lo = 0, stream_hi = 0;
  std::vector<Scalar> X;       // X_n for n in [stream_lo, stream_hi]
  std::vector<Scalar> scales;  // s_n on [lo, hi] for diagonal families
  TruncatedVector assembled;
  std::optional<double> tail_certificate;

  Scalar x(long n) const;
};

/// [-N, N] for families indexed over Z, [0, N] otherwise; the stream covers
/// [lo, hi + extra_stream].
RandomVectorSample sample_vector(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                 const DistributionSpec& dist, long N, const DeltaSequence* deltas,
                                 std::uint64_t seed, std::uint64_t stream = 0, long extra_stream = 0);

/// T^m v = sum_j X_{j+m} u_j over j in [lo, min(hi, stream_hi - m)].
TruncatedVector orbit_coefficients(const RandomVectorSample& s, long m);

/// Sum over j in [lo, hi] of Y[j - lo] u_j. For diagonal families scales[j - lo] = s_j.
TruncatedVector assemble_window(const UFamily& family, std::span<const Scalar> scales, long lo, long hi,
                                std::span<const Scalar> Y);

/// Window [lo, hi] of a sample with N, trimmed where diagonal scales vanish.
struct Window {
  long lo = 0, hi = 0;
  std::vector<Scalar> scales;
};
Window sample_window(const UFamily& family, long N);

struct BallBound {
  long N = 0;
  double majorant_tail = 0.0;  // delta-majorant of the discarded tail at N
  double pB = 0.0;
  double pB_stderr = 0.0;
  long hits = 0;
  long reps = 0;
  double log_product_factor = 0.0;
  double product_factor = 1.0;
  double product_tolerance = 0.0;  // bound on the neglected part of -log(product)
  double lower_bound = 0.0;
  TailSumCertificate tail;
};

/// P(Pi_{|n| > N}) in log domain: sum of log1p(-P(|X| >= delta_n)) over
/// N < |n| <= horizon; tolerance bounds what lies past the horizon.
void product_factor(const DistributionSpec& dist, const DeltaSequence& deltas, long N, long horizon, bool bilateral,
                    double& log_value, double& tolerance);

/// Lower bound P(B) * prod_{|n| > N} (1 - P(|X| >= delta_n)) for P(v in B(y, eta)).
/// N is the smallest index >= N_min whose delta-majorant tail is below eta/2.
BallBound ball_probability_lower_bound(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                       const DistributionSpec& dist, const DeltaSequence& deltas,
                                       const TruncatedVector& target, double eta, long N_min, long mc_reps,
                                       std::uint64_t seed, kernels::Exec exec, long horizon = 2048);

struct BallEstimate {
  double p = 0.0;
  double stderr_ = 0.0;
  long hits = 0;
  long reps = 0;
};

/// Direct Monte-Carlo estimate of P(v in B(y, eta)) with window N.
BallEstimate ball_probability_direct(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                     const DistributionSpec& dist, const TruncatedVector& target, double eta, long N,
                                     long reps, std::uint64_t seed, kernels::Exec exec);

}  // namespace fhc
