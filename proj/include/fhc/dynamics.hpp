#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhc/distributions.hpp"
#include "fhc/kernels.hpp"
#include "fhc/random_vectors.hpp"

namespace fhc {

/// Open ball B(center, radius) in the F-norm metric of the sample's space.
struct TargetBall {
  TruncatedVector center;
  double radius = 1.0;

  static TargetBall make(TruncatedVector center, double radius);
};

struct FrequencyReport {
  std::vector<std::uint8_t> hits;       // n = 0..N_orbit
  std::vector<double> running;          // |{m <= n : hit}| / (n + 1)
  std::vector<std::uint8_t> ambiguous;  // |distance - radius| within the tail certificate
  long hit_count = 0;
  long ambiguous_count = 0;
  double liminf_proxy = 0.0;  // min of the running frequency over the trailing half
  std::optional<double> tail_certificate;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

FrequencyReport visit_frequency(const RandomVectorSample& sample, const TargetBall& ball, long N_orbit,
                                kernels::Exec exec = kernels::Exec::Parallel);

struct BallSweep {
  std::vector<double> proxies;      // one per replica
  std::vector<double> final_freqs;  // running frequency at N_orbit, per replica
  double mean_proxy = 0.0;
  double min_proxy = 0.0;
  double proxy_stderr = 0.0;
  double p_hat = 0.0;  // Monte-Carlo P(v in ball) over independent draws
  double p_stderr = 0.0;
  double birkhoff_z = 0.0;  // |mean_proxy - p_hat| / combined stderr
  bool birkhoff_consistent = false;
};

struct SweepConfig {
  long N = 60;             // assembly window of each replica
  long N_orbit = 10000;    // orbit points T^n v, n = 0..N_orbit
  long replicas = 8;
  long space_reps = 10000;  // independent draws behind p_hat
  std::uint64_t seed = 0;
  double birkhoff_sigmas = 5.0;
};

/// Replica r draws its stream from (seed, r) and extends it by N_orbit, so every
/// orbit point keeps the full window.
std::vector<BallSweep> lower_density_sweep(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                           const DistributionSpec& dist, const std::vector<TargetBall>& targets,
                                           const SweepConfig& cfg, kernels::Exec exec = kernels::Exec::Parallel);

struct MixingRow {
  long n = 0;
  double joint = 0.0;  // P(T^n v in A, v in B)
  double pA = 0.0;
  double pB = 0.0;
  double product = 0.0;
  double difference = 0.0;
  double stderr_ = 0.0;
  bool structurally_independent = false;  // diagonal family with n > 2N
};

struct MixingReport {
  std::vector<MixingRow> rows;
  long reps = 0;
  long N = 0;
  std::string note;
};

MixingReport mixing_correlation(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                const DistributionSpec& dist, const TargetBall& A, const TargetBall& B,
                                const std::vector<long>& n_grid, long M, long N, std::uint64_t seed,
                                kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace fhc
