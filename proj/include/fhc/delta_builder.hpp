#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhc/distributions.hpp"
#include "fhc/majorant.hpp"
#include "fhc/space.hpp"
#include "fhc/u_family.hpp"

namespace fhc {

/// N_1 < N_2 < ... with majorant tail beyond N_k at most 1/k^2. Index n
/// belongs to block k when N_k < n <= N_{k+1}; n <= N_1 is in block 1 and
/// everything past the last N_k stays in the last block.
struct StaircaseRecord {
  std::vector<long> N;
  std::vector<double> tail_at_N;
  long horizon = 0;
  bool finite_support = false;
  Side side = Side::Positive;

  long block_of(long n) const;
  long blocks() const { return static_cast<long>(N.size()); }
};

struct DeltaBuild {
  DeltaSequence delta;
  std::shared_ptr<const StaircaseRecord> record;
};

/// delta_n = sqrt(k) |eps_n| on block k. eps_abs is read at |n|; on the
/// negative side the series is sum_{m >= 1} eps_m u_{-m} and delta_0 copies delta_1.
DeltaBuild build_delta(const SpaceSpec& space, const UFamily& family, std::function<double(long)> eps_abs,
                       long horizon, Side side = Side::Positive);

/// n -> min(plus_|n|, minus_|n|) over Z.
DeltaSequence symmetrize_delta(const DeltaSequence& plus, const DeltaSequence& minus, long check_horizon = 2048);

struct PipelineReport {
  bool ok = false;
  std::string stage;  // last stage reached
  std::string message;
  std::optional<DeltaBuild> plus, minus;
  std::optional<DeltaSequence> symmetric;
  std::optional<AnnulusDensity> density;
  std::optional<TailSumCertificate> certificate;
};

/// build_delta on each side, symmetrize, annulus density on the minimum,
/// then tail_sum of that density against the symmetric thresholds. A
/// divergence failure is reported, not thrown.
PipelineReport compose_pipeline(const SpaceSpec& space, const UFamily& family, std::function<double(long)> eps_abs,
                                long horizon, Field field, long tail_horizon = 256);

}  // namespace fhc
