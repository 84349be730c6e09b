#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhc/distributions.hpp"
#include "fhc/space.hpp"
#include "fhc/u_family.hpp"

namespace fhc {
struct RandomVectorSample;
}

// Replica- and orbit-level loops. Every kernel writes one slot per index and
// leaves reduction to the caller, so serial and OpenMP runs give identical
// output. Replica r draws its stream from make_rng(seed, r).
namespace fhc::kernels {

enum class Exec { Serial, Parallel };

std::string to_string(Exec e);

struct ReplicaSource {
  const SpaceSpec* space = nullptr;
  const UFamily* family = nullptr;
  const DistributionSpec* dist = nullptr;
  long lo = 0, hi = 0;        // assembly window
  long stream_hi = 0;         // draws cover [lo, stream_hi]
  std::vector<Scalar> scales;  // s_j on [lo, hi] for diagonal families
  std::uint64_t seed = 0;
};

struct Ball {
  TruncatedVector center;
  double radius = 0.0;
};

namespace serial {
std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps);
std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps);
std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit);
std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit);
}  // namespace serial

namespace omp {
std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps);
std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps);
std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit);
std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit);
}  // namespace omp

/// flags[r * balls + b] = 1 iff replica r lies in ball b.
std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps, Exec e);

/// cells[r * grid + g]: bit 0 is v in B, bit 1 is T^{grid[g]} v in A.
std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps, Exec e);

/// hits[n * balls + b] = 1 iff T^n v lies in ball b, n = 0..N_orbit.
std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit,
                                     Exec e);

/// dist[n * balls + b] = distance from T^n v to the center of ball b.
std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit, Exec e);

}  // namespace fhc::kernels
