#include <doctest.h>

#include "fhc/error.hpp"
#include "fhc/kernels.hpp"
#include "fhc/random_vectors.hpp"

using namespace fhc;
using namespace fhc::kernels;

namespace {

struct Setup {
  SpaceSpec space = SpaceSpec::lp(2.0);
  std::shared_ptr<const UFamily> family = std::make_shared<const UFamily>(UFamily::shift(WeightSequence::constant(2.0)));
  DistributionSpec law = make_gaussian(0.0, 1.0);
  std::vector<Ball> balls{{TruncatedVector::zeros(0, 0), 1.0},
                          {TruncatedVector::unit(0, 1.0), 0.8},
                          {TruncatedVector(0, {0.5, -0.5, 0.25}), 1.2}};

  ReplicaSource source(long N, long extra, std::uint64_t seed) const {
    Window w = sample_window(*family, N);
    return ReplicaSource{&space, family.get(), &law, w.lo, w.hi, w.hi + extra, w.scales, seed};
  }
};

}  // namespace

TEST_CASE("serial and parallel kernels agree byte for byte") {
  const Setup s;
  const auto src = s.source(20, 30, 42);
  CHECK(serial::ball_hit_flags(src, s.balls, 500) == omp::ball_hit_flags(src, s.balls, 500));
  const std::vector<long> grid{0, 1, 5, 10, 30};
  CHECK(serial::mixing_cells(src, s.balls[0], s.balls[1], grid, 300) ==
        omp::mixing_cells(src, s.balls[0], s.balls[1], grid, 300));

  const auto sample = sample_vector(s.space, s.family, s.law, 20, nullptr, 7, 0, 400);
  CHECK(serial::visit_hits(sample, s.balls, 400) == omp::visit_hits(sample, s.balls, 400));
  CHECK(serial::orbit_distances(sample, s.balls, 400) == omp::orbit_distances(sample, s.balls, 400));
  CHECK(ball_hit_flags(src, s.balls, 50, Exec::Serial) == ball_hit_flags(src, s.balls, 50, Exec::Parallel));
}

TEST_CASE("ball flags reproduce per-replica samples") {
  const Setup s;
  const auto src = s.source(20, 0, 9);
  const auto flags = ball_hit_flags(src, s.balls, 40, Exec::Parallel);
  REQUIRE(flags.size() == 40 * s.balls.size());
  for (long r = 0; r < 40; ++r) {
    const auto v = sample_vector(s.space, s.family, s.law, 20, nullptr, 9, static_cast<std::uint64_t>(r));
    for (std::size_t b = 0; b < s.balls.size(); ++b)
      CHECK(flags[r * s.balls.size() + b] == (distance(s.space, v.assembled, s.balls[b].center) < s.balls[b].radius));
  }
}

TEST_CASE("mixing cells encode both memberships") {
  const Setup s;
  const std::vector<long> grid{0, 3, 12};
  const auto src = s.source(20, 12, 5);
  const auto cells = mixing_cells(src, s.balls[1], s.balls[0], grid, 30, Exec::Parallel);
  for (long r = 0; r < 30; ++r) {
    const auto v = sample_vector(s.space, s.family, s.law, 20, nullptr, 5, static_cast<std::uint64_t>(r), 12);
    const bool inB = distance(s.space, v.assembled, s.balls[0].center) < s.balls[0].radius;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const bool inA = distance(s.space, orbit_coefficients(v, grid[g]), s.balls[1].center) < s.balls[1].radius;
      CHECK(cells[r * grid.size() + g] == (inB ? 1 : 0) + (inA ? 2 : 0));
    }
  }
}

TEST_CASE("visit hits are strict distance comparisons") {
  const Setup s;
  const auto sample = sample_vector(s.space, s.family, s.law, 20, nullptr, 3, 0, 100);
  const auto hits = visit_hits(sample, s.balls, 100, Exec::Parallel);
  const auto dist = orbit_distances(sample, s.balls, 100, Exec::Parallel);
  REQUIRE(hits.size() == dist.size());
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == (dist[i] < s.balls[i % s.balls.size()].radius));
  CHECK(dist[0] == distance(s.space, sample.assembled, s.balls[0].center));
}

TEST_CASE("kernel horizon checks") {
  const Setup s;
  const auto src = s.source(20, 5, 1);
  CHECK_THROWS_AS(mixing_cells(src, s.balls[0], s.balls[0], {0, 6}, 4, Exec::Serial), OrbitHorizonExceeded);
  CHECK_THROWS_AS(mixing_cells(src, s.balls[0], s.balls[0], {-1}, 4, Exec::Parallel), InvalidArgument);
  const auto sample = sample_vector(s.space, s.family, s.law, 20, nullptr, 3, 0, 10);
  CHECK_THROWS_AS(visit_hits(sample, s.balls, 31, Exec::Serial), OrbitHorizonExceeded);
  CHECK_NOTHROW(visit_hits(sample, s.balls, 30, Exec::Parallel));
  CHECK(to_string(Exec::Serial) == "serial");
}
