#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fhc/dynamics.hpp"
#include "fhc/error.hpp"

using namespace fhc;

namespace {

std::shared_ptr<const UFamily> share(UFamily f) { return std::make_shared<const UFamily>(std::move(f)); }

const SpaceSpec kL2 = SpaceSpec::lp(2.0);
const auto kRolewicz = share(UFamily::shift(WeightSequence::constant(2.0)));
const auto kRemark = share(UFamily::shift(WeightSequence::two_sided(2.0, 0.5)));

}  // namespace

TEST_CASE("target balls need a positive radius") {
  CHECK_THROWS_AS(TargetBall::make(TruncatedVector(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(TargetBall::make(TruncatedVector::unit(0, std::nan("")), 1.0), InvalidArgument);
  CHECK(TargetBall::make(TruncatedVector::unit(2, 1.0), 0.5).radius == 0.5);
}

TEST_CASE("visit frequency extremes") {
  const auto s = sample_vector(kL2, kRolewicz, make_gaussian(0.0, 1.0), 20, nullptr, 4, 0, 500);
  const auto all = visit_frequency(s, TargetBall::make(TruncatedVector(), 1e9), 500);
  CHECK(all.hit_count == 501);
  CHECK(all.liminf_proxy == 1.0);
  const auto none = visit_frequency(s, TargetBall::make(TruncatedVector::unit(0, 1e6), 1e-3), 500);
  CHECK(none.hit_count == 0);
  CHECK(none.liminf_proxy == 0.0);
  CHECK_THROWS_AS(visit_frequency(s, TargetBall::make(TruncatedVector(), 1.0), 521), OrbitHorizonExceeded);
}

TEST_CASE("visit frequency bookkeeping") {
  const auto delta = DeltaSequence::linear(1.0, 1.0);
  const auto s = sample_vector(kL2, kRolewicz, make_gaussian(0.0, 1.0), 20, &delta, 8, 2, 2000);
  const auto ball = TargetBall::make(TruncatedVector::unit(0, 0.5), 1.0);
  const auto r = visit_frequency(s, ball, 2000);
  REQUIRE(r.hits.size() == 2001);
  REQUIRE(r.tail_certificate);
  CHECK(r.seed == 8);
  CHECK(r.stream == 2);
  long count = 0;
  for (long n = 0; n <= 2000; ++n) {
    count += r.hits[n];
    CHECK(r.running[n] == doctest::Approx(static_cast<double>(count) / (n + 1.0)));
    CHECK(r.hits[n] == (distance(kL2, orbit_coefficients(s, n), ball.center) < ball.radius));
  }
  CHECK(r.hit_count == count);
  CHECK(r.liminf_proxy >= 0.0);
  CHECK(r.liminf_proxy <= *std::max_element(r.running.begin(), r.running.end()));
  CHECK(r.liminf_proxy == *std::min_element(r.running.begin() + 1000, r.running.end()));

  const auto again = visit_frequency(s, ball, 2000, kernels::Exec::Serial);
  CHECK(again.hits == r.hits);
  CHECK(again.liminf_proxy == r.liminf_proxy);
  CHECK(again.ambiguous == r.ambiguous);
}

TEST_CASE("lower density sweep with the whole space as target") {
  SweepConfig cfg;
  cfg.N = 20;
  cfg.N_orbit = 200;
  cfg.replicas = 3;
  cfg.space_reps = 200;
  cfg.seed = 1;
  const auto res = lower_density_sweep(kL2, kRolewicz, make_gaussian(0.0, 1.0),
                                       {TargetBall::make(TruncatedVector(), 1e9)}, cfg);
  REQUIRE(res.size() == 1);
  for (double p : res[0].proxies) CHECK(p == 1.0);
  CHECK(res[0].p_hat == 1.0);
  CHECK(res[0].birkhoff_consistent);
  CHECK_THROWS_AS(lower_density_sweep(kL2, kRolewicz, make_gaussian(0.0, 1.0), {}, cfg), InvalidArgument);
}

TEST_CASE("Rolewicz lower densities are positive and match the space average") {
  SweepConfig cfg;
  cfg.N = 60;
  cfg.N_orbit = 10000;
  cfg.replicas = 8;
  cfg.space_reps = 10000;
  cfg.seed = 2024;
  std::vector<TargetBall> targets;
  for (const auto& c : {TruncatedVector(), TruncatedVector::unit(0, 0.5), TruncatedVector::unit(0, -0.5),
                        TruncatedVector(0, {0.25, 0.5}), TruncatedVector(0, {-0.25, 0.0, 0.125})})
    targets.push_back(TargetBall::make(c, 0.5));
  const auto res = lower_density_sweep(kL2, kRolewicz, make_gaussian(0.0, 1.0), targets, cfg);
  REQUIRE(res.size() == targets.size());
  for (const auto& b : res) {
    CHECK(b.proxies.size() == 8);
    CHECK(b.min_proxy > 0.0);
    CHECK(b.birkhoff_z <= 5.0);
    CHECK(b.birkhoff_consistent);
  }
  const auto again = lower_density_sweep(kL2, kRolewicz, make_gaussian(0.0, 1.0), targets, cfg, kernels::Exec::Serial);
  for (std::size_t i = 0; i < res.size(); ++i) {
    CHECK(again[i].proxies == res[i].proxies);
    CHECK(again[i].p_hat == res[i].p_hat);
  }
}

TEST_CASE("mixing at n = 0 with A = B") {
  const auto ball = TargetBall::make(TruncatedVector(), 1.0);
  const auto rep = mixing_correlation(kL2, kRemark, make_gaussian(0.0, 1.0), ball, ball, {0}, 4000, 10, 3);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  CHECK(row.joint == row.pA);
  CHECK(row.pA == row.pB);
  CHECK(row.difference == doctest::Approx(row.pA - row.pA * row.pA).epsilon(1e-12));
  CHECK(rep.note.find("exactness is not estimated") != std::string::npos);
}

TEST_CASE("mixing on the bilateral shift") {
  const auto A = TargetBall::make(TruncatedVector(), 1.5);
  const auto rep = mixing_correlation(kL2, kRemark, make_gaussian(0.0, 1.0), A, A, {0, 20, 40, 100}, 20000, 30, 5);
  REQUIRE(rep.rows.size() == 4);
  CHECK_FALSE(rep.rows[1].structurally_independent);
  CHECK(rep.rows[3].structurally_independent);
  CHECK(std::abs(rep.rows[3].difference) <= 3.0 * rep.rows[3].stderr_);
  CHECK(rep.rows[0].difference > 0.0);
  CHECK(rep.note.find("bilateral") != std::string::npos);
  CHECK_THROWS_AS(mixing_correlation(kL2, kRemark, make_gaussian(0.0, 1.0), A, A, {}, 100, 30, 5), InvalidArgument);
}

TEST_CASE("structurally independent differences stay within four stderr") {
  const auto A = TargetBall::make(TruncatedVector::unit(0, 0.5), 1.2);
  const auto B = TargetBall::make(TruncatedVector(), 1.0);
  int within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rep = mixing_correlation(kL2, kRemark, make_gaussian(0.0, 1.0), A, B, {25}, 3000, 12, seed);
    REQUIRE(rep.rows[0].structurally_independent);
    within += std::abs(rep.rows[0].difference) <= 4.0 * rep.rows[0].stderr_;
  }
  CHECK(within >= 19);
}
