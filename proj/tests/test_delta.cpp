#include <doctest.h>

#include <cmath>

#include "fhc/delta_builder.hpp"
#include "fhc/error.hpp"

using namespace fhc;

namespace {

const UFamily kIdentityShift = UFamily::shift(WeightSequence::constant(1.0));

double geometric(long n) { return std::ldexp(1.0, -static_cast<int>(std::min(n, 2000L))); }
double inverse_square(long n) { return n == 0 ? 1.0 : 1.0 / (static_cast<double>(n) * static_cast<double>(n)); }

}  // namespace

TEST_CASE("geometric eps on l1") {
  const auto b = build_delta(SpaceSpec::lp(1.0), kIdentityShift, geometric, 512);
  const auto& rec = *b.record;
  REQUIRE(rec.blocks() >= 5);
  CHECK_FALSE(rec.finite_support);
  for (long k = 1; k <= rec.blocks(); ++k) {
    CHECK(rec.tail_at_N[static_cast<std::size_t>(k - 1)] <= 1.0 / static_cast<double>(k * k));
    if (k > 1) CHECK(rec.N[static_cast<std::size_t>(k - 1)] > rec.N[static_cast<std::size_t>(k - 2)]);
  }
  for (long n = 0; n < 300; ++n) {
    const double k = static_cast<double>(rec.block_of(n));
    CHECK(geometric(n) / b.delta(n) == doctest::Approx(1.0 / std::sqrt(k)).epsilon(1e-14));
  }
  // the greedy N_k is minimal: one index earlier the tail is still too large
  const MajorantSeries M(SpaceSpec::lp(1.0), kIdentityShift, geometric, 512);
  for (long k = 1; k <= rec.blocks(); ++k) {
    const long N = rec.N[static_cast<std::size_t>(k - 1)];
    const long prev = k == 1 ? -1 : rec.N[static_cast<std::size_t>(k - 2)];
    if (N - 1 > prev) CHECK(M.tail(N - 1) > 1.0 / static_cast<double>(k * k));
  }
  CHECK(b.delta.provenance() == DeltaProvenance::DeltaBuilder);
}

TEST_CASE("scaled block tails are summable") {
  const auto space = SpaceSpec::lp(1.0);
  const auto b = build_delta(space, kIdentityShift, geometric, 512);
  const auto& rec = *b.record;
  const DeltaSequence d = b.delta;
  const MajorantSeries scaled(space, kIdentityShift, [d](long n) { return d(n); }, 512);
  for (long k = 1; k < rec.blocks(); ++k)
    for (long k2 = k + 1; k2 <= rec.blocks(); ++k2) {
      double bound = 0.0;
      for (long s = k; s < k2; ++s) bound += (1.0 + std::sqrt(static_cast<double>(s))) / static_cast<double>(s * s);
      CHECK(scaled.block(rec.N[static_cast<std::size_t>(k - 1)], rec.N[static_cast<std::size_t>(k2 - 1)]) <= bound);
    }
}

TEST_CASE("finite support gives a single block") {
  auto eps = [](long n) { return n <= 5 ? 1.0 / (1.0 + static_cast<double>(n)) : 0.0; };
  const auto b = build_delta(SpaceSpec::lp(2.0), kIdentityShift, eps, 256);
  CHECK(b.record->finite_support);
  CHECK(b.record->blocks() == 1);
  for (long n = 0; n <= 10; ++n) CHECK(b.delta(n) == eps(n));
}

TEST_CASE("inverse square eps on l2") {
  const long H = 1024;
  const auto b = build_delta(SpaceSpec::lp(2.0), kIdentityShift, inverse_square, H);
  double tail = 0.0;
  for (long n = H + 1; n <= 200 * H; ++n) tail += b.delta(n) * b.delta(n);
  CHECK(std::sqrt(tail) < 1e-3);
  for (long n = 1; n < H; ++n) CHECK(b.delta(n) >= inverse_square(n));
}

TEST_CASE("build_delta errors") {
  CHECK_THROWS_AS(build_delta(SpaceSpec::lp(2.0), kIdentityShift, [](long) { return 1.0; }, 256), CertificateError);
  CHECK_THROWS_AS(build_delta(SpaceSpec::lp(2.0), kIdentityShift, [](long n) { return 10.0 / (n + 1.0); }, 64),
                  HorizonExhausted);
  CHECK_THROWS_AS(build_delta(SpaceSpec::lp(1.0), kIdentityShift, geometric, 64, Side::Both), InvalidArgument);
}

TEST_CASE("symmetrize_delta") {
  const auto plus = DeltaSequence::linear(1.0, 1.0);
  const auto minus = DeltaSequence::linear(2.0, 1.0);
  const auto s = symmetrize_delta(plus, minus);
  CHECK(s.bilateral());
  CHECK(s.provenance() == DeltaProvenance::Symmetrized);
  for (long n = -50; n <= 50; ++n) {
    CHECK(s(n) == static_cast<double>(std::labs(n) + 1));
    CHECK(s(n) <= plus(std::labs(n)));
    CHECK(s(n) <= minus(std::labs(n)));
  }
  const auto same = symmetrize_delta(plus, plus);
  for (long n = -20; n <= 20; ++n) CHECK(same(n) == plus(std::labs(n)));

  CHECK_THROWS_AS(symmetrize_delta(plus, DeltaSequence::constant(3.0)), DivergenceRequired);
  CHECK_THROWS_AS(symmetrize_delta(DeltaSequence::linear(1.0, 1.0, true), plus), InvalidArgument);
}

TEST_CASE("pipeline on both sides of a bilateral shift") {
  const auto family = UFamily::shift(WeightSequence::two_sided(2.0, 0.5));
  const auto rep = compose_pipeline(SpaceSpec::lp(2.0), family, [](long) { return 1.0; }, 512, Field::Real);
  CHECK(rep.ok);
  CHECK(rep.stage == "tail_sum");
  REQUIRE(rep.plus);
  REQUIRE(rep.minus);
  REQUIRE(rep.symmetric);
  CHECK(rep.symmetric->bilateral());
  REQUIRE(rep.certificate);
  CHECK(rep.certificate->verdict == Verdict::Pass);
  for (long n = -40; n <= 40; ++n)
    CHECK((*rep.symmetric)(n) == std::min(rep.plus->delta(std::labs(n)), rep.minus->delta(std::labs(n))));
}

TEST_CASE("pipeline reports a non-divergent delta") {
  const auto rep = compose_pipeline(SpaceSpec::lp(1.0), kIdentityShift, geometric, 512, Field::Real);
  CHECK_FALSE(rep.ok);
  CHECK(rep.stage == "symmetrize");
  CHECK(rep.message.find("not certified divergent") != std::string::npos);
  CHECK_FALSE(rep.density);
}
