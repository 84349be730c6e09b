#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fhc/error.hpp"
#include "fhc/random_vectors.hpp"

using namespace fhc;

namespace {

std::shared_ptr<const UFamily> share(UFamily f) { return std::make_shared<const UFamily>(std::move(f)); }

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

const auto kLinear = share(UFamily::shift(WeightSequence::linear()));
const auto kRemark = share(UFamily::shift(WeightSequence::two_sided(2.0, 0.5)));

}  // namespace

TEST_CASE("u-family examples") {
  CHECK(kLinear->u(3).equals(TruncatedVector::unit(3, 1.0 / 6.0)));
  for (long n = -5; n < 0; ++n) CHECK(kLinear->u(n).is_zero());
  CHECK(kRemark->u(-2).equals(TruncatedVector::unit(-2, 0.25)));

  const auto poly = UFamily::polynomial(WeightSequence::constant(1.0), PolynomialSpec({1.0, 1.0}), 10);
  const auto u2 = poly.u(2);
  CHECK(std::abs(u2.at(2) - Scalar{1.0}) < 1e-12);
  CHECK(std::abs(u2.at(1) - Scalar{-1.0}) < 1e-12);
  for (long n = 1; n <= 10; ++n) CHECK(relative_difference(poly.apply_operator(poly.u(n)), poly.u(n - 1)) < 1e-10);
  CHECK(poly.apply_operator(poly.u(0)).is_zero());
}

TEST_CASE("backward orbit identity for shift families") {
  for (const auto& f : {kLinear, kRemark})
    for (long n = f->bilateral_index() ? -20 : 1; n <= 20; ++n)
      CHECK(f->apply_operator(f->u(n)).equals(f->u(n - 1)));
}

TEST_CASE("certificates gate the shift families") {
  CHECK_NOTHROW(certified(UFamily::shift(WeightSequence::linear()), SpaceSpec::lp(2.0), false));
  CHECK_THROWS_AS(certified(UFamily::shift(WeightSequence::constant(1.0)), SpaceSpec::lp(2.0), false),
                  CertificateError);
  const auto waived = certified(UFamily::shift(WeightSequence::constant(1.0)), SpaceSpec::lp(2.0), true);
  CHECK(waived.waived);
}

TEST_CASE("the zero family assembles to zero") {
  const auto zero = share(UFamily::zero());
  const auto s = sample_vector(SpaceSpec::lp(2.0), zero, make_gaussian(0.0, 1.0), 30, nullptr, 5);
  CHECK(s.assembled.is_zero());
  CHECK_FALSE(s.tail_certificate);
}

TEST_CASE("assembled coefficients re-derive from the stream") {
  const auto s = sample_vector(SpaceSpec::lp(2.0), kLinear, make_gaussian(0.0, 1.0), 50, nullptr, 99);
  CHECK(s.lo == 0);
  CHECK(s.hi == 50);
  for (long n = 0; n <= 50; ++n) {
    const double expected = s.x(n).real() / std::exp(std::lgamma(static_cast<double>(n) + 1.0));
    CHECK(s.assembled.at(n).real() == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto again = sample_vector(SpaceSpec::lp(2.0), kLinear, make_gaussian(0.0, 1.0), 50, nullptr, 99);
  CHECK(again.X == s.X);
  const auto other = sample_vector(SpaceSpec::lp(2.0), kLinear, make_gaussian(0.0, 1.0), 50, nullptr, 99, 1);
  CHECK(other.X != s.X);
}

TEST_CASE("tail certificate on the bilateral shift") {
  const auto delta = DeltaSequence::linear(1.0, 1.0, true);
  const auto rho = build_annulus_density(delta.naturals(), Field::Real);
  const auto s = sample_vector(SpaceSpec::lp(2.0), kRemark, rho, 40, &delta, 3);
  REQUIRE(s.tail_certificate);
  double plain = 0.0, sq = 0.0;
  for (long n = 41; n < 400; ++n) {
    const double t = (n + 1.0) * std::ldexp(1.0, -static_cast<int>(n));
    plain += 2.0 * t;
    sq += 2.0 * t * t;
  }
  CHECK(*s.tail_certificate <= plain);
  CHECK(*s.tail_certificate >= std::sqrt(sq) * (1.0 - 1e-9));
  CHECK(s.lo == -40);
  CHECK(s.hi == 40);
}

TEST_CASE("orbit coefficients") {
  const auto s = sample_vector(SpaceSpec::lp(2.0), kLinear, make_gaussian(0.0, 1.0), 50, nullptr, 17);
  CHECK(orbit_coefficients(s, 0).equals(s.assembled));
  const auto o3 = orbit_coefficients(s, 3);
  for (long j = 0; j <= 47; ++j) {
    const double expected = s.x(j + 3).real() / std::exp(std::lgamma(static_cast<double>(j) + 1.0));
    CHECK(o3.at(j).real() == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto shifted = apply_shift(WeightSequence::linear(), s.assembled, 3);
  CHECK(relative_difference(shifted.rewindow(0, 47), o3.rewindow(0, 47)) < 1e-12);
  CHECK_THROWS_AS(orbit_coefficients(s, 51), OrbitHorizonExceeded);
  CHECK_NOTHROW(orbit_coefficients(s, 50));
}

TEST_CASE("orbits match repeated shifts exactly for dyadic weights") {
  const auto w = WeightSequence::two_sided(2.0, 0.5);
  const auto rho = build_annulus_density(DeltaSequence::linear(1.0, 1.0), Field::Real);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_vector(SpaceSpec::lp(2.0), kRemark, rho, 30, nullptr, seed);
    TruncatedVector v = s.assembled;
    for (long m = 1; m <= 10; ++m) {
      v = apply_shift(w, v, 1);
      const auto o = orbit_coefficients(s, m);
      CHECK(v.rewindow(-30, 30 - m).equals(o.rewindow(-30, 30 - m)));
    }
  }
}

TEST_CASE("shifted streams are distributed like the original") {
  const auto space = SpaceSpec::lp(2.0);
  const auto family = share(UFamily::shift(WeightSequence::constant(2.0)));
  const auto law = make_gaussian(0.0, 1.0);
  const long reps = 10000, m = 7;
  std::vector<double> a, b;
  for (long r = 0; r < reps; ++r) {
    a.push_back(fnorm(space, sample_vector(space, family, law, 20, nullptr, 1, r).assembled));
    const auto s = sample_vector(space, family, law, 20, nullptr, 1, reps + r, m);
    b.push_back(fnorm(space, orbit_coefficients(s, m)));
  }
  CHECK(ks_statistic(a, b) < 1.36 * std::sqrt(2.0 / reps));
}

TEST_CASE("product factor") {
  const auto delta = DeltaSequence::linear(1.0, 1.0);
  const auto rho = build_annulus_density(delta, Field::Real);
  double lv = 0.0, tol = 0.0;
  product_factor(rho, delta, 3, 2048, false, lv, tol);
  double ref = 0.0;
  for (int n = 4; n < 1100; ++n) ref += std::log1p(-std::ldexp(1.0, -(n + 1)));
  CHECK(std::abs(lv - ref) < 1e-12);
  CHECK(tol < 1e-12);
  product_factor(rho, delta, 2048, 2048, false, lv, tol);
  CHECK(lv == 0.0);
}

TEST_CASE("ball probability lower bound against direct simulation") {
  const auto space = SpaceSpec::lp(2.0);
  const auto family = share(UFamily::shift(WeightSequence::constant(2.0)));
  const auto delta = DeltaSequence::linear(1.0, 1.0);
  const DistributionSpec rho = build_annulus_density(delta, Field::Real);
  const std::vector<TruncatedVector> targets{TruncatedVector::zeros(0, 0), TruncatedVector::unit(0, 0.5),
                                             TruncatedVector::unit(0, -0.5), TruncatedVector::unit(1, 0.3),
                                             TruncatedVector(0, {0.4, -0.2})};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto bb = ball_probability_lower_bound(space, family, rho, delta, targets[i], 1.0, 1, 20000, 10 + i,
                                                 kernels::Exec::Serial);
    CHECK(bb.majorant_tail < 0.5);
    CHECK(bb.product_factor > 0.0);
    CHECK(bb.product_factor <= 1.0);
    CHECK(bb.pB > 0.0);
    CHECK(bb.lower_bound > 0.0);
    const auto direct =
        ball_probability_direct(space, family, rho, targets[i], 1.0, bb.N + 64, 20000, 100 + i, kernels::Exec::Serial);
    CHECK(direct.p >= bb.lower_bound - 3.0 * (direct.stderr_ + bb.pB_stderr * bb.product_factor));
  }
  CHECK_THROWS_AS(ball_probability_lower_bound(space, family, rho, DeltaSequence::constant(2.0), targets[0], 1.0, 1,
                                               100, 0, kernels::Exec::Serial),
                  CertificateError);
}
