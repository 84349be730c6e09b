#include <doctest.h>

#include <cmath>
#include <random>

#include "fhc/error.hpp"
#include "fhc/space.hpp"

using namespace fhc;

namespace {

TruncatedVector random_vector(std::mt19937_64& rng, long lo, long len, bool complex_entries = false) {
  std::normal_distribution<double> g;
  std::vector<Scalar> c(static_cast<std::size_t>(len));
  for (auto& z : c) z = complex_entries ? Scalar(g(rng), g(rng)) : Scalar(g(rng), 0.0);
  return TruncatedVector(lo, c);
}

}  // namespace

TEST_CASE("space factories validate their parameters") {
  CHECK_THROWS_AS(SpaceSpec::lp(0.5), InvalidArgument);
  CHECK_THROWS_AS(SpaceSpec::lp(INFINITY), InvalidArgument);
  CHECK_NOTHROW(SpaceSpec::lp(1.0));
  CHECK_THROWS_AS(SpaceSpec::entire(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(SpaceSpec::entire({2.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(SpaceSpec::disk(1.0, {0.5, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(SpaceSpec::disk(-1.0), InvalidArgument);

  const auto d = SpaceSpec::disk(2.0);
  REQUIRE(d.radii().size() == 8);
  CHECK(d.radii().front() == doctest::Approx(1.0));
  CHECK(d.radii().back() < 2.0);
  CHECK(SpaceSpec::entire().radii() == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK_FALSE(SpaceSpec::entire().allows_bilateral());
  CHECK(SpaceSpec::c0().allows_bilateral());
}

TEST_CASE("fnorm on the worked examples") {
  const auto l2 = SpaceSpec::lp(2.0);
  CHECK(fnorm(l2, TruncatedVector::unit(0)) == 1.0);
  TruncatedVector v = TruncatedVector::zeros(0, 7);
  v.ref(2) = 3.0;
  v.ref(7) = 4.0;
  CHECK(fnorm(l2, v) == 5.0);

  const auto h = SpaceSpec::entire({1.0, 2.0});
  CHECK(fnorm(h, TruncatedVector::unit(3)) == doctest::Approx(0.5 * 0.5 + 0.25 * 8.0 / 9.0).epsilon(1e-15));
  CHECK(fnorm(h, TruncatedVector::unit(3)) == doctest::Approx(0.47222).epsilon(1e-5));

  CHECK(fnorm(SpaceSpec::c0(), TruncatedVector::real(-2, std::vector<double>{1, -7, 3})) == 7.0);
  CHECK(fnorm(l2, TruncatedVector::zeros(-3, 3)) == 0.0);
}

TEST_CASE("fnorm rejects illegal vectors") {
  TruncatedVector v = TruncatedVector::unit(0, NAN);
  CHECK_THROWS_AS(fnorm(SpaceSpec::lp(2.0), v), InvalidArgument);
  CHECK_THROWS_AS(fnorm(SpaceSpec::entire(), TruncatedVector::unit(-1)), InvalidArgument);
  CHECK_NOTHROW(fnorm(SpaceSpec::lp(2.0), TruncatedVector::unit(-1)));
}

TEST_CASE("seminorm majorant") {
  const auto h = SpaceSpec::entire();
  CHECK(seminorm_majorant(h, TruncatedVector::unit(0), 5.0) == 1.0);
  CHECK(seminorm_majorant(h, TruncatedVector::unit(3), 2.0) == 8.0);
  CHECK(seminorm_majorant(SpaceSpec::disk(1.0), TruncatedVector::real(0, std::vector<double>{1, 1}), 0.5) == 1.5);
  CHECK_THROWS_AS(seminorm_majorant(SpaceSpec::disk(1.0), TruncatedVector::unit(0), 1.0), InvalidArgument);
  CHECK_THROWS_AS(seminorm_majorant(SpaceSpec::lp(2.0), TruncatedVector::unit(0), 1.0), InvalidArgument);

  std::mt19937_64 rng(7);
  const auto v = random_vector(rng, 0, 30);
  double prev = 0.0;
  for (double r = 0.1; r < 10.0; r *= 1.3) {
    const double q = seminorm_majorant(h, v, r);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("seminorm majorant survives large radius powers") {
  const auto h = SpaceSpec::entire({1.0, 8.0});
  TruncatedVector v = TruncatedVector::unit(400, 1e-300);
  const double q = seminorm_majorant(h, v, 8.0);
  CHECK(std::isfinite(q));
  CHECK(std::log(q) == doctest::Approx(std::log(1e-300) + 400 * std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("distance") {
  const auto l2 = SpaceSpec::lp(2.0);
  std::mt19937_64 rng(3);
  const auto v = random_vector(rng, -4, 9);
  CHECK(distance(l2, v, v) == 0.0);
  CHECK(distance(l2, TruncatedVector::unit(0), TruncatedVector::unit(1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(distance(SpaceSpec::c0(), TruncatedVector::unit(3, 2.0), TruncatedVector::unit(3, 5.0)) == 3.0);
  const auto u = random_vector(rng, 0, 5);
  CHECK(distance(l2, u, v) == distance(l2, v, u));
}

TEST_CASE("tail norm") {
  const auto l2 = SpaceSpec::lp(2.0);
  TruncatedVector v = TruncatedVector::zeros(0, 5);
  v.ref(0) = 1.0;
  v.ref(5) = 1.0;
  CHECK(tail_norm(l2, v, 3) == 1.0);
  CHECK(tail_norm(l2, TruncatedVector::unit(0), 0) == 0.0);

  const auto h = SpaceSpec::entire({1.0});
  TruncatedVector w = TruncatedVector::zeros(0, 9);
  w.ref(2) = 1.0;
  w.ref(9) = 1.0;
  CHECK(tail_norm(h, w, 5) == fnorm(h, TruncatedVector::unit(9)));

  std::mt19937_64 rng(11);
  const auto r = random_vector(rng, -6, 13);
  CHECK(tail_norm(l2, r, 6) == 0.0);
}

TEST_CASE("truncated vector windows") {
  const auto v = TruncatedVector::real(2, std::vector<double>{0, 1, 2, 0});
  CHECK(v.at(1) == Scalar{0.0});
  CHECK(v.at(3) == Scalar{1.0});
  CHECK(v.trimmed().lo() == 3);
  CHECK(v.trimmed().hi() == 4);
  const auto w = v.rewindow(-1, 3);
  CHECK(w.size() == 5);
  CHECK(w.at(3) == Scalar{1.0});
  CHECK(w.at(4) == Scalar{0.0});
  CHECK_THROWS_AS(TruncatedVector::zeros(3, 2), InvalidArgument);
  CHECK((v + TruncatedVector::unit(-2)).lo() == -2);
  CHECK(v.equals(v.rewindow(0, 10)));
}

TEST_CASE("property: triangle inequality and subhomogeneity") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> alpha(-20.0, 20.0);
  const std::vector<SpaceSpec> spaces{SpaceSpec::lp(1.0), SpaceSpec::lp(2.0), SpaceSpec::lp(3.5), SpaceSpec::c0(),
                                      SpaceSpec::entire(), SpaceSpec::disk(1.5)};
  for (const auto& s : spaces) {
    for (int i = 0; i < 200; ++i) {
      const long lo = s.allows_bilateral() ? -5 : 0;
      const auto u = random_vector(rng, lo, 12, i % 2 == 1);
      const auto v = random_vector(rng, lo + 3, 12);
      const double lhs = fnorm(s, u + v);
      CHECK(lhs <= (fnorm(s, u) + fnorm(s, v)) * (1 + 1e-12));
      const double a = alpha(rng);
      CHECK(fnorm(s, Scalar(a) * u) <= (1 + std::fabs(a)) * fnorm(s, u) * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: lp norm of disjoint parts is the p-mix") {
  for (double p : {1.0, 2.0, 3.0}) {
    const auto s = SpaceSpec::lp(p);
    const auto a = TruncatedVector::real(0, std::vector<double>{1, 2, 0});
    const auto b = TruncatedVector::real(5, std::vector<double>{3, 0, 4});
    const double mix = std::pow(std::pow(fnorm(s, a), p) + std::pow(fnorm(s, b), p), 1.0 / p);
    CHECK(fnorm(s, a + b) == doctest::Approx(mix).epsilon(1e-14));
  }
}

TEST_CASE("lp norm avoids overflow") {
  const auto v = TruncatedVector::real(0, std::vector<double>{1e200, 1e200});
  CHECK(fnorm(SpaceSpec::lp(2.0), v) == doctest::Approx(std::sqrt(2.0) * 1e200));
  CHECK(fnorm(SpaceSpec::lp(3.0), v) == doctest::Approx(std::cbrt(2.0) * 1e200));
}

TEST_CASE("combine_seminorms stays below one") {
  const std::vector<double> q{INFINITY, INFINITY, INFINITY};
  CHECK(combine_seminorms(q) == 0.875);
  CHECK(combine_seminorms(std::vector<double>{0.0, 0.0}) == 0.0);
}
