#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fhc/error.hpp"
#include "fhc/fhc_construction.hpp"
#include "fhc/u_family.hpp"

using namespace fhc;

namespace {

const SpaceSpec kL2 = SpaceSpec::lp(2.0);
const WeightSequence kRolewicz = WeightSequence::constant(2.0);

std::string key(const TruncatedVector& v) {
  const auto t = v.trimmed();
  std::string s = std::to_string(t.lo()) + ":";
  for (const auto& c : t.coeffs()) s += std::to_string(c.real()) + ",";
  return s;
}

}  // namespace

TEST_CASE("dense enumeration fixed points") {
  CHECK(enumerate_dense(kL2, 1).is_zero());
  CHECK(enumerate_dense(kL2, 2).equals(TruncatedVector::unit(0, 1.0)));
  CHECK(enumerate_dense(kL2, 3).equals(TruncatedVector::unit(0, -1.0)));
  CHECK(enumerate_dense(kL2, 8).equals(TruncatedVector::unit(1, 1.0)));
  CHECK_THROWS_AS(enumerate_dense(kL2, 0), InvalidArgument);
  CHECK(dense_index(kL2, TruncatedVector::zeros(0, 3)) == 1);
}

TEST_CASE("dense enumeration is injective on a prefix") {
  std::set<std::string> seen;
  for (long i = 1; i <= 3000; ++i) {
    const auto v = enumerate_dense(kL2, i);
    CHECK(seen.insert(key(v)).second);
    CHECK(dense_index(kL2, v) == i);
  }
}

TEST_CASE("random dyadic vectors appear in the enumeration") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> len(1, 4), num(-6, 6), level(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = len(rng), d = level(rng);
    std::vector<Scalar> c;
    for (int i = 0; i < s; ++i) c.emplace_back(std::ldexp(static_cast<double>(num(rng)), -d));
    const TruncatedVector v(0, c);
    const long idx = dense_index(kL2, v);
    CHECK(idx >= 1);
    CHECK(enumerate_dense(kL2, idx).trimmed().equals(v.trimmed()));
  }
  CHECK_THROWS_AS(dense_index(kL2, TruncatedVector::unit(0, 0.3)), InvalidArgument);
  CHECK_THROWS_AS(dense_index(kL2, TruncatedVector::unit(-1, 1.0)), InvalidArgument);
}

TEST_CASE("choose_a examples") {
  const auto zero = choose_a(kL2, kRolewicz, TruncatedVector::zeros(0, 0), 3);
  CHECK(zero.a == 1.0);
  CHECK(zero.ok);

  const auto e0 = choose_a(kL2, kRolewicz, TruncatedVector::unit(0, 1.0), 1);
  CHECK(e0.ok);
  CHECK(e0.s_sum == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(e0.t_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e0.a == doctest::Approx(0.25).epsilon(1e-9));
  for (long k = 1; k <= 6; ++k) {
    const double a1 = choose_a(kL2, kRolewicz, TruncatedVector::unit(0, 1.0), k).a;
    const double a2 = choose_a(kL2, kRolewicz, TruncatedVector::unit(0, 2.0), k).a;
    CHECK(a2 == doctest::Approx(a1 / 2.0).epsilon(1e-9));
  }
  // a growing forward orbit has no certificate
  const auto bad = choose_a(kL2, WeightSequence::constant(0.5), TruncatedVector::unit(0, 1.0), 1);
  CHECK_FALSE(bad.ok);
}

TEST_CASE("choose_n examples") {
  const auto x = TruncatedVector::unit(0, 1.0);
  const double a = choose_a(kL2, kRolewicz, x, 1).a;
  CHECK(choose_n(kL2, kRolewicz, {}, x, a, 1) == 1);

  FhcBlock first{1, 2, x, choose_a(kL2, kRolewicz, x, 1), 4, 0.0};
  CHECK(choose_n(kL2, kRolewicz, {first}, TruncatedVector::zeros(0, 0), 1.0, 2) == 5);
  CHECK_THROWS_AS(choose_n(kL2, kRolewicz, {first}, x, a, 2, 3), HorizonExhausted);
}

TEST_CASE("Rolewicz construction with five blocks") {
  const auto c = FhcConstruction::assemble(kL2, kRolewicz, 5);
  REQUIRE(c.blocks().size() == 5);
  CHECK(c.checks().ledger_holds);
  for (const auto& row : c.ledger()) {
    CHECK(row.holds);
    if (row.check == "approximation") CHECK(row.lhs < row.bound);
    else CHECK(row.lhs <= row.bound);
  }
  for (std::size_t i = 1; i < c.blocks().size(); ++i) CHECK(c.blocks()[i].n > c.blocks()[i - 1].n);
  for (const auto& b : c.blocks()) {
    CHECK(b.a.a > 0.0);
    CHECK(b.a.a <= 1.0);
    CHECK(b.s_norm <= std::ldexp(1.0, -static_cast<int>(b.k)));
  }

  CHECK(c.u(0).equals(c.x()));
  for (long n = -3; n <= 3; ++n) CHECK(relative_difference(apply_shift(kRolewicz, c.u(n), 1), c.u(n - 1)) < 1e-10);
  CHECK(c.checks().orbit_residual < 1e-10);

  double geometric = 0.0;
  for (const auto& b : c.blocks()) geometric += std::ldexp(1.0, -static_cast<int>(b.k));
  CHECK(c.checks().plus_verdict == Verdict::Pass);
  CHECK(c.checks().majorant_plus <= geometric + 1e-12);
  CHECK(std::isfinite(c.checks().majorant_minus));

  // every block's target is approximated by a scaled orbit point of x
  for (const auto& b : c.blocks()) {
    auto y = apply_shift(kRolewicz, c.x(), b.n);
    y *= 1.0 / b.a.a;
    CHECK(fnorm(kL2, y - b.x) < std::ldexp(1.0, -static_cast<int>(b.k)));
  }
}

TEST_CASE("eight blocks and the u-family view") {
  const auto c = std::make_shared<const FhcConstruction>(FhcConstruction::assemble(kL2, kRolewicz, 8));
  CHECK(c->checks().ledger_holds);
  CHECK(c->blocks().size() == 8);
  const auto fam = UFamily::fhc(c);
  CHECK(fam.kind() == FamilyKind::FhcCriterion);
  CHECK_FALSE(fam.diagonal());
  for (long n = -3; n <= 3; ++n) CHECK(relative_difference(fam.apply_operator(fam.u(n)), fam.u(n - 1)) < 1e-10);
}

TEST_CASE("construction scope") {
  CHECK_THROWS_AS(FhcConstruction::assemble(SpaceSpec::c0(), kRolewicz, 3), InvalidArgument);
  CHECK_THROWS_AS(FhcConstruction::assemble(kL2, WeightSequence::two_sided(2.0, 0.5), 3), InvalidArgument);
  CHECK_THROWS_AS(FhcConstruction::assemble(kL2, kRolewicz, 0), InvalidArgument);
  const auto l1 = FhcConstruction::assemble(SpaceSpec::lp(1.0), WeightSequence::constant(3.0), 4);
  CHECK(l1.checks().ledger_holds);
}
