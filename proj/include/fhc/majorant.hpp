#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fhc/series.hpp"
#include "fhc/space.hpp"
#include "fhc/u_family.hpp"

namespace fhc {

enum class Side { Positive, Negative, Both };

/// Worst case over |alpha_n| <= 1 of the F-norm of sum alpha_n c_n u_n
/// restricted to index sets, using nonnegative per-component majorants.
/// Diagonal families are exact componentwise; other families go through the
/// triangle inequality, term by term.
class MajorantSeries {
 public:
  MajorantSeries(const SpaceSpec& space, const UFamily& family, std::function<double(long)> coeff_abs, long horizon,
                 Side side = Side::Positive);

  /// Pass iff every component's remainder past the horizon is certified.
  Verdict verdict() const { return verdict_; }
  const std::string& rule() const { return rule_; }
  long horizon() const { return horizon_; }

  /// Majorant over |n| > N on the configured side(s), remainder included.
  double tail(long N) const;
  /// Majorant over positive indices n in (from, to], no remainder.
  double block(long from, long to) const;
  /// Remainder part of tail(N) (past the horizon).
  double remainder() const;

 private:
  struct Component {
    std::vector<double> suffix_pos, suffix_neg;  // suffix sums (or maxima) over |n| = k..H
    std::vector<double> terms_pos;
    double rem_pos = 0.0, rem_neg = 0.0;
  };
  double combine(const std::vector<double>& per_component) const;
  double suffix(const std::vector<double>& s, long k) const;

  SpaceSpec space_;
  bool diagonal_;
  bool sup_mode_;  // c0 with a diagonal family
  double p_ = 1.0;
  long horizon_;
  Side side_;
  std::vector<Component> comps_;
  Verdict verdict_ = Verdict::Pass;
  std::string rule_;
};

}  // namespace fhc
