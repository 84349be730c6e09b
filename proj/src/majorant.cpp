#include "fhc/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhc/error.hpp"

namespace fhc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

MajorantSeries::MajorantSeries(const SpaceSpec& space, const UFamily& family, std::function<double(long)> coeff_abs,
                               long horizon, Side side)
    : space_(space), diagonal_(family.diagonal()), sup_mode_(space.is_c0() && family.diagonal()), horizon_(horizon),
      side_(side) {
  if (horizon < kMinClassifierHorizon) throw InvalidArgument("majorant needs horizon >= 16");
  if (side != Side::Positive && !family.bilateral_index() && family.kind() != FamilyKind::Zero)
    side_ = Side::Positive;
  if (space.is_lp() && diagonal_) p_ = space.p();
  if (family.max_index() < horizon) throw InvalidArgument("family is not available up to the majorant horizon");

  const std::vector<double> radii = space.is_holomorphic() ? space.radii() : std::vector<double>{};
  const std::size_t ncomp = radii.empty() ? 1 : radii.size();
  comps_.assign(ncomp, Component{});

  // log of the per-component term magnitude at index n
  auto log_terms_at = [&](long n, std::vector<double>& out) {
    const double lc = safe_log(coeff_abs(n));
    if (lc == kNegInf) {
      std::fill(out.begin(), out.end(), kNegInf);
      return;
    }
    if (diagonal_) {
      const double ls = family.log_scale(n);
      if (radii.empty()) {
        out[0] = p_ * (lc + ls);
      } else {
        for (std::size_t c = 0; c < ncomp; ++c) out[c] = lc + ls + static_cast<double>(n) * std::log(radii[c]);
      }
      return;
    }
    const TruncatedVector u = family.u(n);
    if (radii.empty()) {
      out[0] = lc + safe_log(fnorm(space, u));
    } else {
      for (std::size_t c = 0; c < ncomp; ++c) out[c] = lc + safe_log(seminorm_majorant(space, u, radii[c]));
    }
  };

  auto build_side = [&](int sgn) {
    std::vector<std::vector<double>> L(ncomp, std::vector<double>(static_cast<std::size_t>(horizon + 1), kNegInf));
    std::vector<double> tmp(ncomp);
    for (long k = (sgn > 0 ? 0 : 1); k <= horizon; ++k) {
      log_terms_at(sgn * k, tmp);
      for (std::size_t c = 0; c < ncomp; ++c) L[c][static_cast<std::size_t>(k)] = tmp[c];
    }
    for (std::size_t c = 0; c < ncomp; ++c) {
      const TailClass tc = sup_mode_ ? classify_decay(L[c], 0) : classify_tail(L[c], 0);
      if (tc.verdict != Verdict::Pass) {
        if (verdict_ == Verdict::Pass || tc.verdict == Verdict::Fail) verdict_ = tc.verdict;
        if (rule_.empty()) rule_ = tc.rule;
      }
      std::vector<double> s(static_cast<std::size_t>(horizon + 2), 0.0), raw(static_cast<std::size_t>(horizon + 1));
      for (long k = horizon; k >= 0; --k) {
        const double t = std::exp(L[c][static_cast<std::size_t>(k)]);
        raw[static_cast<std::size_t>(k)] = t;
        s[static_cast<std::size_t>(k)] = sup_mode_ ? std::max(t, s[static_cast<std::size_t>(k + 1)]) : t + s[static_cast<std::size_t>(k + 1)];
      }
      if (sgn > 0) comps_[c].terms_pos = std::move(raw);
      const double rem = tc.verdict == Verdict::Pass ? tc.tail_bound : std::numeric_limits<double>::infinity();
      if (sgn > 0) {
        comps_[c].suffix_pos = std::move(s);
        comps_[c].rem_pos = rem;
      } else {
        comps_[c].suffix_neg = std::move(s);
        comps_[c].rem_neg = rem;
      }
    }
  };

  if (side_ != Side::Negative) build_side(1);
  if (side_ != Side::Positive) build_side(-1);
  if (rule_.empty()) rule_ = "certified";
}

double MajorantSeries::suffix(const std::vector<double>& s, long k) const {
  if (s.empty() || k > horizon_) return 0.0;
  return s[static_cast<std::size_t>(std::max(0L, k))];
}

double MajorantSeries::combine(const std::vector<double>& v) const {
  if (space_.is_holomorphic()) return combine_seminorms(v);
  if (sup_mode_) return v[0];
  if (space_.is_lp() && diagonal_) return std::pow(v[0], 1.0 / p_);
  return v[0];
}

double MajorantSeries::tail(long N) const {
  std::vector<double> per(comps_.size());
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    const auto& comp = comps_[c];
    double pos = 0.0, neg = 0.0;
    if (side_ != Side::Negative) {
      pos = sup_mode_ ? std::max(suffix(comp.suffix_pos, N + 1), comp.rem_pos) : suffix(comp.suffix_pos, N + 1) + comp.rem_pos;
    }
    if (side_ != Side::Positive) {
      neg = sup_mode_ ? std::max(suffix(comp.suffix_neg, N + 1), comp.rem_neg) : suffix(comp.suffix_neg, N + 1) + comp.rem_neg;
    }
    per[c] = sup_mode_ ? std::max(pos, neg) : pos + neg;
  }
  return combine(per);
}

double MajorantSeries::block(long from, long to) const {
  if (side_ == Side::Negative) throw InvalidArgument("block majorant is defined on the positive side");
  std::vector<double> per(comps_.size());
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    const auto& t = comps_[c].terms_pos;
    double acc = 0.0;
    for (long k = std::max(0L, from + 1); k <= std::min(to, horizon_); ++k)
      acc = sup_mode_ ? std::max(acc, t[static_cast<std::size_t>(k)]) : acc + t[static_cast<std::size_t>(k)];
    per[c] = acc;
  }
  return combine(per);
}

double MajorantSeries::remainder() const {
  std::vector<double> per(comps_.size());
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    const double a = side_ != Side::Negative ? comps_[c].rem_pos : 0.0;
    const double b = side_ != Side::Positive ? comps_[c].rem_neg : 0.0;
    per[c] = sup_mode_ ? std::max(a, b) : a + b;
  }
  return combine(per);
}

}  // namespace fhc
