#include "fhc/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fhc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nidx(long first, std::size_t i) { return static_cast<double>(first + static_cast<long>(i)); }

struct Segment {
  std::size_t begin = 0, mid = 0, last = 0;  // trailing half [begin, last], last term finite
  bool empty = true;
};

Segment trailing_half(std::span<const double> L) {
  Segment s;
  s.begin = (L.size() - 1) / 2;
  std::size_t last = L.size();
  while (last > s.begin && L[last - 1] == -kInf) --last;
  if (last == s.begin) return s;
  s.last = last - 1;
  s.mid = s.begin + (s.last - s.begin) / 2;
  s.empty = s.last <= s.begin + 3;
  return s;
}

double partial_sum(std::span<const double> L) {
  double sum = 0.0;
  for (double l : L) sum += std::exp(l);
  return sum;
}

TailClass make(Verdict v, std::string rule, double partial, double tail, double rate) {
  return TailClass{v, std::move(rule), partial, tail, rate};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

TailClass classify_tail(std::span<const double> L, long first) {
  const double partial = partial_sum(L);
  if (static_cast<long>(L.size()) < kMinClassifierHorizon)
    return make(Verdict::Inconclusive, "horizon-too-short", partial, kInf, 0.0);

  const Segment seg = trailing_half(L);
  if (std::all_of(L.begin() + static_cast<std::ptrdiff_t>(seg.begin), L.end(), [](double l) { return l == -kInf; }))
    return make(Verdict::Pass, "finite-support", partial, 0.0, 0.0);

  const bool dense = std::none_of(L.begin() + static_cast<std::ptrdiff_t>(seg.begin), L.end(),
                                  [](double l) { return l == -kInf; });
  if (dense) {
    const double ref = L[seg.begin];
    const double lowest = *std::min_element(L.begin() + static_cast<std::ptrdiff_t>(seg.begin), L.end());
    if (lowest >= ref - 1e-12) return make(Verdict::Fail, "terms-do-not-decay", partial, kInf, 0.0);
  }
  if (seg.empty) return make(Verdict::Inconclusive, "too-few-trailing-terms", partial, kInf, 0.0);

  // suffix-max envelope over the trailing segment
  std::vector<double> E(seg.last + 1, -kInf);
  E[seg.last] = L[seg.last];
  for (std::size_t i = seg.last; i-- > seg.begin;) E[i] = std::max(L[i], E[i + 1]);
  const double a_last = std::exp(E[seg.last]);
  const double n_last = nidx(first, seg.last);

  auto max_step = [&](std::size_t from, std::size_t to) {
    double m = -kInf;
    for (std::size_t i = from; i < to; ++i) m = std::max(m, E[i + 1] - E[i]);
    return m;
  };
  const double q3 = max_step(seg.begin, seg.mid), q4 = max_step(seg.mid, seg.last);
  if (q4 < std::log1p(-1e-3) && q4 <= q3 + 1e-9) {
    const double rho = std::exp(q4);
    return make(Verdict::Pass, "geometric", partial, a_last * rho / (1.0 - rho), rho);
  }

  const double n_begin = nidx(first, seg.begin), n_mid = nidx(first, seg.mid);
  if (n_begin >= 3.0) {
    const double s_early = -(E[seg.mid] - E[seg.begin]) / (std::log(n_mid) - std::log(n_begin));
    const double s_late = -(E[seg.last] - E[seg.mid]) / (std::log(n_last) - std::log(n_mid));
    if (s_late > 1.05 && s_late >= s_early - 1e-6)
      return make(Verdict::Pass, "power-law", partial, a_last * n_last / (s_late - 1.0), s_late);

    auto b = [&](std::size_t i) { return E[i] + std::log(nidx(first, i)); };
    auto ll = [](double n) { return std::log(std::log(n)); };
    const double q_early = -(b(seg.mid) - b(seg.begin)) / (ll(n_mid) - ll(n_begin));
    const double q_late = -(b(seg.last) - b(seg.mid)) / (ll(n_last) - ll(n_mid));
    if (q_late > 1.05 && q_late >= q_early - 1e-6)
      return make(Verdict::Pass, "log-power-law", partial,
                  std::exp(b(seg.last)) * std::log(n_last) / (q_late - 1.0), q_late);

    if (dense) {
      auto c = [&](std::size_t i) {
        const double n = nidx(first, i);
        return L[i] + std::log(n) + std::log(std::log(n));
      };
      const double ref = c(seg.begin);
      bool below = false;
      for (std::size_t i = seg.begin; i < L.size() && !below; ++i) below = c(i) < ref - 1e-9;
      if (!below) return make(Verdict::Fail, "terms-dominate-1/(n log n)", partial, kInf, q_late);
    }
  }
  return make(Verdict::Inconclusive, "no-rule-applies", partial, kInf, 0.0);
}

TailClass classify_decay(std::span<const double> L, long first) {
  (void)first;
  const double sup_all = L.empty() ? -kInf : *std::max_element(L.begin(), L.end());
  const double partial = std::exp(sup_all);
  if (static_cast<long>(L.size()) < kMinClassifierHorizon)
    return make(Verdict::Inconclusive, "horizon-too-short", partial, kInf, 0.0);
  const Segment seg = trailing_half(L);
  if (std::all_of(L.begin() + static_cast<std::ptrdiff_t>(seg.begin), L.end(), [](double l) { return l == -kInf; }))
    return make(Verdict::Pass, "finite-support", partial, 0.0, 0.0);
  const std::size_t q = seg.begin + (L.size() - seg.begin) / 2;
  const double third = *std::max_element(L.begin() + static_cast<std::ptrdiff_t>(seg.begin), L.begin() + static_cast<std::ptrdiff_t>(q));
  const double fourth = *std::max_element(L.begin() + static_cast<std::ptrdiff_t>(q), L.end());
  if (fourth < third - 1e-12) return make(Verdict::Pass, "decaying-envelope", partial, std::exp(fourth), fourth - third);
  return make(Verdict::Fail, "terms-do-not-decay", partial, kInf, fourth - third);
}

}  // namespace fhc
