#include "fhc/fhc_construction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "fhc/error.hpp"
#include "fhc/series.hpp"

namespace fhc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kCap = std::uint64_t{1} << 63;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a >= kCap - std::min(b, kCap) ? kCap : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kCap / b ? kCap : std::min(a * b, kCap);
}

// Entry classes of the alphabet {-M..M}: state bit 0 = an entry with |m| = M
// was seen, bit 1 = an odd entry was seen.
struct EntryClass {
  std::uint64_t count;
  unsigned bits;
  bool nonzero;
};

std::array<EntryClass, 5> classes(long M) {
  const auto u = [](long v) { return static_cast<std::uint64_t>(v); };
  const bool odd = M % 2 != 0;
  return {{{1, 0u, false},
           {odd ? 2u : 0u, 3u, true},
           {odd ? 0u : 2u, 1u, true},
           {2 * u(M / 2), 2u, true},
           {2 * u((M - 1) / 2), 0u, true}}};
}

unsigned class_bits(long v, long M) {
  const long a = std::labs(v);
  return (a == M ? 1u : 0u) | (a % 2 != 0 ? 2u : 0u);
}

// Completion counts for blocks (s, d, M): table[L][state] is the number of
// ways to fill L more entries so that the block constraints hold and the last
// entry is nonzero.
class Counter {
 public:
  Counter(long s, long d, long M) : d_(d), table_(static_cast<std::size_t>(s + 1)) {
    const auto cls = classes(M);
    for (std::size_t L = 1; L < table_.size(); ++L)
      for (unsigned st = 0; st < 4; ++st) {
        std::uint64_t total = 0;
        for (const EntryClass& c : cls) {
          const unsigned next = st | c.bits;
          const std::uint64_t ways = L == 1 ? (c.nonzero && satisfied(next) ? 1 : 0) : table_[L - 1][next];
          total = sat_add(total, sat_mul(c.count, ways));
        }
        table_[L][st] = total;
      }
  }
  bool satisfied(unsigned st) const { return (st & 1u) && (d_ == 0 || (st & 2u)); }
  unsigned initial() const { return d_ == 0 ? 2u : 0u; }
  std::uint64_t count(std::size_t L, unsigned st) const { return table_[L][st]; }
  // completions after placing a value with class bits `bits` at a position
  // followed by L more entries
  std::uint64_t after(std::size_t L, unsigned st, unsigned bits, bool nonzero) const {
    const unsigned next = st | bits;
    if (L == 0) return nonzero && satisfied(next) ? 1 : 0;
    return table_[L][next];
  }

 private:
  long d_;
  std::vector<std::array<std::uint64_t, 4>> table_;
};

std::uint64_t block_size(long s, long d, long M) {
  if (s == 0) return d == 0 && M == 0 ? 1 : 0;
  if (M == 0) return 0;
  const Counter c(s, d, M);
  return c.count(static_cast<std::size_t>(s), c.initial());
}

long value_of_rank(long r) { return r == 0 ? 0 : (r % 2 != 0 ? (r + 1) / 2 : -r / 2); }
long rank_of_value(long v) { return v > 0 ? 2 * v - 1 : -2 * v; }

void require_real_lp(const SpaceSpec& space) {
  if (!space.is_lp() || space.field() != Field::Real)
    throw InvalidArgument("the criterion construction supports real l^p only, got " + space.name());
}

void require_unilateral(const WeightSequence& w) {
  if (w.bilateral()) throw InvalidArgument("the criterion construction needs a unilateral weight sequence");
}

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf || !std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// log ||S^m x|| on l^p, computed from log beta so that nothing underflows
double log_forward_norm(const SpaceSpec& space, const WeightSequence& w, const TruncatedVector& x, long m) {
  const double p = space.p();
  std::vector<double> terms;
  for (long j = std::max(0L, x.lo()); j <= x.hi(); ++j) {
    const Scalar c = x.at(j);
    if (c == Scalar{0.0}) continue;
    const double l = std::log(std::abs(c)) + w.log_beta(j).log_mag - w.log_beta(j + m).log_mag;
    terms.push_back(p * l);
  }
  return log_sum_exp(terms) / p;
}

double pow2(long k) { return std::ldexp(1.0, static_cast<int>(-k)); }

TruncatedVector partial_assembly(const WeightSequence& w, const std::vector<FhcBlock>& blocks, std::size_t upto) {
  TruncatedVector y;
  for (std::size_t j = 0; j < upto; ++j) {
    if (blocks[j].x.is_zero()) continue;
    y += Scalar(blocks[j].a.a) * apply_forward_shift(w, blocks[j].x, blocks[j].n);
  }
  return y;
}

double approximation_residual(const SpaceSpec& space, const WeightSequence& w, const TruncatedVector& y,
                              const FhcBlock& b) {
  TruncatedVector r = Scalar(1.0 / b.a.a) * apply_shift(w, y, b.n);
  r -= b.x;
  return fnorm(space, r);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense enumeration
// ---------------------------------------------------------------------------

TruncatedVector enumerate_dense(const SpaceSpec& space, long index) {
  require_real_lp(space);
  if (index < 1) throw InvalidArgument("dense enumeration index must be >= 1");
  std::uint64_t rest = static_cast<std::uint64_t>(index - 1);
  for (long h = 0;; ++h) {
    for (long s = 0; s <= h; ++s)
      for (long d = 0; d + s <= h; ++d) {
        const long M = h - s - d;
        const std::uint64_t size = block_size(s, d, M);
        if (rest >= size) {
          rest -= size;
          continue;
        }
        if (s == 0) return TruncatedVector();
        const Counter c(s, d, M);
        std::vector<double> vals(static_cast<std::size_t>(s));
        unsigned st = c.initial();
        for (long i = 0; i < s; ++i) {
          const auto L = static_cast<std::size_t>(s - i - 1);
          for (long r = 0; r <= 2 * M; ++r) {
            const long v = value_of_rank(r);
            const unsigned bits = class_bits(v, M);
            const std::uint64_t ways = c.after(L, st, bits, v != 0);
            if (rest < ways) {
              vals[static_cast<std::size_t>(i)] = std::ldexp(static_cast<double>(v), static_cast<int>(-d));
              st |= bits;
              break;
            }
            rest -= ways;
          }
        }
        return TruncatedVector::real(0, vals);
      }
  }
}

long dense_index(const SpaceSpec& space, const TruncatedVector& v) {
  require_real_lp(space);
  long s = 0;
  for (long n = v.lo(); n <= v.hi(); ++n) {
    const Scalar c = v.at(n);
    if (c == Scalar{0.0}) continue;
    if (n < 0) throw InvalidArgument("dense vectors live on n >= 0");
    if (c.imag() != 0.0 || !std::isfinite(c.real())) throw InvalidArgument("dense vectors are real");
    s = n + 1;
  }
  if (s == 0) return 1;

  long d = 0;
  for (long n = 0; n < s; ++n) {
    const double c = v.at(n).real();
    while (std::ldexp(c, static_cast<int>(d)) != std::floor(std::ldexp(c, static_cast<int>(d)))) {
      if (++d > 1100) throw InvalidArgument("coefficient is not a dyadic rational");
    }
  }
  std::vector<long> m(static_cast<std::size_t>(s));
  long M = 0;
  for (long n = 0; n < s; ++n) {
    const double scaled = std::ldexp(v.at(n).real(), static_cast<int>(d));
    if (std::fabs(scaled) >= 0x1p53) throw InvalidArgument("dyadic numerator too large to enumerate");
    m[static_cast<std::size_t>(n)] = static_cast<long>(scaled);
    M = std::max(M, std::labs(m[static_cast<std::size_t>(n)]));
  }

  const long h = s + d + M;
  std::uint64_t index = 1;
  for (long hh = 0; hh < h; ++hh) {
    for (long ss = 0; ss <= hh; ++ss)
      for (long dd = 0; dd + ss <= hh; ++dd) index = sat_add(index, block_size(ss, dd, hh - ss - dd));
    if (index >= kCap) throw InvalidArgument("dense index overflows");
  }
  for (long ss = 0; ss <= s; ++ss)
    for (long dd = 0; dd + ss <= h; ++dd) {
      if (ss == s && dd == d) break;
      index = sat_add(index, block_size(ss, dd, h - ss - dd));
    }
  const Counter c(s, d, M);
  unsigned st = c.initial();
  for (long i = 0; i < s; ++i) {
    const auto L = static_cast<std::size_t>(s - i - 1);
    const long target = m[static_cast<std::size_t>(i)];
    for (long r = 0; r < rank_of_value(target); ++r) {
      const long val = value_of_rank(r);
      index = sat_add(index, c.after(L, st, class_bits(val, M), val != 0));
    }
    st |= class_bits(target, M);
  }
  if (index >= kCap) throw InvalidArgument("dense index overflows");
  return static_cast<long>(index);
}

// ---------------------------------------------------------------------------
// Block choices
// ---------------------------------------------------------------------------

AChoice choose_a(const SpaceSpec& space, const WeightSequence& w, const TruncatedVector& x, long k, long horizon) {
  require_real_lp(space);
  require_unilateral(w);
  if (k < 1) throw InvalidArgument("block number must be >= 1");
  AChoice out;
  if (x.is_zero()) return out;

  std::vector<double> L(static_cast<std::size_t>(std::max(horizon, kMinClassifierHorizon) + 1));
  for (std::size_t n = 0; n < L.size(); ++n) L[n] = log_forward_norm(space, w, x, static_cast<long>(n));
  const TailClass tc = classify_tail(L, 0);
  out.s_sum = tc.partial_sum + tc.tail_bound;

  for (long n = 0; n <= x.hi(); ++n) out.t_sum += fnorm(space, apply_shift(w, x, n));

  if (tc.verdict != Verdict::Pass || !std::isfinite(out.s_sum)) {
    out.ok = false;
    out.note = "forward series " + to_string(tc.verdict) + " (" + tc.rule + ")";
    out.a = 0.0;
    return out;
  }
  out.a = std::min(1.0, pow2(k) / std::max(out.s_sum, out.t_sum));
  return out;
}

long choose_n(const SpaceSpec& space, const WeightSequence& w, const std::vector<FhcBlock>& built,
              const TruncatedVector& x, double a, long k, long horizon) {
  require_real_lp(space);
  require_unilateral(w);
  if (!(a > 0.0)) throw InvalidArgument("a_k must be positive");
  const long start = built.empty() ? 1 : built.back().n + 1;
  const TruncatedVector y_prev = partial_assembly(w, built, built.size());

  std::string failing = "no candidate in range";
  for (long n = start; n <= horizon; ++n) {
    const TruncatedVector term = x.is_zero() ? TruncatedVector() : Scalar(a) * apply_forward_shift(w, x, n);
    const double s_norm = fnorm(space, term);
    if (s_norm > pow2(k)) {
      failing = "||a_k S^n x_k|| = " + std::to_string(s_norm) + " > 2^-" + std::to_string(k);
      continue;
    }
    const TruncatedVector y = y_prev + term;
    bool ok = true;
    for (std::size_t l = 0; l <= built.size() && ok; ++l) {
      FhcBlock b;
      if (l < built.size()) {
        b = built[l];
      } else {
        b.k = k;
        b.x = x;
        b.a.a = a;
        b.n = n;
      }
      const double res = approximation_residual(space, w, y, b);
      if (!(res < pow2(b.k))) {
        ok = false;
        failing = "approximation residual for l = " + std::to_string(b.k) + " is " + std::to_string(res);
      }
    }
    if (ok) return n;
  }
  throw HorizonExhausted("no n_" + std::to_string(k) + " up to " + std::to_string(horizon) + ": " + failing);
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

FhcConstruction FhcConstruction::assemble(const SpaceSpec& space, const WeightSequence& w, long K, long n_horizon,
                                          long series_horizon) {
  require_real_lp(space);
  require_unilateral(w);
  if (K < 1) throw InvalidArgument("K must be >= 1");
  FhcConstruction c(space, w);
  long index = 1;
  constexpr long kMaxSkips = 256;
  while (static_cast<long>(c.blocks_.size()) < K) {
    const long k = static_cast<long>(c.blocks_.size()) + 1;
    FhcBlock b;
    b.k = k;
    b.index = index;
    b.x = enumerate_dense(space, index++);
    b.a = choose_a(space, w, b.x, k, series_horizon);
    if (!b.a.ok) {
      c.skipped_.push_back("index " + std::to_string(b.index) + ": " + b.a.note);
      if (static_cast<long>(c.skipped_.size()) > kMaxSkips)
        throw HorizonExhausted("more than " + std::to_string(kMaxSkips) + " dense vectors skipped");
      continue;
    }
    b.n = choose_n(space, w, c.blocks_, b.x, b.a.a, k, n_horizon);
    b.s_norm = b.x.is_zero() ? 0.0 : fnorm(space, Scalar(b.a.a) * apply_forward_shift(w, b.x, b.n));
    c.blocks_.push_back(std::move(b));
  }
  c.x_ = partial_assembly(w, c.blocks_, c.blocks_.size()).trimmed();
  c.verify(series_horizon);
  return c;
}

void FhcConstruction::verify(long series_horizon) {
  ledger_.clear();
  bool holds = true;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const FhcBlock& b = blocks_[i];
    const double bound = pow2(b.k);
    LedgerRow fwd{b.k, 0, "forward-norm", b.s_norm, bound, b.s_norm <= bound};
    const double maj = b.a.a * std::max(b.a.s_sum, b.a.t_sum);
    LedgerRow blk{b.k, 0, "block-majorant", maj, bound, maj <= bound * (1.0 + 1e-12)};
    holds = holds && fwd.holds && blk.holds;
    ledger_.push_back(fwd);
    ledger_.push_back(blk);
    const TruncatedVector y = partial_assembly(w_, blocks_, i + 1);
    for (std::size_t l = 0; l <= i; ++l) {
      const double res = approximation_residual(space_, w_, y, blocks_[l]);
      LedgerRow row{b.k, blocks_[l].k, "approximation", res, pow2(blocks_[l].k), res < pow2(blocks_[l].k)};
      holds = holds && row.holds;
      ledger_.push_back(row);
    }
  }
  checks_.ledger_holds = holds;

  // sum over n >= 1 of ||u_n|| through the triangle inequality over blocks
  std::vector<double> L(static_cast<std::size_t>(std::max(series_horizon, kMinClassifierHorizon)));
  for (std::size_t i = 0; i < L.size(); ++i) {
    const long n = static_cast<long>(i) + 1;
    std::vector<double> parts;
    for (const FhcBlock& b : blocks_)
      if (!b.x.is_zero()) parts.push_back(std::log(b.a.a) + log_forward_norm(space_, w_, b.x, b.n + n));
    L[i] = log_sum_exp(parts);
  }
  const TailClass tc = classify_tail(L, 1);
  checks_.plus_verdict = tc.verdict;
  checks_.majorant_plus = tc.partial_sum + tc.tail_bound;

  checks_.majorant_minus = 0.0;
  for (long n = 0; n <= std::max(0L, x_.hi()); ++n) checks_.majorant_minus += fnorm(space_, apply_shift(w_, x_, n));

  checks_.orbit_residual = 0.0;
  for (long n = -3; n <= 3; ++n)
    checks_.orbit_residual =
        std::max(checks_.orbit_residual, relative_difference(apply_shift(w_, u(n), 1), u(n - 1)));
  if (!(checks_.orbit_residual < 1e-10)) {
    std::ostringstream os;
    os << "T u_n = u_{n-1} residual " << checks_.orbit_residual << " exceeds 1e-10";
    throw ResidualCheckFailed(os.str());
  }
}

TruncatedVector FhcConstruction::u(long n) const {
  if (n <= 0) return apply_shift(w_, x_, -n);
  TruncatedVector out = TruncatedVector::zeros(n, n);
  for (const FhcBlock& b : blocks_) {
    if (b.x.is_zero()) continue;
    out += Scalar(b.a.a) * apply_forward_shift(w_, b.x, b.n + n);
  }
  return out;
}

}  // namespace fhc
