#include "fhc/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fhc/error.hpp"

namespace fhc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long kDirectProductLimit = 64;

std::string scalar_text(Scalar z) {
  std::ostringstream os;
  if (z.imag() == 0.0) os << z.real();
  else os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  return os.str();
}

Scalar phase(Scalar z) {
  if (z.imag() == 0.0) return z.real() < 0 ? -1.0 : 1.0;
  return z / std::abs(z);
}

Scalar phase_pow(Scalar z, long n) {
  if (z.imag() == 0.0) return (z.real() < 0 && (n % 2 != 0)) ? -1.0 : 1.0;
  return std::polar(1.0, static_cast<double>(n) * std::arg(z));
}

void require_nonzero(Scalar z) {
  if (z == Scalar{0.0}) throw InvalidArgument("zero weight encountered");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("non-finite weight");
}

double log_abs(Scalar z) { return z.imag() == 0.0 ? std::log(std::fabs(z.real())) : std::log(std::abs(z)); }

}  // namespace

WeightSequence::WeightSequence(WeightRule rule, bool bilateral) : rule_(std::move(rule)), bilateral_(bilateral) {
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) {
          require_nonzero(r.lambda);
        } else if constexpr (std::is_same_v<T, LinearWeights>) {
          if (bilateral_) throw InvalidArgument("linear weights vanish at n = 0; bilateral use is impossible");
        } else if constexpr (std::is_same_v<T, TableWeights>) {
          require_nonzero(r.fallback);
          for (const auto& [n, v] : r.entries) {
            require_nonzero(v);
            if (!bilateral_ && n < 1) throw InvalidArgument("unilateral weight table has an index below 1");
          }
        } else if constexpr (std::is_same_v<T, TwoSidedWeights>) {
          require_nonzero(r.positive);
          require_nonzero(r.negative);
        } else {
          if (bilateral_) throw InvalidArgument("power-log beta is defined for unilateral shifts only");
          if (!std::isfinite(r.a) || !std::isfinite(r.b)) throw InvalidArgument("power-log exponents must be finite");
        }
      },
      rule_);
}

std::string WeightSequence::name() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) os << "constant(" << scalar_text(r.lambda) << ")";
        else if constexpr (std::is_same_v<T, LinearWeights>) os << "linear";
        else if constexpr (std::is_same_v<T, TableWeights>) os << "table(" << r.entries.size() << " entries, default " << scalar_text(r.fallback) << ")";
        else if constexpr (std::is_same_v<T, TwoSidedWeights>) os << "two-sided(" << scalar_text(r.positive) << ", " << scalar_text(r.negative) << ")";
        else os << "power-log(a=" << r.a << ", b=" << r.b << ")";
      },
      rule_);
  os << (bilateral_ ? " bilateral" : " unilateral");
  return os.str();
}

void WeightSequence::check_index(long n) const {
  if (!bilateral_ && n < 1) throw InvalidArgument("unilateral weights are indexed from 1");
}

Scalar WeightSequence::weight(long n) const {
  check_index(n);
  return std::visit(
      [&](const auto& r) -> Scalar {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) return r.lambda;
        else if constexpr (std::is_same_v<T, LinearWeights>) return static_cast<double>(n);
        else if constexpr (std::is_same_v<T, TableWeights>) {
          auto it = r.entries.find(n);
          return it == r.entries.end() ? r.fallback : it->second;
        } else if constexpr (std::is_same_v<T, TwoSidedWeights>) return n >= 1 ? r.positive : r.negative;
        else {
          if (n == 1) return 1.0;
          return std::exp(log_beta(n).log_mag - log_beta(n - 1).log_mag);
        }
      },
      rule_);
}

SignedLogScalar WeightSequence::log_beta(long n) const {
  if (n == 0) return {0.0, 1.0};
  if (n < 0 && !bilateral_) throw InvalidArgument("beta_n for n < 0 needs a bilateral weight sequence");
  const double dn = static_cast<double>(n);
  return std::visit(
      [&](const auto& r) -> SignedLogScalar {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) {
          return {dn * log_abs(r.lambda), phase_pow(r.lambda, n)};
        } else if constexpr (std::is_same_v<T, LinearWeights>) {
          return {std::lgamma(dn + 1.0), 1.0};
        } else if constexpr (std::is_same_v<T, TableWeights>) {
          // product of w_k over [1, n] for n > 0, inverse product over [n+1, 0] for n < 0
          const long from = n > 0 ? 1 : n + 1, to = n > 0 ? n : 0;
          double log_mag = 0.0;
          Scalar sign = 1.0;
          long explicit_count = 0;
          for (auto it = r.entries.lower_bound(from); it != r.entries.end() && it->first <= to; ++it) {
            log_mag += log_abs(it->second);
            sign *= phase(it->second);
            ++explicit_count;
          }
          const long rest = (to - from + 1) - explicit_count;
          log_mag += static_cast<double>(rest) * log_abs(r.fallback);
          sign *= phase_pow(r.fallback, rest);
          if (n > 0) return {log_mag, sign};
          return {-log_mag, 1.0 / sign};
        } else if constexpr (std::is_same_v<T, TwoSidedWeights>) {
          if (n > 0) return {dn * log_abs(r.positive), phase_pow(r.positive, n)};
          return {dn * log_abs(r.negative), 1.0 / phase_pow(r.negative, -n)};
        } else {
          if (n == 1) return {0.0, 1.0};
          return {r.a * std::log(std::log(dn)) + r.b * std::log(dn), 1.0};
        }
      },
      rule_);
}

std::vector<Scalar> WeightSequence::inverse_betas(long lo, long hi) const {
  if (hi < lo) throw InvalidArgument("inverse_betas requires hi >= lo");
  if (lo < 0 && !bilateral_) throw InvalidArgument("negative indices need a bilateral weight sequence");
  std::vector<Scalar> out(static_cast<std::size_t>(hi - lo + 1));
  if (std::holds_alternative<PowerLogBeta>(rule_)) {
    for (long n = lo; n <= hi; ++n) out[static_cast<std::size_t>(n - lo)] = log_beta(n).inverse().value();
    return out;
  }
  Scalar s = 1.0;
  if (0 >= lo && 0 <= hi) out[static_cast<std::size_t>(-lo)] = s;
  for (long n = 1; n <= hi; ++n) {
    s /= weight(n);
    if (n >= lo) out[static_cast<std::size_t>(n - lo)] = s;
  }
  s = 1.0;
  for (long n = -1; n >= lo; --n) {
    s *= weight(n + 1);
    if (n <= hi) out[static_cast<std::size_t>(n - lo)] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

TruncatedVector apply_shift(const WeightSequence& w, const TruncatedVector& v, long m) {
  if (m < 0) throw InvalidArgument("shift power must be non-negative");
  if (m == 0) return v;
  if (!w.bilateral() && v.lo() < 0) throw InvalidArgument("unilateral shift applied to a vector with negative indices");
  const long first = w.bilateral() ? v.lo() : std::max(v.lo(), m);
  if (first > v.hi()) return TruncatedVector::zeros(0, 0);
  TruncatedVector out = TruncatedVector::zeros(first - m, v.hi() - m);
  for (long n = first; n <= v.hi(); ++n) {
    Scalar c = v.at(n);
    if (c == Scalar{0.0}) continue;
    if (m <= kDirectProductLimit) {
      for (long k = n; k > n - m; --k) c *= w.weight(k);
    } else {
      c *= (w.log_beta(n) / w.log_beta(n - m)).value();
    }
    out.ref(n - m) = c;
  }
  return out;
}

TruncatedVector apply_forward_shift(const WeightSequence& w, const TruncatedVector& v, long m) {
  if (m < 0) throw InvalidArgument("shift power must be non-negative");
  if (m == 0) return v;
  if (!w.bilateral() && v.lo() < 0) throw InvalidArgument("unilateral shift applied to a vector with negative indices");
  TruncatedVector out = TruncatedVector::zeros(v.lo() + m, v.hi() + m);
  for (long n = v.lo(); n <= v.hi(); ++n) {
    Scalar c = v.at(n);
    if (c == Scalar{0.0}) continue;
    if (m <= kDirectProductLimit) {
      for (long k = n + 1; k <= n + m; ++k) c /= w.weight(k);
    } else {
      c *= (w.log_beta(n) / w.log_beta(n + m)).value();
    }
    out.ref(n + m) = c;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(SeriesKind k) { return k == SeriesKind::Plain ? "plain" : "sqrt_log"; }

namespace {

// log of the term magnitude t_n for |n| = 0..horizon on one side
std::vector<double> log_terms(const WeightSequence& w, SeriesKind kind, long horizon, int side) {
  std::vector<double> L(static_cast<std::size_t>(horizon + 1));
  for (long k = 0; k <= horizon; ++k) {
    const long n = side * k;
    double l = -w.log_beta(n).log_mag;
    if (kind == SeriesKind::SqrtLog) l = k >= 2 ? l + 0.5 * std::log(std::log(static_cast<double>(k))) : kNegInf;
    L[static_cast<std::size_t>(k)] = l;
  }
  return L;
}

}  // namespace

SeriesCertificate check_series_condition(const SpaceSpec& space, const WeightSequence& w, SeriesKind kind,
                                         long horizon, double tol) {
  if (horizon < kMinClassifierHorizon) throw InvalidArgument("series check needs horizon >= 16");
  if (w.bilateral() && !space.allows_bilateral())
    throw InvalidArgument("bilateral weights need l^p or c0");

  SeriesCertificate cert;
  std::vector<int> sides{1};
  if (w.bilateral()) sides.push_back(-1);

  for (int side : sides) {
    const std::string suffix = w.bilateral() ? (side > 0 ? " n>=0" : " n<0") : "";
    std::vector<double> L = log_terms(w, kind, horizon, side);
    if (side < 0) L[0] = kNegInf;  // n = 0 belongs to the positive side

    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LpFamily>) {
            std::vector<double> Lp(L);
            for (double& l : Lp) l *= f.p;
            TailClass tc = classify_tail(Lp, 0);
            cert.tail_estimates.push_back(std::pow(tc.tail_bound, 1.0 / f.p));
            cert.components.push_back({"p-sum" + suffix, std::move(tc)});
          } else if constexpr (std::is_same_v<T, C0Family>) {
            TailClass tc = classify_decay(L, 0);
            cert.tail_estimates.push_back(tc.tail_bound);
            cert.components.push_back({"sup" + suffix, std::move(tc)});
          } else {
            for (double r : f.radii) {
              std::vector<double> Lr(L);
              const double lr = std::log(r);
              for (std::size_t k = 0; k < Lr.size(); ++k) Lr[k] += static_cast<double>(k) * lr;
              TailClass tc = classify_tail(Lr, 0);
              cert.tail_estimates.push_back(tc.tail_bound);
              std::ostringstream label;
              label << "r=" << r << suffix;
              cert.components.push_back({label.str(), std::move(tc)});
            }
          }
        },
        space.family());
  }

  bool all_pass = true, any_fail = false;
  for (const auto& c : cert.components) {
    all_pass = all_pass && c.tail.verdict == Verdict::Pass;
    if (c.tail.verdict == Verdict::Fail && !any_fail) {
      any_fail = true;
      cert.witness = c.label + ": " + c.tail.rule;
    }
  }
  cert.verdict = any_fail ? Verdict::Fail : (all_pass ? Verdict::Pass : Verdict::Inconclusive);
  cert.below_tol = std::all_of(cert.tail_estimates.begin(), cert.tail_estimates.end(),
                               [&](double t) { return t < tol; });
  return cert;
}

ChaosCertificate chaoticity_criterion(const SpaceSpec& space, const WeightSequence& w, long horizon,
                                      double growth_threshold, double tol) {
  if (!space.is_holomorphic()) throw InvalidArgument("chaoticity criterion needs H(C) or H(D(0,R))");
  if (w.bilateral()) throw InvalidArgument("chaoticity criterion needs unilateral weights");
  if (horizon < kMinClassifierHorizon) throw InvalidArgument("chaoticity criterion needs horizon >= 16");

  ChaosCertificate cert;
  cert.roots.reserve(static_cast<std::size_t>(horizon));
  for (long n = 1; n <= horizon; ++n) cert.roots.push_back(std::exp(w.log_beta(n).log_mag / static_cast<double>(n)));

  const std::size_t q = static_cast<std::size_t>(3 * horizon / 4) - 1;  // roots[i] is n = i + 1
  std::ostringstream note;
  if (std::holds_alternative<EntireFamily>(space.family())) {
    bool increasing = true;
    for (std::size_t i = q; i + 1 < cert.roots.size(); ++i) increasing = increasing && cert.roots[i + 1] > cert.roots[i];
    cert.statistic = cert.roots.back() / cert.roots[q] - 1.0;
    cert.verdict = (increasing && cert.statistic >= growth_threshold) ? Verdict::Pass : Verdict::Fail;
    note << "relative growth of |beta_n|^(1/n) over the last quartile up to n=" << horizon
         << "; horizon-limited trend, not a statement about the limit";
  } else {
    double worst = 0.0;
    for (std::size_t i = q; i < cert.roots.size(); ++i) worst = std::max(worst, 1.0 / cert.roots[i]);
    cert.statistic = worst;
    cert.verdict = worst <= 1.0 / space.disk_radius() + tol ? Verdict::Pass : Verdict::Fail;
    note << "max |beta_n|^(-1/n) over the last quartile up to n=" << horizon
         << " against 1/R; horizon-limited, not a statement about the limsup";
  }
  cert.note = note.str();
  return cert;
}

// ---------------------------------------------------------------------------

PolynomialSpec::PolynomialSpec(std::vector<Scalar> a) : a_(std::move(a)) {
  if (a_.empty()) throw InvalidArgument("polynomial needs degree >= 1");
  if (a_.front() == Scalar{0.0}) throw InvalidArgument("polynomial needs a_1 != 0");
}

std::string PolynomialSpec::name() const {
  std::ostringstream os;
  os << "P(z)=";
  for (std::size_t k = 0; k < a_.size(); ++k) {
    if (k) os << " + ";
    os << scalar_text(a_[k]) << "z";
    if (k) os << "^" << k + 1;
  }
  return os.str();
}

TruncatedVector apply_poly_shift(const WeightSequence& w, const PolynomialSpec& P, const TruncatedVector& v) {
  if (w.bilateral()) throw InvalidArgument("polynomial shifts need unilateral weights");
  TruncatedVector out = TruncatedVector::zeros(std::max(0L, v.lo()), std::max(0L, v.hi()));
  for (std::size_t k = 1; k <= P.degree(); ++k) {
    if (P.a(k) == Scalar{0.0}) continue;
    out += P.a(k) * apply_shift(w, v, static_cast<long>(k));
  }
  return out;
}

PolynomialBasis polynomial_basis(const WeightSequence& w, const PolynomialSpec& P, long N) {
  if (w.bilateral()) throw InvalidArgument("polynomial basis needs unilateral weights");
  if (N < 0) throw InvalidArgument("polynomial basis needs N >= 0");
  const long d = static_cast<long>(P.degree());
  std::vector<Scalar> wt(static_cast<std::size_t>(N + 1), 1.0);
  for (long n = 1; n <= N; ++n) wt[static_cast<std::size_t>(n)] = w.weight(n);
  // W(j, k) = w_j w_{j-1} ... w_{j-k+1}
  auto W = [&](long j, long k) {
    Scalar p = 1.0;
    for (long i = j; i > j - k; --i) p *= wt[static_cast<std::size_t>(i)];
    return p;
  };

  std::vector<std::vector<Scalar>> B(static_cast<std::size_t>(N + 1));
  B[0] = {1.0};
  const Scalar a1 = P.a(1);
  for (long n = 1; n <= N; ++n) {
    auto& col = B[static_cast<std::size_t>(n)];
    const auto& prev = B[static_cast<std::size_t>(n - 1)];
    col.assign(static_cast<std::size_t>(n + 1), 0.0);
    col[static_cast<std::size_t>(n)] = prev[static_cast<std::size_t>(n - 1)] / (a1 * wt[static_cast<std::size_t>(n)]);
    for (long i = n - 2; i >= 0; --i) {
      Scalar rhs = prev[static_cast<std::size_t>(i)];
      for (long k = 2; k <= d && i + k <= n; ++k) rhs -= P.a(static_cast<std::size_t>(k)) * W(i + k, k) * col[static_cast<std::size_t>(i + k)];
      col[static_cast<std::size_t>(i + 1)] = rhs / (a1 * wt[static_cast<std::size_t>(i + 1)]);
    }
    col[0] = 0.0;
  }

  PolynomialBasis basis;
  basis.columns.reserve(B.size());
  for (auto& col : B) basis.columns.emplace_back(0, std::move(col));

  for (long n = 0; n <= N; ++n) {
    const TruncatedVector image = apply_poly_shift(w, P, basis.columns[static_cast<std::size_t>(n)]);
    double res;
    if (n == 0) {
      res = 0.0;
      for (auto c : image.coeffs()) res = std::max(res, std::abs(c));
    } else {
      res = relative_difference(image, basis.columns[static_cast<std::size_t>(n - 1)]);
    }
    basis.max_residual = std::max(basis.max_residual, res);
    if (!(res <= 1e-10)) {
      std::ostringstream os;
      os << "polynomial basis residual " << res << " at n=" << n << " exceeds 1e-10";
      throw ResidualCheckFailed(os.str());
    }
  }
  return basis;
}

}  // namespace fhc
