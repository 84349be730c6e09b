#include "fhc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fhc/error.hpp"

namespace fhc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_erfc(double x) {
  if (x < 26.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  return -x2 - std::log(x * std::sqrt(std::numbers::pi)) + std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

Scalar with_phase(double radius, Field field, Rng& rng) {
  const double u = uniform01(rng);
  if (field == Field::Real) return u < 0.5 ? -radius : radius;
  return std::polar(radius, 2.0 * std::numbers::pi * u);
}

}  // namespace

std::string to_string(DeltaProvenance p) {
  switch (p) {
    case DeltaProvenance::UserGiven: return "user";
    case DeltaProvenance::DeltaBuilder: return "delta-builder";
    default: return "symmetrized";
  }
}

DeltaSequence::DeltaSequence(Generator g, bool bilateral, DeltaProvenance provenance, std::string description)
    : g_(std::move(g)), bilateral_(bilateral), provenance_(provenance), description_(std::move(description)) {}

DeltaSequence DeltaSequence::linear(double slope, double offset, bool bilateral) {
  if (!(slope >= 0.0) || !(offset >= 0.0)) throw InvalidArgument("linear deltas need slope, offset >= 0");
  std::ostringstream os;
  os << slope << "*|n|+" << offset;
  return DeltaSequence([=](long n) { return slope * static_cast<double>(std::labs(n)) + offset; }, bilateral,
                       DeltaProvenance::UserGiven, os.str());
}

DeltaSequence DeltaSequence::constant(double c, bool bilateral) {
  if (!(c >= 0.0)) throw InvalidArgument("constant deltas need c >= 0");
  std::ostringstream os;
  os << "constant " << c;
  return DeltaSequence([=](long) { return c; }, bilateral, DeltaProvenance::UserGiven, os.str());
}

DeltaSequence DeltaSequence::table(std::vector<double> values) {
  if (values.size() < 2) throw InvalidArgument("delta table needs at least two values");
  const double gap = values.back() - values[values.size() - 2];
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  std::ostringstream os;
  os << "table of " << shared->size() << " values, last gap " << gap;
  return DeltaSequence(
      [shared, gap](long n) {
        const auto& v = *shared;
        const long last = static_cast<long>(v.size()) - 1;
        if (n <= last) return v[static_cast<std::size_t>(n)];
        return v.back() + gap * static_cast<double>(n - last);
      },
      false, DeltaProvenance::UserGiven, os.str());
}

double DeltaSequence::operator()(long n) const {
  if (n < 0 && !bilateral_) throw InvalidArgument("delta sequence is indexed by N only");
  const double v = g_(n);
  if (!(v >= 0.0) || std::isnan(v)) throw InvalidArgument("delta values must be nonnegative numbers");
  return v;
}

DeltaSequence DeltaSequence::naturals() const {
  if (!bilateral_) return *this;
  return DeltaSequence(g_, false, provenance_, description_ + ", n >= 0");
}

// ---------------------------------------------------------------------------

double AnnulusDensity::threshold(long k) const {
  if (k < 0) return 0.0;
  const long last = static_cast<long>(thresholds.size()) - 1;
  if (k <= last) return thresholds[static_cast<std::size_t>(k)];
  return thresholds.back() + extension_gap * static_cast<double>(k - last);
}

double AnnulusDensity::mass(long k) const {
  const double a = threshold(k - 1), b = threshold(k);
  if (field == Field::Real) return 2.0 * (b - a);
  return std::numbers::pi * (b * b - a * a);
}

long AnnulusDensity::annulus_of(double t) const {
  if (t < thresholds.back())
    return static_cast<long>(std::upper_bound(thresholds.begin(), thresholds.end(), t) - thresholds.begin());
  const long last = static_cast<long>(thresholds.size()) - 1;
  return last + 1 + static_cast<long>(std::floor((t - thresholds.back()) / extension_gap));
}

long bounded_subsequence_witness(const DeltaSequence& deltas, long H, int side) {
  if (H < 4) throw InvalidArgument("divergence check needs H >= 4");
  std::vector<double> head;
  for (long n = 0; n <= H / 4; ++n) head.push_back(deltas(side * n));
  std::nth_element(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(head.size() / 2), head.end());
  const double median = head[head.size() / 2];
  for (long n = H; n <= 2 * H; ++n)
    if (!(deltas(side * n) > median)) return n;
  return -1;
}

AnnulusDensity build_annulus_density(const DeltaSequence& deltas, Field field, long H) {
  if (deltas.bilateral()) throw InvalidArgument("annulus density needs an N-indexed delta sequence");
  const long witness = bounded_subsequence_witness(deltas, H);
  if (witness >= 0) {
    std::ostringstream os;
    os << "delta stays bounded along a subsequence: delta_" << witness << " = " << deltas(witness)
       << " does not exceed the median of delta_0..delta_" << H / 4;
    throw DivergenceRequired(os.str());
  }

  std::vector<double> d(static_cast<std::size_t>(2 * H + 1));
  for (long n = 2 * H; n >= 0; --n) {
    const double v = deltas(n);
    d[static_cast<std::size_t>(n)] = n == 2 * H ? v : std::min(v, d[static_cast<std::size_t>(n + 1)]);
  }
  d.resize(static_cast<std::size_t>(H));

  AnnulusDensity rho;
  rho.field = field;
  bool strict = d[0] > 0.0;
  for (std::size_t i = 1; i < d.size() && strict; ++i) strict = d[i] > d[i - 1];
  if (strict) {
    rho.thresholds = d;
    for (long n = 0; n < H; ++n) rho.source_index.push_back(n);
  } else {
    for (long n = 0; n < H; ++n) {
      const double e = n == 0 ? d[0] : d[static_cast<std::size_t>(n)] - 1.0 / static_cast<double>(n);
      if (e > 0.0 && (rho.thresholds.empty() || e > rho.thresholds.back())) {
        rho.thresholds.push_back(e);
        rho.source_index.push_back(n);
      }
    }
  }
  if (rho.thresholds.size() < 2) throw DivergenceRequired("fewer than two usable thresholds after preprocessing");
  rho.extension_gap = rho.thresholds.back() - rho.thresholds[rho.thresholds.size() - 2];
  return rho;
}

// ---------------------------------------------------------------------------

GaussianLaw make_gaussian(double mean, double variance, Field field) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidArgument("Gaussian variance must be positive");
  if (!std::isfinite(mean)) throw InvalidArgument("Gaussian mean must be finite");
  if (field == Field::Complex && mean != 0.0) throw InvalidArgument("complex Gaussian must have mean 0");
  return {field, mean, variance};
}

UniformBoundedLaw make_uniform(double bound, Field field) {
  if (!(bound > 0.0) || !std::isfinite(bound)) throw InvalidArgument("uniform bound must be positive");
  return {field, bound};
}

CustomTailLaw make_custom_tail(std::vector<double> t, std::vector<double> p, Field field) {
  if (t.size() != p.size() || t.size() < 2) throw InvalidArgument("custom tail needs >= 2 matching knots");
  if (t[0] != 0.0 || p[0] != 1.0) throw InvalidArgument("custom tail must start at (0, 1)");
  CustomTailLaw law{field, std::move(t), {}};
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0 && p[i] <= 1.0)) throw InvalidArgument("custom tail probabilities must lie in (0, 1]");
    if (i > 0 && !(law.t[i] > law.t[i - 1])) throw InvalidArgument("custom tail knots must increase");
    if (i > 0 && p[i] > p[i - 1]) throw InvalidArgument("custom tail must be non-increasing");
    law.log_p.push_back(std::log(p[i]));
  }
  if (!(law.log_p.back() < law.log_p[law.log_p.size() - 2]))
    throw InvalidArgument("custom tail must strictly decrease on its last segment");
  return law;
}

std::string describe(const DistributionSpec& d) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AnnulusDensity>)
          os << "annulus density (" << x.thresholds.size() << " thresholds, " << to_string(x.field) << ")";
        else if constexpr (std::is_same_v<T, GaussianLaw>)
          os << "gaussian(mean " << x.mean << ", variance " << x.variance << ", " << to_string(x.field) << ")";
        else if constexpr (std::is_same_v<T, UniformBoundedLaw>)
          os << "uniform(bound " << x.bound << ", " << to_string(x.field) << ")";
        else
          os << "custom tail (" << x.t.size() << " knots, " << to_string(x.field) << ")";
      },
      d);
  return os.str();
}

Field field_of(const DistributionSpec& d) {
  return std::visit([](const auto& x) { return x.field; }, d);
}

bool has_full_support(const DistributionSpec& d) { return !std::holds_alternative<UniformBoundedLaw>(d); }

double log_tail_prob(const DistributionSpec& d, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("tail probability needs t >= 0");
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AnnulusDensity>) {
          const long k = x.annulus_of(t);
          const double a = x.threshold(k - 1), b = x.threshold(k);
          const double frac = x.field == Field::Real ? (b - t) / (b - a) : (b * b - t * t) / (b * b - a * a);
          return -static_cast<double>(k + 1) * std::numbers::ln2 + std::log1p(frac);
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          if (x.field == Field::Complex) return -t * t / x.variance;
          const double s = std::sqrt(2.0 * x.variance);
          return log_add(log_erfc((t - x.mean) / s), log_erfc((t + x.mean) / s)) - std::numbers::ln2;
        } else if constexpr (std::is_same_v<T, UniformBoundedLaw>) {
          if (t >= x.bound) return kNegInf;
          const double r = t / x.bound;
          return std::log1p(x.field == Field::Real ? -r : -r * r);
        } else {
          const std::size_t last = x.t.size() - 1;
          if (t >= x.t[last]) {
            const double slope = (x.log_p[last] - x.log_p[last - 1]) / (x.t[last] - x.t[last - 1]);
            return x.log_p[last] + slope * (t - x.t[last]);
          }
          const std::size_t i = static_cast<std::size_t>(std::upper_bound(x.t.begin(), x.t.end(), t) - x.t.begin()) - 1;
          const double u = (t - x.t[i]) / (x.t[i + 1] - x.t[i]);
          return x.log_p[i] + u * (x.log_p[i + 1] - x.log_p[i]);
        }
      },
      d);
}

double tail_prob(const DistributionSpec& d, double t) { return std::exp(log_tail_prob(d, t)); }

double cdf_abs(const DistributionSpec& d, double t) { return 1.0 - tail_prob(d, t); }

double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Scalar draw(const DistributionSpec& d, Rng& rng) {
  return std::visit(
      [&](const auto& x) -> Scalar {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AnnulusDensity>) {
          long k = 0;
          while (uniform01(rng) < 0.5) ++k;  // P(k) = 2^{-k-1}
          const double a = x.threshold(k - 1), b = x.threshold(k);
          const double u = uniform01(rng);
          const double r = x.field == Field::Real ? a + u * (b - a) : std::sqrt(a * a + u * (b * b - a * a));
          return with_phase(r, x.field, rng);
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          if (x.field == Field::Real) return x.mean + std::sqrt(x.variance) * standard_normal(rng);
          const double s = std::sqrt(0.5 * x.variance);
          const double re = s * standard_normal(rng);
          return {re, s * standard_normal(rng)};
        } else if constexpr (std::is_same_v<T, UniformBoundedLaw>) {
          const double u = uniform01(rng);
          if (x.field == Field::Real) return x.bound * (2.0 * u - 1.0);
          return with_phase(x.bound * std::sqrt(u), x.field, rng);
        } else {
          const double target = std::log(1.0 - uniform01(rng));  // log of a uniform in (0, 1]
          const std::size_t last = x.t.size() - 1;
          double r;
          if (target <= x.log_p[last]) {
            const double slope = (x.log_p[last] - x.log_p[last - 1]) / (x.t[last] - x.t[last - 1]);
            r = x.t[last] + (target - x.log_p[last]) / slope;
          } else {
            std::size_t i = 0;
            while (x.log_p[i + 1] > target) ++i;
            const double span = x.log_p[i + 1] - x.log_p[i];
            r = span == 0.0 ? x.t[i] : x.t[i] + (target - x.log_p[i]) / span * (x.t[i + 1] - x.t[i]);
          }
          return with_phase(r, x.field, rng);
        }
      },
      d);
}

std::vector<Scalar> sample(const DistributionSpec& d, Rng& rng, long count) {
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(draw(d, rng));
  return out;
}

// ---------------------------------------------------------------------------

TailSumCertificate tail_sum(const DistributionSpec& d, const DeltaSequence& deltas, long horizon, double tol) {
  if (horizon < 1) throw InvalidArgument("tail_sum needs horizon >= 1");
  TailSumCertificate cert;
  std::vector<int> sides{1};
  if (deltas.bilateral()) sides.push_back(-1);

  if (has_full_support(d) && horizon >= 4) {
    for (int side : sides) {
      const long w = bounded_subsequence_witness(deltas, horizon, side);
      if (w >= 0) {
        std::ostringstream os;
        os << "delta_" << side * w << " = " << deltas(side * w)
           << " is not above the early median; a full-support law gives a divergent sum";
        cert.verdict = Verdict::Fail;
        cert.rule = "bounded-subsequence";
        cert.witness = os.str();
        cert.tail_bound = kInf;
        for (long n = 0; n <= horizon; ++n) cert.partial_sum += tail_prob(d, deltas(n));
        return cert;
      }
    }
  }

  bool all_pass = true;
  for (int side : sides) {
    std::vector<double> L(static_cast<std::size_t>(horizon + 1));
    for (long n = 0; n <= horizon; ++n) L[static_cast<std::size_t>(n)] = log_tail_prob(d, deltas(side * n));
    if (side < 0) L[0] = kNegInf;
    const TailClass tc = classify_tail(L, 0);
    cert.partial_sum += tc.partial_sum;
    cert.tail_bound += tc.tail_bound;
    cert.rule += (cert.rule.empty() ? "" : "; ") + tc.rule;
    if (tc.verdict == Verdict::Fail) {
      cert.verdict = Verdict::Fail;
      cert.witness = tc.rule;
    }
    all_pass = all_pass && tc.verdict == Verdict::Pass;
  }
  if (cert.verdict != Verdict::Fail) cert.verdict = all_pass ? Verdict::Pass : Verdict::Inconclusive;
  cert.below_tol = cert.tail_bound < tol;
  return cert;
}

void validate_subgaussian(const SubgaussianParams& params) {
  if (!(params.K > 0.0) || !(params.tau > 0.0)) throw InvalidArgument("subgaussian K and tau must be positive");
  if (!params.law) throw InvalidArgument("subgaussian validation needs a law");
  for (int k = 0; k <= 400; ++k) {
    const double t = 0.05 * params.tau * k;
    const double lhs = log_tail_prob(*params.law, t);
    const double rhs = std::log(params.K) - t * t / (params.tau * params.tau);
    if (lhs > rhs + 1e-12) {
      std::ostringstream os;
      os << "P(|X| > " << t << ") = " << std::exp(lhs) << " exceeds K exp(-t^2/tau^2) = " << std::exp(rhs);
      throw InvalidArgument(os.str());
    }
  }
}

SubgaussianCertificate subgaussian_certificate(const SubgaussianParams& params, double c) {
  if (!(c > 0.0)) throw InvalidArgument("subgaussian certificate needs c > 0");
  if (!(params.K > 0.0) || !(params.tau > 0.0)) throw InvalidArgument("subgaussian K and tau must be positive");
  SubgaussianCertificate cert;
  cert.exponent = c * c / (params.tau * params.tau);
  if (cert.exponent > 1.0) {
    cert.verdict = Verdict::Pass;
    cert.series_bound = 2.0 * params.K * (std::riemann_zeta(cert.exponent) - 1.0);
  } else {
    cert.verdict = Verdict::Fail;
    cert.series_bound = kInf;
  }
  return cert;
}

}  // namespace fhc
