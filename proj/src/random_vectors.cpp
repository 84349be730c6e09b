#include "fhc/random_vectors.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhc/error.hpp"

namespace fhc {

namespace {

std::function<double(long)> delta_abs(const DeltaSequence& d) {
  return [d](long n) { return d.bilateral() ? d(n) : d(std::labs(n)); };
}

DeltaSequence bilateral_view(const DeltaSequence& d) {
  if (d.bilateral()) return d;
  return DeltaSequence([d](long n) { return d(std::labs(n)); }, true, d.provenance(), d.description() + ", mirrored");
}

}  // namespace

Scalar RandomVectorSample::x(long n) const {
  if (n < stream_lo || n > stream_hi) throw OrbitHorizonExceeded("coefficient X_" + std::to_string(n) + " was not drawn");
  return X[static_cast<std::size_t>(n - stream_lo)];
}

Window sample_window(const UFamily& family, long N) {
  if (N < 1) throw InvalidArgument("sample window needs N >= 1");
  Window w;
  w.lo = family.bilateral_index() ? -N : 0;
  w.hi = N;
  if (family.max_index() < w.hi) throw InvalidArgument("family is not available on the whole window");
  if (!family.diagonal()) return w;
  std::vector<Scalar> s = family.scales(w.lo, w.hi);
  std::size_t first = 0, last = s.size();
  while (first < s.size() && s[first] == Scalar{0.0}) ++first;
  while (last > first && s[last - 1] == Scalar{0.0}) --last;
  if (first == last) {  // zero family
    first = static_cast<std::size_t>(-w.lo);
    last = first + 1;
  }
  const long old_lo = w.lo;
  w.lo = old_lo + static_cast<long>(first);
  w.hi = old_lo + static_cast<long>(last) - 1;
  w.scales.assign(s.begin() + static_cast<std::ptrdiff_t>(first), s.begin() + static_cast<std::ptrdiff_t>(last));
  return w;
}

TruncatedVector assemble_window(const UFamily& family, std::span<const Scalar> scales, long lo, long hi,
                                std::span<const Scalar> Y) {
  if (hi < lo) throw InvalidArgument("assembly window is empty");
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  if (Y.size() < len) throw InvalidArgument("coefficient stream shorter than the window");
  if (family.diagonal()) {
    std::vector<Scalar> c(len);
    for (std::size_t i = 0; i < len; ++i) c[i] = Y[i] * scales[i];
    return TruncatedVector(lo, std::move(c));
  }
  TruncatedVector out = TruncatedVector::zeros(std::max(lo, 0L), std::max(hi, 0L));
  for (std::size_t i = 0; i < len; ++i) {
    if (Y[i] == Scalar{0.0}) continue;
    TruncatedVector u = family.u(lo + static_cast<long>(i));
    u *= Y[i];
    out += u;
  }
  return out;
}

RandomVectorSample sample_vector(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                 const DistributionSpec& dist, long N, const DeltaSequence* deltas,
                                 std::uint64_t seed, std::uint64_t stream, long extra_stream) {
  if (!family) throw InvalidArgument("null family");
  if (extra_stream < 0) throw InvalidArgument("extra_stream must be >= 0");
  if (family->bilateral_index() && !space.allows_bilateral() && family->kind() != FamilyKind::FhcCriterion)
    throw InvalidArgument("bilateral family needs l^p or c0");

  RandomVectorSample s;
  s.family = family;
  s.space = space;
  s.seed = seed;
  s.stream = stream;
  Window w = sample_window(*family, N);
  s.stream_lo = family->bilateral_index() ? -N : 0;
  s.stream_hi = N + extra_stream;
  s.lo = w.lo;
  s.hi = w.hi;
  s.scales = std::move(w.scales);

  Rng rng = make_rng(seed, stream);
  s.X = sample(dist, rng, s.stream_hi - s.stream_lo + 1);
  s.assembled = assemble_window(*family, s.scales, s.lo, s.hi,
                                std::span<const Scalar>(s.X).subspan(static_cast<std::size_t>(s.lo - s.stream_lo)));
  validate_vector(space, s.assembled);

  if (deltas) {
    const long H = std::max(2 * N, N + 256);
    const MajorantSeries M(space, *family, delta_abs(*deltas), H, Side::Both);
    s.tail_certificate = M.verdict() == Verdict::Pass ? M.tail(N) : std::numeric_limits<double>::infinity();
  }
  return s;
}

TruncatedVector orbit_coefficients(const RandomVectorSample& s, long m) {
  if (m < 0) throw InvalidArgument("orbit step must be >= 0");
  if (m > s.stream_hi - std::max(s.lo, 0L)) {
    std::ostringstream os;
    os << "orbit step " << m << " needs coefficients past the drawn stream (ends at " << s.stream_hi << ")";
    throw OrbitHorizonExceeded(os.str());
  }
  const long top = std::min(s.hi, s.stream_hi - m);
  return assemble_window(*s.family, s.scales, s.lo, top,
                         std::span<const Scalar>(s.X).subspan(static_cast<std::size_t>(s.lo + m - s.stream_lo)));
}

void product_factor(const DistributionSpec& dist, const DeltaSequence& deltas, long N, long horizon, bool bilateral,
                    double& log_value, double& tolerance) {
  log_value = 0.0;
  tolerance = 0.0;
  std::vector<int> sides{1};
  if (bilateral) sides.push_back(-1);
  for (int side : sides) {
    auto d = [&](long k) { return deltas.bilateral() ? deltas(side * k) : deltas(k); };
    for (long k = N + 1; k <= horizon; ++k) log_value += std::log1p(-tail_prob(dist, d(k)));
    std::vector<double> L(static_cast<std::size_t>(horizon + 1));
    for (long k = 0; k <= horizon; ++k) L[static_cast<std::size_t>(k)] = log_tail_prob(dist, d(k));
    const TailClass tc = classify_tail(L, 0);
    const double p_h = tail_prob(dist, d(horizon));
    tolerance += tc.verdict == Verdict::Pass && p_h < 1.0 ? tc.tail_bound / (1.0 - p_h)
                                                           : std::numeric_limits<double>::infinity();
  }
}

BallBound ball_probability_lower_bound(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                       const DistributionSpec& dist, const DeltaSequence& deltas,
                                       const TruncatedVector& target, double eta, long N_min, long mc_reps,
                                       std::uint64_t seed, kernels::Exec exec, long horizon) {
  if (!(eta > 0.0)) throw InvalidArgument("ball radius must be positive");
  if (mc_reps < 1) throw InvalidArgument("mc_reps must be >= 1");
  const bool bil = family->bilateral_index();
  const MajorantSeries M(space, *family, delta_abs(deltas), horizon, bil ? Side::Both : Side::Positive);
  if (M.verdict() != Verdict::Pass)
    throw CertificateError("delta-majorant of sum delta_n u_n is not certified (" + M.rule() + ")");

  BallBound out;
  long N = std::max(1L, N_min);
  while (N <= horizon && !(M.tail(N) < eta / 2.0)) ++N;
  if (N > horizon) throw HorizonExhausted("no N up to the horizon brings the delta tail below eta/2");
  out.N = N;
  out.majorant_tail = M.tail(N);

  const DeltaSequence d_tail = bil ? bilateral_view(deltas) : deltas;
  out.tail = tail_sum(dist, d_tail, std::min(horizon, 512L));
  if (out.tail.verdict != Verdict::Pass)
    throw CertificateError("tail condition sum P(|X| >= delta_n) < inf is not certified (" + out.tail.rule + ")");

  product_factor(dist, deltas, N, horizon, bil, out.log_product_factor, out.product_tolerance);
  out.product_factor = std::exp(out.log_product_factor);

  Window w = sample_window(*family, N);
  kernels::ReplicaSource src{&space, family.get(), &dist, w.lo, w.hi, N, std::move(w.scales), seed};
  const auto flags = kernels::ball_hit_flags(src, {kernels::Ball{target, eta / 2.0}}, mc_reps, exec);
  for (auto f : flags) out.hits += f;
  out.reps = mc_reps;
  out.pB = static_cast<double>(out.hits) / static_cast<double>(mc_reps);
  out.pB_stderr = std::sqrt(out.pB * (1.0 - out.pB) / static_cast<double>(mc_reps));
  out.lower_bound = out.pB * out.product_factor;
  return out;
}

BallEstimate ball_probability_direct(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                     const DistributionSpec& dist, const TruncatedVector& target, double eta, long N,
                                     long reps, std::uint64_t seed, kernels::Exec exec) {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  Window w = sample_window(*family, N);
  kernels::ReplicaSource src{&space, family.get(), &dist, w.lo, w.hi, N, std::move(w.scales), seed};
  const auto flags = kernels::ball_hit_flags(src, {kernels::Ball{target, eta}}, reps, exec);
  BallEstimate e;
  for (auto f : flags) e.hits += f;
  e.reps = reps;
  e.p = static_cast<double>(e.hits) / static_cast<double>(reps);
  e.stderr_ = std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(reps));
  return e;
}

}  // namespace fhc
