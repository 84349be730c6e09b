#include "fhc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fhc/error.hpp"

namespace fhc {

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double stderr_of_mean(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

constexpr std::uint64_t kSpaceStream = 0x5ace5ace;

}  // namespace

TargetBall TargetBall::make(TruncatedVector center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  if (!center.all_finite()) throw InvalidArgument("ball center must be finite");
  return TargetBall{std::move(center), radius};
}

FrequencyReport visit_frequency(const RandomVectorSample& sample, const TargetBall& ball, long N_orbit,
                                kernels::Exec exec) {
  if (!(ball.radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  const std::vector<double> dist =
      kernels::orbit_distances(sample, {kernels::Ball{ball.center, ball.radius}}, N_orbit, exec);
  FrequencyReport r;
  r.seed = sample.seed;
  r.stream = sample.stream;
  r.tail_certificate = sample.tail_certificate;
  const std::size_t len = dist.size();
  r.hits.resize(len);
  r.running.resize(len);
  r.ambiguous.assign(len, 0);
  for (std::size_t n = 0; n < len; ++n) {
    r.hits[n] = dist[n] < ball.radius;
    r.hit_count += r.hits[n];
    r.running[n] = static_cast<double>(r.hit_count) / static_cast<double>(n + 1);
    if (r.tail_certificate && std::fabs(dist[n] - ball.radius) <= *r.tail_certificate) {
      r.ambiguous[n] = 1;
      ++r.ambiguous_count;
    }
  }
  r.liminf_proxy = *std::min_element(r.running.begin() + static_cast<std::ptrdiff_t>(len / 2), r.running.end());
  return r;
}

std::vector<BallSweep> lower_density_sweep(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                           const DistributionSpec& dist, const std::vector<TargetBall>& targets,
                                           const SweepConfig& cfg, kernels::Exec exec) {
  if (targets.empty()) throw InvalidArgument("lower_density_sweep needs at least one target");
  if (cfg.replicas < 1 || cfg.space_reps < 1 || cfg.N_orbit < 0)
    throw InvalidArgument("replicas and space_reps must be >= 1, N_orbit >= 0");
  std::vector<kernels::Ball> balls;
  for (const TargetBall& t : targets) balls.push_back({t.center, t.radius});
  const std::size_t nb = balls.size();

  std::vector<BallSweep> out(nb);
  for (long r = 0; r < cfg.replicas; ++r) {
    const RandomVectorSample s =
        sample_vector(space, family, dist, cfg.N, nullptr, cfg.seed, static_cast<std::uint64_t>(r), cfg.N_orbit);
    const std::vector<std::uint8_t> hits = kernels::visit_hits(s, balls, cfg.N_orbit, exec);
    const long len = cfg.N_orbit + 1;
    for (std::size_t b = 0; b < nb; ++b) {
      long count = 0;
      double proxy = 1.0;
      for (long n = 0; n < len; ++n) {
        count += hits[static_cast<std::size_t>(n) * nb + b];
        if (n >= len / 2) proxy = std::min(proxy, static_cast<double>(count) / static_cast<double>(n + 1));
      }
      out[b].proxies.push_back(proxy);
      out[b].final_freqs.push_back(static_cast<double>(count) / static_cast<double>(len));
    }
  }

  Window w = sample_window(*family, cfg.N);
  kernels::ReplicaSource src{&space, family.get(), &dist, w.lo, w.hi, w.hi, std::move(w.scales),
                             derive_seed(cfg.seed, kSpaceStream)};
  const std::vector<std::uint8_t> flags = kernels::ball_hit_flags(src, balls, cfg.space_reps, exec);

  for (std::size_t b = 0; b < nb; ++b) {
    BallSweep& s = out[b];
    long hits = 0;
    for (long r = 0; r < cfg.space_reps; ++r) hits += flags[static_cast<std::size_t>(r) * nb + b];
    const double M = static_cast<double>(cfg.space_reps);
    s.p_hat = static_cast<double>(hits) / M;
    s.p_stderr = std::sqrt(s.p_hat * (1.0 - s.p_hat) / M);
    s.mean_proxy = mean(s.proxies);
    s.min_proxy = *std::min_element(s.proxies.begin(), s.proxies.end());
    s.proxy_stderr = stderr_of_mean(s.proxies);
    const double se = std::hypot(s.proxy_stderr, s.p_stderr);
    const double gap = std::fabs(s.mean_proxy - s.p_hat);
    s.birkhoff_z = se > 0.0 ? gap / se : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    s.birkhoff_consistent = s.birkhoff_z <= cfg.birkhoff_sigmas;
  }
  return out;
}

MixingReport mixing_correlation(const SpaceSpec& space, std::shared_ptr<const UFamily> family,
                                const DistributionSpec& dist, const TargetBall& A, const TargetBall& B,
                                const std::vector<long>& n_grid, long M, long N, std::uint64_t seed,
                                kernels::Exec exec) {
  if (n_grid.empty()) throw InvalidArgument("mixing grid is empty");
  if (M < 2) throw InvalidArgument("mixing needs at least two replicas");
  const long n_max = *std::max_element(n_grid.begin(), n_grid.end());
  Window w = sample_window(*family, N);
  kernels::ReplicaSource src{&space, family.get(), &dist, w.lo, w.hi, w.hi + std::max(0L, n_max),
                             std::move(w.scales), seed};
  const std::vector<std::uint8_t> cells =
      kernels::mixing_cells(src, {A.center, A.radius}, {B.center, B.radius}, n_grid, M, exec);

  MixingReport rep;
  rep.reps = M;
  rep.N = N;
  rep.note = "exactness is not estimated";
  if (family->kind() == FamilyKind::BilateralShift)
    rep.note += "; an invertible bilateral shift cannot carry an exact invariant measure";
  const std::size_t ng = n_grid.size();
  const double m = static_cast<double>(M);
  for (std::size_t g = 0; g < ng; ++g) {
    long c[4] = {0, 0, 0, 0};
    for (long r = 0; r < M; ++r) ++c[cells[static_cast<std::size_t>(r) * ng + g]];
    MixingRow row;
    row.n = n_grid[g];
    row.joint = static_cast<double>(c[3]) / m;
    row.pA = static_cast<double>(c[2] + c[3]) / m;
    row.pB = static_cast<double>(c[1] + c[3]) / m;
    row.product = row.pA * row.pB;
    row.difference = row.joint - row.product;
    // delta-method variance of joint - pA pB from the influence function
    const double f[4] = {0.0, -row.pA, -row.pB, 1.0 - row.pA - row.pB};
    double e1 = 0.0, e2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double q = static_cast<double>(c[k]) / m;
      e1 += q * f[k];
      e2 += q * f[k] * f[k];
    }
    row.stderr_ = std::sqrt(std::max(0.0, e2 - e1 * e1) / m);
    row.structurally_independent = family->diagonal() && row.n > 2 * N;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace fhc
