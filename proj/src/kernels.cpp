#include "fhc/kernels.hpp"

#include <exception>
#include <span>

#include "fhc/error.hpp"
#include "fhc/random_vectors.hpp"

namespace fhc::kernels {

std::string to_string(Exec e) { return e == Exec::Serial ? "serial" : "parallel"; }

namespace {

std::vector<Scalar> draw_stream(const ReplicaSource& src, long r) {
  Rng rng = make_rng(src.seed, static_cast<std::uint64_t>(r));
  return sample(*src.dist, rng, src.stream_hi - src.lo + 1);
}

void ball_replica(const ReplicaSource& src, const std::vector<Ball>& balls, long r, std::uint8_t* out) {
  const std::vector<Scalar> X = draw_stream(src, r);
  const TruncatedVector v = assemble_window(*src.family, src.scales, src.lo, src.hi, X);
  for (std::size_t b = 0; b < balls.size(); ++b) out[b] = distance(*src.space, v, balls[b].center) < balls[b].radius;
}

void mixing_replica(const ReplicaSource& src, const Ball& A, const Ball& B, const std::vector<long>& grid, long r,
                    std::uint8_t* out) {
  const std::vector<Scalar> X = draw_stream(src, r);
  const std::span<const Scalar> all(X);
  const TruncatedVector v = assemble_window(*src.family, src.scales, src.lo, src.hi, all);
  const std::uint8_t inB = distance(*src.space, v, B.center) < B.radius;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const TruncatedVector Tn =
        assemble_window(*src.family, src.scales, src.lo, src.hi, all.subspan(static_cast<std::size_t>(grid[g])));
    const std::uint8_t inA = distance(*src.space, Tn, A.center) < A.radius;
    out[g] = static_cast<std::uint8_t>(inB | (inA << 1));
  }
}

void visit_step(const RandomVectorSample& s, const std::vector<Ball>& balls, long n, std::uint8_t* out) {
  const TruncatedVector orbit = orbit_coefficients(s, n);
  for (std::size_t b = 0; b < balls.size(); ++b) out[b] = distance(s.space, orbit, balls[b].center) < balls[b].radius;
}

void distance_step(const RandomVectorSample& s, const std::vector<Ball>& balls, long n, double* out) {
  const TruncatedVector orbit = orbit_coefficients(s, n);
  for (std::size_t b = 0; b < balls.size(); ++b) out[b] = distance(s.space, orbit, balls[b].center);
}

void check_mixing(const ReplicaSource& src, const std::vector<long>& grid) {
  for (long n : grid) {
    if (n < 0) throw InvalidArgument("mixing grid entries must be >= 0");
    if (src.hi + n > src.stream_hi) throw OrbitHorizonExceeded("mixing grid reaches past the drawn stream");
  }
}

void check_visits(const RandomVectorSample& s, long N_orbit) {
  if (N_orbit < 0) throw InvalidArgument("N_orbit must be >= 0");
  if (N_orbit > s.stream_hi - std::max(s.lo, 0L))
    throw OrbitHorizonExceeded("N_orbit " + std::to_string(N_orbit) + " exceeds the orbit horizon of the sample");
}

// Runs body(i) for i in [0, n) across threads; the first exception is rethrown.
template <class Body>
void parallel_for(long n, Body body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(fhc_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

namespace serial {

std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(reps) * balls.size());
  for (long r = 0; r < reps; ++r) ball_replica(src, balls, r, out.data() + r * static_cast<long>(balls.size()));
  return out;
}

std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps) {
  check_mixing(src, grid);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(reps) * grid.size());
  for (long r = 0; r < reps; ++r) mixing_replica(src, A, B, grid, r, out.data() + r * static_cast<long>(grid.size()));
  return out;
}

std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit) {
  check_visits(s, N_orbit);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(N_orbit + 1) * balls.size());
  for (long n = 0; n <= N_orbit; ++n) visit_step(s, balls, n, out.data() + n * static_cast<long>(balls.size()));
  return out;
}

std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit) {
  check_visits(s, N_orbit);
  std::vector<double> out(static_cast<std::size_t>(N_orbit + 1) * balls.size());
  for (long n = 0; n <= N_orbit; ++n) distance_step(s, balls, n, out.data() + n * static_cast<long>(balls.size()));
  return out;
}

}  // namespace serial

namespace omp {

std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(reps) * balls.size());
  parallel_for(reps, [&](long r) { ball_replica(src, balls, r, out.data() + r * static_cast<long>(balls.size())); });
  return out;
}

std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps) {
  check_mixing(src, grid);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(reps) * grid.size());
  parallel_for(reps, [&](long r) { mixing_replica(src, A, B, grid, r, out.data() + r * static_cast<long>(grid.size())); });
  return out;
}

std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit) {
  check_visits(s, N_orbit);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(N_orbit + 1) * balls.size());
  parallel_for(N_orbit + 1, [&](long n) { visit_step(s, balls, n, out.data() + n * static_cast<long>(balls.size())); });
  return out;
}

std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit) {
  check_visits(s, N_orbit);
  std::vector<double> out(static_cast<std::size_t>(N_orbit + 1) * balls.size());
  parallel_for(N_orbit + 1,
               [&](long n) { distance_step(s, balls, n, out.data() + n * static_cast<long>(balls.size())); });
  return out;
}

}  // namespace omp

std::vector<std::uint8_t> ball_hit_flags(const ReplicaSource& src, const std::vector<Ball>& balls, long reps, Exec e) {
  return e == Exec::Serial ? serial::ball_hit_flags(src, balls, reps) : omp::ball_hit_flags(src, balls, reps);
}

std::vector<std::uint8_t> mixing_cells(const ReplicaSource& src, const Ball& A, const Ball& B,
                                       const std::vector<long>& grid, long reps, Exec e) {
  return e == Exec::Serial ? serial::mixing_cells(src, A, B, grid, reps) : omp::mixing_cells(src, A, B, grid, reps);
}

std::vector<std::uint8_t> visit_hits(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit,
                                     Exec e) {
  return e == Exec::Serial ? serial::visit_hits(s, balls, N_orbit) : omp::visit_hits(s, balls, N_orbit);
}

std::vector<double> orbit_distances(const RandomVectorSample& s, const std::vector<Ball>& balls, long N_orbit, Exec e) {
  return e == Exec::Serial ? serial::orbit_distances(s, balls, N_orbit) : omp::orbit_distances(s, balls, N_orbit);
}

}  // namespace fhc::kernels
