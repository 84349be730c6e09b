#include "fhc/delta_builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhc/error.hpp"

namespace fhc {

long StaircaseRecord::block_of(long n) const {
  const long below = static_cast<long>(std::lower_bound(N.begin(), N.end(), n) - N.begin());
  return std::max(1L, below);
}

DeltaBuild build_delta(const SpaceSpec& space, const UFamily& family, std::function<double(long)> eps_abs,
                       long horizon, Side side) {
  if (side == Side::Both) throw InvalidArgument("build_delta works on one side at a time");
  auto eps = [eps_abs](long n) { return std::fabs(eps_abs(std::labs(n))); };
  const MajorantSeries M(space, family, eps, horizon, side);
  if (M.verdict() != Verdict::Pass)
    throw CertificateError("convergence certificate unavailable for sum eps_n u_n (" + M.rule() + ")");

  auto record = std::make_shared<StaircaseRecord>();
  record->horizon = horizon;
  record->side = side;

  // finite support: the whole series is one block
  long zero_from = -1;
  if (M.remainder() == 0.0) {
    for (long N = 0; N <= horizon; ++N)
      if (M.tail(N) == 0.0) {
        zero_from = N;
        break;
      }
  }
  if (zero_from >= 0) {
    record->finite_support = true;
    record->N.push_back(zero_from);
    record->tail_at_N.push_back(0.0);
  } else {
    long N = 0;
    for (long k = 1;; ++k) {
      const double target = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
      while (N <= horizon && M.tail(N) > target) ++N;
      if (N > horizon) break;
      record->N.push_back(N);
      record->tail_at_N.push_back(M.tail(N));
      ++N;
    }
    if (record->N.empty()) {
      std::ostringstream os;
      os << "horizon " << horizon << " exhausted before N_1 was found (tail " << M.tail(horizon) << " > 1)";
      throw HorizonExhausted(os.str());
    }
  }

  std::shared_ptr<const StaircaseRecord> rec = record;
  const bool negative = side == Side::Negative;
  std::ostringstream desc;
  desc << "sqrt(k)|eps_n| staircase, " << rec->blocks() << " blocks" << (negative ? ", negative side" : "");
  DeltaSequence delta(
      [rec, eps_abs, negative](long n) {
        long m = std::labs(n);
        if (negative && m == 0) m = 1;
        return std::sqrt(static_cast<double>(rec->block_of(m))) * std::fabs(eps_abs(m));
      },
      false, DeltaProvenance::DeltaBuilder, desc.str());
  return {std::move(delta), std::move(rec)};
}

DeltaSequence symmetrize_delta(const DeltaSequence& plus, const DeltaSequence& minus, long check_horizon) {
  if (plus.bilateral() || minus.bilateral()) throw InvalidArgument("symmetrize_delta takes N-indexed inputs");
  for (const DeltaSequence* d : {&plus, &minus}) {
    const long w = bounded_subsequence_witness(*d, check_horizon);
    if (w >= 0) {
      std::ostringstream os;
      os << "input '" << d->description() << "' is not certified divergent (delta_" << w << " = " << (*d)(w) << ")";
      throw DivergenceRequired(os.str());
    }
  }
  return DeltaSequence([plus, minus](long n) { return std::min(plus(std::labs(n)), minus(std::labs(n))); }, true,
                       DeltaProvenance::Symmetrized, "min(" + plus.description() + ", " + minus.description() + ")");
}

PipelineReport compose_pipeline(const SpaceSpec& space, const UFamily& family, std::function<double(long)> eps_abs,
                                long horizon, Field field, long tail_horizon) {
  PipelineReport rep;
  rep.stage = "build_delta";
  rep.plus = build_delta(space, family, eps_abs, horizon, Side::Positive);
  // a unilateral family has u_n = 0 for n < 0; the positive side is used twice
  rep.minus = family.bilateral_index() ? build_delta(space, family, eps_abs, horizon, Side::Negative) : rep.plus;
  try {
    rep.stage = "symmetrize";
    rep.symmetric = symmetrize_delta(rep.plus->delta, rep.minus->delta);
    rep.stage = "annulus_density";
    rep.density = build_annulus_density(rep.symmetric->naturals(), field);
  } catch (const DivergenceRequired& e) {
    rep.message = e.what();
    return rep;
  }
  rep.stage = "tail_sum";
  const DeltaSequence target = family.bilateral_index() ? *rep.symmetric : rep.symmetric->naturals();
  rep.certificate = tail_sum(*rep.density, target, tail_horizon);
  rep.ok = rep.certificate->verdict == Verdict::Pass;
  rep.message = "tail_sum " + to_string(rep.certificate->verdict) + " (" + rep.certificate->rule + ")";
  return rep;
}

}  // namespace fhc
