#pragma once

#include <span>
#include <string>

namespace fhc {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Outcome of classifying a nonnegative series from its terms up to a horizon.
/// tail_bound is an extrapolated bound on the terms past the horizon and is
/// infinite unless the verdict is Pass.
struct TailClass {
  Verdict verdict = Verdict::Inconclusive;
  std::string rule;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  double rate = 0.0;
};

// log_terms[i] = log a_{first_index + i}; -inf encodes a zero term.
// Decision rules, in order: finite support, terms not decaying (fail),
// geometric, power law, log-power law (pass), terms >= c/(n log n) (fail).
TailClass classify_tail(std::span<const double> log_terms, long first_index);

/// Sup-norm analogue: pass iff the terms decay along the trailing half.
/// tail_bound is then the largest term in the last quarter.
TailClass classify_decay(std::span<const double> log_terms, long first_index);

inline constexpr long kMinClassifierHorizon = 16;

}  // namespace fhc
