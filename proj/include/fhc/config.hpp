#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fhc/distributions.hpp"
#include "fhc/shift.hpp"
#include "fhc/space.hpp"

namespace fhc {

// Configuration documents are YAML with four top-level sections:
//
//   space:        kind (lp | c0 | entire | disk), p, R, radii, field
//   weights:      rule (constant | linear | table | two_sided | power_log),
//                 lambda, entries, fallback, positive, negative, a, b,
//                 bilateral, waive_certificate
//   distribution: law (gaussian | uniform | custom_tail | annulus), mean,
//                 variance, bound, t, p, and an optional delta block
//                 (source: linear | table | builder | symmetrized)
//   run:          seed (required), family, polynomial, N, N_orbit, K,
//                 replicas, reps, space_reps, horizon, series, tol, eta,
//                 targets, mixing, exec, growth
//
// The README lists every key with its default.

struct DeltaConfig {
  std::string source = "linear";  // linear | table | builder | symmetrized
  double slope = 1.0;
  double offset = 1.0;
  std::vector<double> values;
  // builder / symmetrized: eps_n = amplitude * ratio^|n|
  double eps_amplitude = 1.0;
  double eps_ratio = 0.5;
};

struct LawConfig {
  std::string law = "gaussian";  // gaussian | uniform | custom_tail | annulus
  double mean = 0.0;
  double variance = 1.0;
  double bound = 1.0;
  std::vector<double> t, p;
};

struct TargetConfig {
  long lo = 0;
  std::vector<double> center;
  double radius = 0.5;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string family = "shift";  // shift | polynomial | fhc
  std::vector<double> polynomial;
  long N = 60;
  long N_orbit = 1000;
  long K = 8;
  long replicas = 8;
  long reps = 10000;
  long space_reps = 10000;
  long horizon = 2048;
  std::vector<std::string> series{"plain"};
  double tol = 1e-6;
  double eta = 0.5;
  double growth = 0.05;
  std::vector<TargetConfig> targets;
  std::vector<long> mixing_grid;
  long mixing_A = 0, mixing_B = 0;  // indices into targets
  std::string exec = "parallel";
};

struct ExperimentConfig {
  SpaceSpec space = SpaceSpec::lp(2.0);
  WeightSequence weights = WeightSequence::constant(2.0);
  bool waive_certificate = false;
  LawConfig law;
  std::optional<DeltaConfig> delta;
  RunConfig run;
  std::string source_text;
};

/// Parses and validates a whole document; errors name the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the config text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace fhc
