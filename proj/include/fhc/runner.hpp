#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fhc/config.hpp"

namespace fhc {

enum class Command { DensityCheck, SeriesCheck, DeltaBuild, Sample, LowerDensity, Mixing, BallBound, FhcBuild, PolyBasis };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);
const std::vector<std::string>& command_names();

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificate = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool plot = false;
  std::optional<std::uint64_t> seed_override;
  std::optional<long> horizon_override;
};

struct CertificateRecord {
  std::string name;
  std::string verdict;  // pass, fail or inconclusive
  std::string detail;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<CertificateRecord> certificates;
  std::vector<std::filesystem::path> outputs;  // CSV and SVG files, manifest last
};

/// Runs one command and writes its CSVs plus manifest.json into out_dir.
/// Never throws: failures map to the exit codes above.
RunResult run(const ExperimentConfig& config, Command command, const RunOptions& options);

}  // namespace fhc
