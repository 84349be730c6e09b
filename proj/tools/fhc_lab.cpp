#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fhc/config.hpp"
#include "fhc/error.hpp"
#include "fhc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random-series experiments for weighted shifts and frequently hypercyclic vectors"};
  app.set_version_flag("--version", std::string(FHC_VERSION));

  std::string command, config_path, out_dir = ".";
  bool plot = false;
  std::uint64_t seed = 0;
  long horizon = 0;

  app.add_option("command", command, "What to run")
      ->required()
      ->check(CLI::IsMember(fhc::command_names()));
  app.add_option("--config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Directory for CSV files and manifest.json");
  app.add_flag("--plot", plot, "Also write SVG plots");
  auto* seed_opt = app.add_option("--seed-override", seed, "Replace run.seed");
  auto* horizon_opt = app.add_option("--horizon", horizon, "Replace run.horizon")->check(CLI::Range(16L, 1L << 24));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fhc::kExitConfig;
  }

  fhc::ExperimentConfig cfg;
  try {
    cfg = fhc::load_config(config_path);
  } catch (const fhc::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return fhc::kExitConfig;
  }

  fhc::RunOptions opt;
  opt.out_dir = out_dir;
  opt.plot = plot;
  if (*seed_opt) opt.seed_override = seed;
  if (*horizon_opt) opt.horizon_override = horizon;

  const fhc::RunResult res = fhc::run(cfg, *fhc::parse_command(command), opt);
  for (const auto& c : res.certificates)
    std::cout << c.name << ": " << c.verdict << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  for (const auto& p : res.outputs) std::cout << "wrote " << p.string() << '\n';
  if (!res.message.empty()) std::cerr << res.message << '\n';
  return res.exit_code;
}
