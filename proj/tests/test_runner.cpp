#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fhc/csv.hpp"
#include "fhc/error.hpp"
#include "fhc/runner.hpp"

using namespace fhc;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(space:
  kind: lp
  p: 2
weights:
  rule: constant
  lambda: 2
distribution:
  law: gaussian
run:
  seed: 7
)";

const char* kDensity = R"(space:
  kind: lp
  p: 2
weights:
  rule: constant
  lambda: 2
distribution:
  law: annulus
  delta:
    source: linear
    slope: 1
    offset: 1
run:
  seed: 1
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fhc_test_runner_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("parse_config accepts a minimal document") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.run.seed == 7);
  CHECK(cfg.space.is_lp());
  CHECK(cfg.space.p() == 2.0);
  CHECK(cfg.law.law == "gaussian");
  CHECK_FALSE(cfg.delta);
  CHECK(cfg.run.N == 60);
  CHECK(cfg.source_text == kMinimal);
}

TEST_CASE("parse_config rejects invalid documents with line numbers") {
  std::string bad_p = kMinimal;
  bad_p.replace(bad_p.find("p: 2"), 4, "p: 0.5");
  const auto e1 = config_error(bad_p);
  CHECK(e1.find("line 3") != std::string::npos);

  std::string no_seed = kMinimal;
  no_seed.replace(no_seed.find("  seed: 7\n"), 10, "  N: 10\n");
  CHECK(config_error(no_seed).find("seed") != std::string::npos);

  const auto e3 = config_error(std::string(kMinimal) + "  colour: blue\n");
  CHECK(e3.find("line 11") != std::string::npos);
  CHECK(e3.find("colour") != std::string::npos);

  CHECK(config_error(std::string(kMinimal) + "extras:\n  a: 1\n").find("unknown top-level section") !=
        std::string::npos);
  CHECK_FALSE(config_error("space:\n  kind: lp\nweights:\n  rule: linear\ndistribution:\n  law: annulus\nrun:\n  seed: 1\n")
                  .empty());
  CHECK_FALSE(config_error("space: [1, 2\n").empty());
  CHECK_FALSE(config_error(std::string(kMinimal) + "  exec: threads\n").empty());
  CHECK_FALSE(config_error("space:\n  kind: c0\nweights:\n  rule: constant\ndistribution:\n  law: gaussian\nrun:\n"
                           "  seed: 1\n  family: fhc\n")
                  .empty());
}

TEST_CASE("config hash") {
  const auto h = config_hash(kMinimal);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(h == config_hash(kMinimal));
  CHECK(h != config_hash(kDensity));
  CHECK(config_hash("") == "cbf29ce484222325");
}

TEST_CASE("command names round trip") {
  for (const auto& name : command_names()) {
    const auto c = parse_command(name);
    REQUIRE(c);
    CHECK(to_string(*c) == name);
  }
  CHECK_FALSE(parse_command("frobnicate"));
}

TEST_CASE("density-check totals one") {
  const auto dir = scratch("density");
  const auto res = run(parse_config(kDensity), Command::DensityCheck, {dir});
  CHECK(res.exit_code == kExitOk);
  const std::string csv = slurp(dir / "density.csv");
  CHECK(csv.find("\ntotal,,,,,,1\n") != std::string::npos);
  const auto m = manifest(dir);
  CHECK(m["command"] == "density-check");
  CHECK(m["seed"] == 1);
  CHECK(m["config_hash"] == config_hash(kDensity));
  CHECK(m["exit_code"] == 0);
  for (const auto& c : m["certificates"]) CHECK(c["verdict"] == "pass");
}

TEST_CASE("density-check with a bounded delta exits with a certificate failure") {
  std::string text = kDensity;
  text.replace(text.find("slope: 1"), 8, "slope: 0");
  const auto dir = scratch("bounded");
  const auto res = run(parse_config(text), Command::DensityCheck, {dir});
  CHECK(res.exit_code == kExitCertificate);
  CHECK(manifest(dir)["certificates"].back()["name"] == "annulus-density");
}

TEST_CASE("series-check on the power-log counterexample") {
  const char* text = R"(space:
  kind: lp
  p: 2
weights:
  rule: power_log
  a: 1.0
  b: 0.5
distribution:
  law: gaussian
run:
  seed: 3
  series: [plain, sqrt_log]
)";
  const auto dir = scratch("series");
  const auto res = run(parse_config(text), Command::SeriesCheck, {dir});
  CHECK(res.exit_code == kExitCertificate);
  const auto m = manifest(dir);
  bool plain = false, sqrt_log = false;
  for (const auto& c : m["certificates"]) {
    if (c["name"] == "series-plain") plain = c["verdict"] == "pass";
    if (c["name"] == "series-sqrt_log") {
      sqrt_log = c["verdict"] == "fail";
      CHECK_FALSE(c["detail"].get<std::string>().empty());
    }
  }
  CHECK(plain);
  CHECK(sqrt_log);
}

TEST_CASE("sample is byte-identical across runs and execution modes") {
  std::string text = std::string(kMinimal) + "  N: 40\n";
  const auto a = scratch("sample_a"), b = scratch("sample_b"), c = scratch("sample_c");
  CHECK(run(parse_config(text), Command::Sample, {a}).exit_code == kExitOk);
  CHECK(run(parse_config(text), Command::Sample, {b}).exit_code == kExitOk);
  CHECK(run(parse_config(text + "  exec: serial\n"), Command::Sample, {c}).exit_code == kExitOk);
  for (const char* f : {"sample.csv", "sample_summary.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  RunOptions other{scratch("sample_d")};
  other.seed_override = 8;
  run(parse_config(text), Command::Sample, other);
  CHECK(slurp(a / "sample.csv") != slurp(other.out_dir / "sample.csv"));
  CHECK(manifest(other.out_dir)["seed"] == 8);
}

TEST_CASE("missing inputs map to the config exit code") {
  const auto dir = scratch("missing");
  const auto res = run(parse_config(kMinimal), Command::LowerDensity, {dir});
  CHECK(res.exit_code == kExitConfig);
  CHECK(res.message.find("run.targets") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(run(parse_config(kMinimal), Command::DensityCheck, {dir}).exit_code == kExitConfig);
}

TEST_CASE("an uncertified family is a certificate failure unless waived") {
  std::string text = kMinimal;
  text.replace(text.find("lambda: 2"), 9, "lambda: 1");
  const auto dir = scratch("waive");
  const auto res = run(parse_config(text), Command::Sample, {dir});
  CHECK(res.exit_code == kExitCertificate);
  CHECK(res.certificates.back().name == "prerequisite");
  text.replace(text.find("lambda: 1"), 9, "lambda: 1\n  waive_certificate: true");
  const auto waived = run(parse_config(text), Command::Sample, {dir});
  CHECK(waived.exit_code == kExitOk);
  CHECK_FALSE(manifest(dir)["notes"].empty());
}

TEST_CASE("fhc-build writes a ledger") {
  const auto dir = scratch("fhc");
  const auto res = run(parse_config(std::string(kMinimal) + "  family: fhc\n  K: 5\n"), Command::FhcBuild, {dir});
  CHECK(res.exit_code == kExitOk);
  const std::string ledger = slurp(dir / "fhc_ledger.csv");
  CHECK(ledger.rfind("k,l,check,lhs,bound,slack,holds\n", 0) == 0);
  CHECK(ledger.find(",0\n") == std::string::npos);
}

TEST_CASE("command line tool") {
  const std::string lab = FHC_LAB_PATH;
  const auto dir = scratch("cli");
  {
    std::ofstream(dir / "density.yaml") << kDensity;
  }
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  auto call = [&](const std::string& args) {
    const int rc = std::system((q(lab) + " " + args + " > " + q(dir / "stdout.txt") + " 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(call("--version") == 0);
  CHECK(call("density-check --config " + q(dir / "density.yaml") + " --out " + q(dir / "out") + " --plot") == 0);
  CHECK(fs::exists(dir / "out" / "density.csv"));
  CHECK(fs::exists(dir / "out" / "density.svg"));
  CHECK(slurp(dir / "stdout.txt").find("tail-sum: pass") != std::string::npos);
  CHECK(call("frobnicate --config " + q(dir / "density.yaml")) == kExitConfig);
  CHECK(call("density-check --config " + q(dir / "nope.yaml")) == kExitConfig);
  CHECK(call("density-check --config " + q(dir / "density.yaml") + " --horizon 3") == kExitConfig);
  {
    std::ofstream(dir / "broken.yaml") << "space:\n  kind: lp\n  p: 0.5\n";
  }
  CHECK(call("density-check --config " + q(dir / "broken.yaml")) == kExitConfig);
  CHECK(slurp(dir / "stdout.txt").find("line 3") != std::string::npos);
}

TEST_CASE("delta-build covers both sides of a bilateral shift") {
  const char* text = R"(space:
  kind: lp
  p: 2
weights:
  rule: two_sided
  positive: 2
  negative: 0.5
distribution:
  law: annulus
  delta:
    source: symmetrized
    eps_ratio: 1
run:
  seed: 12
  N: 10
  horizon: 512
)";
  const auto dir = scratch("delta");
  const auto res = run(parse_config(text), Command::DeltaBuild, {dir});
  CHECK(res.exit_code == kExitOk);
  const std::string csv = slurp(dir / "delta.csv");
  CHECK(csv.rfind("n,eps,delta,block\n-10,", 0) == 0);
  CHECK(slurp(dir / "delta_blocks.csv").find("\nminus,1,") != std::string::npos);
}

TEST_CASE("a row interrupted by an exception is not written") {
  const auto dir = scratch("csv");
  {
    CsvWriter w(dir / "t.csv", {"a", "b"});
    w.row() << 1L << 2L;
    try {
      w.row() << 3L << [] () -> long { throw std::runtime_error("boom"); }();
    } catch (const std::runtime_error&) {
    }
  }
  CHECK(slurp(dir / "t.csv") == "a,b\n1,2\n");
}
