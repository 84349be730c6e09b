#include "fhc/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fhc/error.hpp"

namespace fhc {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& where, const std::string& what) {
  std::ostringstream os;
  if (node.IsDefined() && !node.Mark().is_null()) os << "line " << node.Mark().line + 1 << ": ";
  os << where << ": " << what;
  throw ConfigError(os.str());
}

class Section {
 public:
  Section(const YAML::Node& root, const std::string& name, std::set<std::string> allowed, bool required)
      : name_(name) {
    node_ = root[name];
    if (!node_) {
      if (required) fail(root, name, "section is missing");
      return;
    }
    check(allowed);
  }

  // a nested mapping such as one entry of run.targets
  Section(const YAML::Node& node, const std::string& name, const std::set<std::string>& allowed)
      : name_(name), node_(node) {
    check(allowed);
  }

  bool present() const { return static_cast<bool>(node_); }
  bool has(const std::string& key) const { return node_ && node_[key]; }
  YAML::Node at(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }
  std::string where(const std::string& key) const { return name_ + "." + key; }
  const YAML::Node& node() const { return node_; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return convert<T>(at(key), where(key));
  }

  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) fail(node_, where(key), "required key is missing");
    return convert<T>(at(key), where(key));
  }

  template <class T>
  static T convert(const YAML::Node& n, const std::string& where) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, where, "has the wrong type");
    }
  }

 private:
  void check(const std::set<std::string>& allowed) const {
    if (!node_.IsMap()) fail(node_, name_, "must be a mapping");
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, name_ + "." + key, "unknown key");
    }
  }

  std::string name_;
  YAML::Node node_;
};

double positive(const Section& s, const std::string& key, double fallback) {
  const double v = s.get<double>(key, fallback);
  if (!(v > 0.0)) fail(s.at(key), s.where(key), "must be positive");
  return v;
}

long at_least(const Section& s, const std::string& key, long fallback, long lo) {
  const long v = s.get<long>(key, fallback);
  if (v < lo) fail(s.at(key), s.where(key), "must be >= " + std::to_string(lo));
  return v;
}

Field parse_field(const Section& s) {
  const std::string f = s.get<std::string>("field", "real");
  if (f == "real") return Field::Real;
  if (f == "complex") return Field::Complex;
  fail(s.at("field"), s.where("field"), "must be real or complex");
}

SpaceSpec parse_space(const YAML::Node& root) {
  const Section s(root, "space", {"kind", "p", "R", "radii", "field"}, true);
  const std::string kind = s.require<std::string>("kind");
  const Field field = parse_field(s);
  try {
    if (kind == "lp") return SpaceSpec::lp(s.get<double>("p", 2.0), field);
    if (kind == "c0") return SpaceSpec::c0(field);
    if (kind == "entire")
      return s.has("radii") ? SpaceSpec::entire(s.get<std::vector<double>>("radii", {}), field)
                            : SpaceSpec::entire(field);
    if (kind == "disk") {
      const double R = s.require<double>("R");
      return s.has("radii") ? SpaceSpec::disk(R, s.get<std::vector<double>>("radii", {}), field)
                            : SpaceSpec::disk(R, field);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    // point at the numeric key the constructor rejected
    const std::vector<std::string> keys = kind == "lp" ? std::vector<std::string>{"p"}
                                          : kind == "disk" ? std::vector<std::string>{"R", "radii"}
                                                           : std::vector<std::string>{"radii"};
    for (const std::string& key : keys)
      if (s.has(key)) fail(s.at(key), s.where(key), e.what());
    fail(s.node(), "space", e.what());
  }
  fail(s.at("kind"), s.where("kind"), "must be lp, c0, entire or disk");
}

WeightSequence parse_weights(const YAML::Node& root, bool& waive) {
  const Section s(root, "weights",
                  {"rule", "lambda", "entries", "fallback", "positive", "negative", "a", "b", "bilateral",
                   "waive_certificate"},
                  true);
  const std::string rule = s.require<std::string>("rule");
  const bool bilateral = s.get<bool>("bilateral", false);
  waive = s.get<bool>("waive_certificate", false);
  try {
    if (rule == "constant") return WeightSequence(ConstantWeights{s.get<double>("lambda", 2.0)}, bilateral);
    if (rule == "linear") return WeightSequence(LinearWeights{}, bilateral);
    if (rule == "two_sided")
      return WeightSequence(TwoSidedWeights{s.get<double>("positive", 2.0), s.get<double>("negative", 0.5)}, true);
    if (rule == "power_log")
      return WeightSequence(PowerLogBeta{s.get<double>("a", 1.0), s.get<double>("b", 0.5)}, bilateral);
    if (rule == "table") {
      TableWeights t;
      t.fallback = s.get<double>("fallback", 1.0);
      if (s.has("entries")) {
        const YAML::Node e = s.at("entries");
        if (!e.IsMap()) fail(e, s.where("entries"), "must map indices to weights");
        for (const auto& kv : e)
          t.entries[Section::convert<long>(kv.first, s.where("entries"))] =
              Section::convert<double>(kv.second, s.where("entries"));
      }
      return WeightSequence(std::move(t), bilateral);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    fail(s.node(), "weights", e.what());
  }
  fail(s.at("rule"), s.where("rule"), "must be constant, linear, table, two_sided or power_log");
}

void parse_distribution(const YAML::Node& root, ExperimentConfig& cfg) {
  const Section s(root, "distribution", {"law", "mean", "variance", "bound", "t", "p", "delta"}, true);
  LawConfig& law = cfg.law;
  law.law = s.require<std::string>("law");
  if (law.law == "gaussian") {
    law.mean = s.get<double>("mean", 0.0);
    law.variance = positive(s, "variance", 1.0);
  } else if (law.law == "uniform") {
    law.bound = positive(s, "bound", 1.0);
  } else if (law.law == "custom_tail") {
    law.t = s.require<std::vector<double>>("t");
    law.p = s.require<std::vector<double>>("p");
    try {
      make_custom_tail(law.t, law.p);
    } catch (const InvalidArgument& e) {
      fail(s.at("t"), "distribution", e.what());
    }
  } else if (law.law != "annulus") {
    fail(s.at("law"), s.where("law"), "must be gaussian, uniform, custom_tail or annulus");
  }

  if (s.has("delta")) {
    const Section d(s.at("delta"), "distribution.delta",
                    {"source", "slope", "offset", "values", "eps_amplitude", "eps_ratio"});
    DeltaConfig dc;
    dc.source = d.get<std::string>("source", "linear");
    if (dc.source == "linear") {
      dc.slope = d.get<double>("slope", 1.0);
      dc.offset = d.get<double>("offset", 1.0);
      if (dc.slope < 0.0 || dc.offset < 0.0) fail(s.at("delta"), "distribution.delta", "slope and offset must be >= 0");
    } else if (dc.source == "table") {
      dc.values = d.require<std::vector<double>>("values");
      if (dc.values.empty()) fail(s.at("delta"), "distribution.delta.values", "must not be empty");
    } else if (dc.source == "builder" || dc.source == "symmetrized") {
      dc.eps_amplitude = d.get<double>("eps_amplitude", 1.0);
      dc.eps_ratio = d.get<double>("eps_ratio", 0.5);
      if (dc.eps_amplitude < 0.0 || dc.eps_ratio < 0.0)
        fail(s.at("delta"), "distribution.delta", "eps_amplitude and eps_ratio must be >= 0");
    } else {
      fail(s.at("delta"), "distribution.delta.source", "must be linear, table, builder or symmetrized");
    }
    cfg.delta = dc;
  } else if (law.law == "annulus") {
    fail(s.node(), "distribution", "the annulus law needs a delta block");
  }
}

void parse_run(const YAML::Node& root, RunConfig& run) {
  const Section s(root, "run",
                  {"seed", "family", "polynomial", "N", "N_orbit", "K", "replicas", "reps", "space_reps", "horizon",
                   "series", "tol", "eta", "growth", "targets", "mixing", "exec"},
                  true);
  if (!s.has("seed")) fail(s.node(), "run.seed", "a seed is required");
  run.seed = s.require<std::uint64_t>("seed");
  run.family = s.get<std::string>("family", "shift");
  if (run.family != "shift" && run.family != "polynomial" && run.family != "fhc")
    fail(s.at("family"), s.where("family"), "must be shift, polynomial or fhc");
  run.polynomial = s.get<std::vector<double>>("polynomial", {});
  if (run.family == "polynomial" && (run.polynomial.empty() || run.polynomial[0] == 0.0))
    fail(s.node(), s.where("polynomial"), "needs coefficients a_1, a_2, ... with a_1 != 0");
  run.N = at_least(s, "N", run.N, 1);
  run.N_orbit = at_least(s, "N_orbit", run.N_orbit, 0);
  run.K = at_least(s, "K", run.K, 1);
  run.replicas = at_least(s, "replicas", run.replicas, 1);
  run.reps = at_least(s, "reps", run.reps, 2);
  run.space_reps = at_least(s, "space_reps", run.space_reps, 1);
  run.horizon = at_least(s, "horizon", run.horizon, kMinClassifierHorizon);
  run.series = s.get<std::vector<std::string>>("series", run.series);
  for (const std::string& k : run.series)
    if (k != "plain" && k != "sqrt_log") fail(s.at("series"), s.where("series"), "entries must be plain or sqrt_log");
  run.tol = positive(s, "tol", run.tol);
  run.eta = positive(s, "eta", run.eta);
  run.growth = positive(s, "growth", run.growth);
  run.exec = s.get<std::string>("exec", run.exec);
  if (run.exec != "serial" && run.exec != "parallel") fail(s.at("exec"), s.where("exec"), "must be serial or parallel");

  if (s.has("targets")) {
    const YAML::Node t = s.at("targets");
    if (!t.IsSequence()) fail(t, s.where("targets"), "must be a list");
    for (const auto& item : t) {
      const Section ts(YAML::Node(item), "run.targets", {"lo", "center", "radius"});
      TargetConfig tc;
      tc.lo = ts.get<long>("lo", 0);
      tc.center = ts.require<std::vector<double>>("center");
      tc.radius = ts.get<double>("radius", run.eta);
      if (!(tc.radius > 0.0)) fail(item, "run.targets.radius", "must be positive");
      if (tc.center.empty()) fail(item, "run.targets.center", "must not be empty");
      run.targets.push_back(tc);
    }
  }
  if (s.has("mixing")) {
    const Section m(s.at("mixing"), "run.mixing", {"from", "to", "step", "A", "B"});
    const long from = m.get<long>("from", 0), to = m.get<long>("to", 100), step = m.get<long>("step", 5);
    if (from < 0 || to < from || step < 1) fail(s.at("mixing"), "run.mixing", "needs 0 <= from <= to and step >= 1");
    for (long n = from; n <= to; n += step) run.mixing_grid.push_back(n);
    run.mixing_A = m.get<long>("A", 0);
    run.mixing_B = m.get<long>("B", 0);
    const long nt = static_cast<long>(run.targets.size());
    if (run.mixing_A < 0 || run.mixing_A >= nt || run.mixing_B < 0 || run.mixing_B >= nt)
      fail(s.at("mixing"), "run.mixing", "A and B must index run.targets");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping with space, weights, distribution and run");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (key != "space" && key != "weights" && key != "distribution" && key != "run")
      fail(kv.first, key, "unknown top-level section");
  }
  ExperimentConfig cfg;
  cfg.space = parse_space(root);
  cfg.weights = parse_weights(root, cfg.waive_certificate);
  parse_distribution(root, cfg);
  parse_run(root, cfg.run);
  if (cfg.run.family == "fhc" && (!cfg.space.is_lp() || cfg.space.field() != Field::Real || cfg.weights.bilateral()))
    throw ConfigError("run.family: fhc needs a real lp space and unilateral weights");
  if (cfg.weights.bilateral() && !cfg.space.allows_bilateral())
    throw ConfigError("weights.bilateral: bilateral shifts need an lp or c0 space");
  cfg.source_text = text;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fhc
