#include "fhc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "fhc/csv.hpp"
#include "fhc/delta_builder.hpp"
#include "fhc/dynamics.hpp"
#include "fhc/error.hpp"
#include "fhc/fhc_construction.hpp"
#include "fhc/random_vectors.hpp"

#ifndef FHC_VERSION
#define FHC_VERSION "unknown"
#endif

namespace fhc {

namespace {

struct NamedCommand {
  Command command;
  const char* name;
};

constexpr NamedCommand kCommands[] = {
    {Command::DensityCheck, "density-check"}, {Command::SeriesCheck, "series-check"},
    {Command::DeltaBuild, "delta-build"},     {Command::Sample, "sample"},
    {Command::LowerDensity, "lower-density"}, {Command::Mixing, "mixing"},
    {Command::BallBound, "ball-bound"},       {Command::FhcBuild, "fhc-build"},
    {Command::PolyBasis, "poly-basis"},
};

// A failed certificate that ends the command early with exit status 1.
struct CertificateStop {
  std::string name, detail;
};

class Session {
 public:
  Session(ExperimentConfig cfg, Command cmd, RunOptions opt) : cfg_(std::move(cfg)), cmd_(cmd), opt_(std::move(opt)) {
    if (opt_.seed_override) cfg_.run.seed = *opt_.seed_override;
    if (opt_.horizon_override) cfg_.run.horizon = *opt_.horizon_override;
    exec_ = cfg_.run.exec == "serial" ? kernels::Exec::Serial : kernels::Exec::Parallel;
  }

  RunResult execute() {
    try {
      std::filesystem::create_directories(opt_.out_dir);
      dispatch();
      result_.exit_code = kExitOk;
      for (const CertificateRecord& c : result_.certificates)
        if (c.verdict != "pass") {
          result_.exit_code = kExitCertificate;
          if (result_.message.empty()) result_.message = "certificate " + c.name + " did not pass: " + c.detail;
        }
    } catch (const CertificateStop& s) {
      certify(s.name, "fail", s.detail);
      result_.exit_code = kExitCertificate;
      result_.message = "certificate " + s.name + " failed: " + s.detail;
    } catch (const ConfigError& e) {
      result_.exit_code = kExitConfig;
      result_.message = e.what();
    } catch (const CertificateError& e) {
      stop_with("prerequisite", e.what());
    } catch (const DivergenceRequired& e) {
      stop_with("divergence", e.what());
    } catch (const ResidualCheckFailed& e) {
      stop_with("residual", e.what());
    } catch (const InvalidArgument& e) {
      result_.exit_code = kExitConfig;
      result_.message = e.what();
    } catch (const std::exception& e) {
      result_.exit_code = kExitRuntime;
      result_.message = e.what();
    }
    try {
      write_manifest();
    } catch (const std::exception& e) {
      result_.exit_code = kExitRuntime;
      result_.message += std::string(result_.message.empty() ? "" : "; ") + e.what();
    }
    return result_;
  }

 private:
  void stop_with(const std::string& name, const std::string& detail) {
    certify(name, "fail", detail);
    result_.exit_code = kExitCertificate;
    result_.message = "certificate " + name + " failed: " + detail;
  }

  void certify(const std::string& name, const std::string& verdict, const std::string& detail = "") {
    result_.certificates.push_back({name, verdict, detail});
  }
  void certify(const std::string& name, Verdict v, const std::string& detail = "") { certify(name, to_string(v), detail); }

  std::filesystem::path output(const std::string& file) {
    const auto p = opt_.out_dir / file;
    result_.outputs.push_back(p);
    return p;
  }

  std::uint64_t seed() const { return cfg_.run.seed; }

  std::shared_ptr<const UFamily> family() {
    if (family_) return family_;
    const RunConfig& r = cfg_.run;
    if (r.family == "fhc") {
      auto c = std::make_shared<const FhcConstruction>(FhcConstruction::assemble(cfg_.space, cfg_.weights, r.K));
      family_ = std::make_shared<const UFamily>(UFamily::fhc(c));
    } else if (r.family == "polynomial") {
      std::vector<Scalar> a(r.polynomial.begin(), r.polynomial.end());
      family_ = std::make_shared<const UFamily>(
          UFamily::polynomial(cfg_.weights, PolynomialSpec(std::move(a)), std::max(r.N, r.N_orbit) + 1));
    } else {
      UFamily f = certified(UFamily::shift(cfg_.weights), cfg_.space, cfg_.waive_certificate,
                            std::min(r.horizon, 2048L));
      certify("family-series", "pass", f.certificate);
      if (f.waived) notes_.push_back("family series certificate waived: " + f.certificate);
      family_ = std::make_shared<const UFamily>(std::move(f));
    }
    return family_;
  }

  std::function<double(long)> eps() const {
    DeltaConfig d;
    if (cfg_.delta) d = *cfg_.delta;
    return [d](long n) { return d.eps_amplitude * std::pow(d.eps_ratio, static_cast<double>(std::labs(n))); };
  }

  const DeltaSequence& deltas() {
    if (deltas_) return *deltas_;
    if (!cfg_.delta) throw ConfigError("distribution.delta: this command needs a delta block");
    const DeltaConfig& d = *cfg_.delta;
    const bool bil = cfg_.weights.bilateral() && cfg_.run.family == "shift";
    if (d.source == "linear") {
      deltas_ = DeltaSequence::linear(d.slope, d.offset, bil);
    } else if (d.source == "table") {
      deltas_ = DeltaSequence::table(d.values);
    } else if (d.source == "builder") {
      deltas_ = build_delta(cfg_.space, *family(), eps(), cfg_.run.horizon).delta;
    } else {
      PipelineReport rep = compose_pipeline(cfg_.space, *family(), eps(), cfg_.run.horizon, cfg_.space.field());
      if (!rep.symmetric) throw CertificateStop{"pipeline", rep.stage + ": " + rep.message};
      deltas_ = *rep.symmetric;
    }
    return *deltas_;
  }

  const DistributionSpec& law() {
    if (law_) return *law_;
    const LawConfig& l = cfg_.law;
    const Field f = cfg_.space.field();
    if (l.law == "gaussian") {
      law_ = make_gaussian(l.mean, l.variance, f);
    } else if (l.law == "uniform") {
      law_ = make_uniform(l.bound, f);
    } else if (l.law == "custom_tail") {
      law_ = make_custom_tail(l.t, l.p, f);
    } else {
      const DeltaSequence& d = deltas();
      law_ = build_annulus_density(d.bilateral() ? d.naturals() : d, f, cfg_.run.horizon);
    }
    return *law_;
  }

  std::vector<TargetBall> targets() const {
    if (cfg_.run.targets.empty()) throw ConfigError("run.targets: this command needs at least one target");
    std::vector<TargetBall> out;
    for (const TargetConfig& t : cfg_.run.targets)
      out.push_back(TargetBall::make(TruncatedVector::real(t.lo, t.center), t.radius));
    return out;
  }

  void dispatch() {
    switch (cmd_) {
      case Command::DensityCheck: density_check(); break;
      case Command::SeriesCheck: series_check(); break;
      case Command::DeltaBuild: delta_build(); break;
      case Command::Sample: sample_cmd(); break;
      case Command::LowerDensity: lower_density(); break;
      case Command::Mixing: mixing(); break;
      case Command::BallBound: ball_bound(); break;
      case Command::FhcBuild: fhc_build(); break;
      case Command::PolyBasis: poly_basis(); break;
    }
  }

  void density_check() {
    const DeltaSequence& d = deltas();
    const DeltaSequence dn = d.bilateral() ? d.naturals() : d;
    AnnulusDensity rho;
    try {
      rho = build_annulus_density(dn, cfg_.space.field(), cfg_.run.horizon);
    } catch (const DivergenceRequired& e) {
      throw CertificateStop{"annulus-density", e.what()};
    }
    certify("annulus-density", "pass", std::to_string(rho.thresholds.size()) + " stored thresholds");
    CsvWriter csv(output("density.csv"), {"k", "t_lo", "t_hi", "source_n", "mass", "height", "probability"});
    const long K = static_cast<long>(rho.thresholds.size());
    for (long k = 0; k < K; ++k) {
      const double prob = std::ldexp(1.0, static_cast<int>(-k - 1));
      csv.row() << k << rho.threshold(k - 1) << rho.threshold(k) << rho.source_index[static_cast<std::size_t>(k)]
                << rho.mass(k) << rho.height(k) << prob;
    }
    // smallest terms first, starting with the annuli past the stored table, so the sum telescopes exactly
    double total = std::ldexp(1.0, static_cast<int>(-K));
    for (long k = K - 1; k >= 0; --k) total += std::ldexp(1.0, static_cast<int>(-k - 1));
    csv.row() << "total" << "" << "" << "" << "" << "" << total;

    const TailSumCertificate ts = tail_sum(rho, dn, std::min(cfg_.run.horizon, 1024L), cfg_.run.tol);
    CsvWriter sum(output("density_summary.csv"), {"quantity", "value"});
    sum.row() << "total_mass" << total;
    sum.row() << "tail_sum_partial" << ts.partial_sum;
    sum.row() << "tail_sum_bound" << ts.tail_bound;
    sum.row() << "tail_sum_below_tol" << ts.below_tol;
    certify("tail-sum", ts.verdict, ts.rule + (ts.witness.empty() ? "" : ": " + ts.witness));

    if (opt_.plot) {
      PlotSeries s{"height", {}, {}};
      for (long k = 0; k < std::min(K, 40L); ++k) {
        s.x.push_back(rho.threshold(k));
        s.y.push_back(std::log10(rho.height(k)));
      }
      write_svg_plot(output("density.svg"), "annulus density", "t", "log10 height", {s});
    }
  }

  void series_check() {
    CsvWriter csv(output("series.csv"),
                  {"kind", "component", "verdict", "rule", "partial_sum", "tail_bound", "rate", "tail_estimate"});
    for (const std::string& k : cfg_.run.series) {
      const SeriesKind kind = k == "plain" ? SeriesKind::Plain : SeriesKind::SqrtLog;
      const SeriesCertificate c = check_series_condition(cfg_.space, cfg_.weights, kind, cfg_.run.horizon, cfg_.run.tol);
      for (std::size_t i = 0; i < c.components.size(); ++i) {
        const TailClass& t = c.components[i].tail;
        csv.row() << k << c.components[i].label << to_string(t.verdict) << t.rule << t.partial_sum << t.tail_bound
                  << t.rate << (i < c.tail_estimates.size() ? c.tail_estimates[i] : 0.0);
      }
      certify("series-" + k, c.verdict, c.witness);
    }
    if (cfg_.space.is_holomorphic()) {
      const ChaosCertificate ch = chaoticity_criterion(cfg_.space, cfg_.weights, cfg_.run.horizon, cfg_.run.growth);
      CsvWriter chaos(output("chaos.csv"), {"n", "root"});
      for (std::size_t i = 0; i < ch.roots.size(); ++i) chaos.row() << static_cast<long>(i + 1) << ch.roots[i];
      certify("chaoticity", ch.verdict, ch.note);
      if (opt_.plot) {
        PlotSeries s{"|beta_n|^(1/n)", {}, {}};
        for (std::size_t i = 0; i < ch.roots.size(); ++i) {
          s.x.push_back(static_cast<double>(i + 1));
          s.y.push_back(ch.roots[i]);
        }
        write_svg_plot(output("chaos.svg"), "root test", "n", "root", {s});
      }
    }
  }

  void delta_build() {
    const auto fam = family();
    const long H = cfg_.run.horizon;
    const DeltaBuild plus = build_delta(cfg_.space, *fam, eps(), H, Side::Positive);
    CsvWriter blocks(output("delta_blocks.csv"), {"side", "k", "N_k", "tail_at_N_k", "bound"});
    const auto write_blocks = [&](const char* side, const StaircaseRecord& r) {
      for (long k = 0; k < r.blocks(); ++k) {
        const double kk = static_cast<double>(k + 1);
        blocks.row() << side << k + 1 << r.N[static_cast<std::size_t>(k)] << r.tail_at_N[static_cast<std::size_t>(k)]
                     << 1.0 / (kk * kk);
      }
    };
    write_blocks("plus", *plus.record);
    std::optional<DeltaBuild> minus;
    if (fam->bilateral_index()) {
      minus = build_delta(cfg_.space, *fam, eps(), H, Side::Negative);
      write_blocks("minus", *minus->record);
    }
    CsvWriter csv(output("delta.csv"), {"n", "eps", "delta", "block"});
    const auto e = eps();
    const long lo = minus ? -cfg_.run.N : 0;
    for (long n = lo; n <= cfg_.run.N; ++n) {
      const DeltaBuild& b = n < 0 ? *minus : plus;
      csv.row() << n << e(n) << b.delta(std::labs(n)) << b.record->block_of(std::labs(n));
    }
    certify("staircase", "pass", std::to_string(plus.record->blocks()) + " blocks");

    const PipelineReport rep = compose_pipeline(cfg_.space, *fam, e, H, cfg_.space.field());
    certify("pipeline", rep.ok ? "pass" : "fail", rep.ok ? rep.message : "stopped at " + rep.stage + ": " + rep.message);
  }

  void sample_cmd() {
    const auto fam = family();
    const DeltaSequence* d = cfg_.delta ? &deltas() : nullptr;
    const DistributionSpec& dist = law();
    const RandomVectorSample s = sample_vector(cfg_.space, fam, dist, cfg_.run.N, d, seed());
    CsvWriter csv(output("sample.csv"), {"n", "X_re", "X_im", "v_re", "v_im"});
    for (long n = s.stream_lo; n <= s.stream_hi; ++n) {
      const Scalar x = s.x(n), v = s.assembled.at(n);
      csv.row() << n << x.real() << x.imag() << v.real() << v.imag();
    }
    CsvWriter sum(output("sample_summary.csv"), {"quantity", "value"});
    sum.row() << "fnorm" << fnorm(cfg_.space, s.assembled);
    sum.row() << "window_lo" << s.lo;
    sum.row() << "window_hi" << s.hi;
    if (s.tail_certificate) {
      sum.row() << "tail_certificate" << *s.tail_certificate;
      certify("tail-majorant", std::isfinite(*s.tail_certificate) ? "pass" : "fail",
              "delta-majorant beyond the window");
    }
    if (d) {
      const TailSumCertificate ts = tail_sum(dist, *d, std::min(cfg_.run.horizon, 1024L), cfg_.run.tol);
      certify("tail-sum", ts.verdict, ts.rule + (ts.witness.empty() ? "" : ": " + ts.witness));
    }
  }

  void lower_density() {
    const auto fam = family();
    const std::vector<TargetBall> balls = targets();
    SweepConfig sc;
    sc.N = cfg_.run.N;
    sc.N_orbit = cfg_.run.N_orbit;
    sc.replicas = cfg_.run.replicas;
    sc.space_reps = cfg_.run.space_reps;
    sc.seed = seed();
    const std::vector<BallSweep> res = lower_density_sweep(cfg_.space, fam, law(), balls, sc, exec_);
    CsvWriter per(output("lower_density.csv"), {"ball", "replica", "liminf_proxy", "final_frequency"});
    CsvWriter sum(output("lower_density_summary.csv"),
                  {"ball", "mean_proxy", "min_proxy", "proxy_stderr", "p_hat", "p_stderr", "birkhoff_z", "consistent"});
    bool positive = true, consistent = true;
    for (std::size_t b = 0; b < res.size(); ++b) {
      const BallSweep& s = res[b];
      for (std::size_t r = 0; r < s.proxies.size(); ++r)
        per.row() << static_cast<long>(b) << static_cast<long>(r) << s.proxies[r] << s.final_freqs[r];
      sum.row() << static_cast<long>(b) << s.mean_proxy << s.min_proxy << s.proxy_stderr << s.p_hat << s.p_stderr
                << s.birkhoff_z << s.birkhoff_consistent;
      positive = positive && s.min_proxy > 0.0;
      consistent = consistent && s.birkhoff_consistent;
    }
    certify("positive-lower-density", positive ? "pass" : "fail", "min liminf proxy over replicas and balls");
    certify("birkhoff-consistency", consistent ? "pass" : "fail", "time average within 5 combined stderr of P(v in ball)");

    if (opt_.plot) {
      const RandomVectorSample s = sample_vector(cfg_.space, fam, law(), sc.N, nullptr, seed(), 0, sc.N_orbit);
      std::vector<PlotSeries> series;
      for (std::size_t b = 0; b < balls.size() && b < 6; ++b) {
        const FrequencyReport fr = visit_frequency(s, balls[b], sc.N_orbit, exec_);
        PlotSeries ps{"ball " + std::to_string(b), {}, {}};
        for (std::size_t n = 0; n < fr.running.size(); n += std::max<std::size_t>(1, fr.running.size() / 800)) {
          ps.x.push_back(static_cast<double>(n));
          ps.y.push_back(fr.running[n]);
        }
        series.push_back(std::move(ps));
      }
      write_svg_plot(output("running_frequency.svg"), "running visit frequency, replica 0", "n", "frequency", series);
    }
  }

  void mixing() {
    const auto fam = family();
    const std::vector<TargetBall> balls = targets();
    std::vector<long> grid = cfg_.run.mixing_grid;
    if (grid.empty()) throw ConfigError("run.mixing: the mixing command needs a grid");
    const TargetBall& A = balls[static_cast<std::size_t>(cfg_.run.mixing_A)];
    const TargetBall& B = balls[static_cast<std::size_t>(cfg_.run.mixing_B)];
    const MixingReport rep = mixing_correlation(cfg_.space, fam, law(), A, B, grid, cfg_.run.reps, cfg_.run.N, seed(), exec_);
    CsvWriter csv(output("mixing.csv"), {"n", "joint", "pA", "pB", "product", "difference", "stderr",
                                         "structurally_independent"});
    bool indep_ok = true;
    for (const MixingRow& r : rep.rows) {
      csv.row() << r.n << r.joint << r.pA << r.pB << r.product << r.difference << r.stderr_
                << r.structurally_independent;
      if (r.structurally_independent && std::fabs(r.difference) > 3.0 * r.stderr_) indep_ok = false;
    }
    certify("structural-independence", indep_ok ? "pass" : "fail", "|difference| <= 3 stderr for n > 2N");
    notes_.push_back(rep.note);
    if (opt_.plot) {
      PlotSeries s{"joint - product", {}, {}};
      for (const MixingRow& r : rep.rows) {
        s.x.push_back(static_cast<double>(r.n));
        s.y.push_back(r.difference);
      }
      write_svg_plot(output("mixing.svg"), "mixing difference", "n", "difference", {s});
    }
  }

  void ball_bound() {
    const auto fam = family();
    const std::vector<TargetBall> balls = targets();
    const DeltaSequence& d = deltas();
    const DistributionSpec& dist = law();
    CsvWriter csv(output("ball_bound.csv"),
                  {"ball", "N", "majorant_tail", "pB", "pB_stderr", "product_factor", "product_tolerance",
                   "lower_bound", "direct_p", "direct_stderr", "consistent"});
    bool all_ok = true;
    for (std::size_t b = 0; b < balls.size(); ++b) {
      const std::uint64_t s = derive_seed(seed(), 2 * b);
      const BallBound bb = ball_probability_lower_bound(cfg_.space, fam, dist, d, balls[b].center, balls[b].radius,
                                                        cfg_.run.N, cfg_.run.reps, s, exec_, cfg_.run.horizon);
      const BallEstimate direct = ball_probability_direct(cfg_.space, fam, dist, balls[b].center, balls[b].radius,
                                                          bb.N + 64, cfg_.run.reps, derive_seed(seed(), 2 * b + 1), exec_);
      const double se = std::hypot(direct.stderr_, bb.pB_stderr * bb.product_factor);
      const bool ok = direct.p >= bb.lower_bound - 3.0 * se;
      all_ok = all_ok && ok;
      csv.row() << static_cast<long>(b) << bb.N << bb.majorant_tail << bb.pB << bb.pB_stderr << bb.product_factor
                << bb.product_tolerance << bb.lower_bound << direct.p << direct.stderr_ << ok;
    }
    certify("ball-bound", all_ok ? "pass" : "fail", "direct estimate >= lower bound - 3 stderr");
  }

  void fhc_build() {
    const FhcConstruction c = FhcConstruction::assemble(cfg_.space, cfg_.weights, cfg_.run.K);
    CsvWriter blocks(output("fhc_blocks.csv"), {"k", "index", "a", "n", "s_sum", "t_sum", "forward_norm"});
    for (const FhcBlock& b : c.blocks())
      blocks.row() << b.k << b.index << b.a.a << b.n << b.a.s_sum << b.a.t_sum << b.s_norm;
    CsvWriter ledger(output("fhc_ledger.csv"), {"k", "l", "check", "lhs", "bound", "slack", "holds"});
    for (const LedgerRow& r : c.ledger())
      ledger.row() << r.k << r.l << r.check << r.lhs << r.bound << r.bound - r.lhs << r.holds;
    for (const std::string& s : c.skipped()) notes_.push_back("skipped " + s);
    const FhcChecks& ch = c.checks();
    certify("fhc-ledger", ch.ledger_holds ? "pass" : "fail", "every ledger inequality");
    certify("fhc-orbit-residual", "pass", "max relative residual " + format_number(ch.orbit_residual));
    certify("fhc-majorant-plus", ch.plus_verdict, "sum ||u_n|| = " + format_number(ch.majorant_plus));
  }

  void poly_basis() {
    if (cfg_.run.polynomial.empty()) throw ConfigError("run.polynomial: poly-basis needs coefficients");
    std::vector<Scalar> a(cfg_.run.polynomial.begin(), cfg_.run.polynomial.end());
    const PolynomialBasis basis = polynomial_basis(cfg_.weights, PolynomialSpec(std::move(a)), cfg_.run.N);
    CsvWriter csv(output("poly_basis.csv"), {"n", "j", "beta_re", "beta_im"});
    for (long n = 0; n < static_cast<long>(basis.columns.size()); ++n) {
      const TruncatedVector& col = basis.columns[static_cast<std::size_t>(n)];
      for (long j = col.lo(); j <= col.hi(); ++j) {
        const Scalar b = col.at(j);
        if (b != Scalar{0.0}) csv.row() << n << j << b.real() << b.imag();
      }
    }
    certify("poly-residual", "pass", "max residual " + format_number(basis.max_residual));
  }

  void write_manifest() {
    nlohmann::ordered_json m;
    m["command"] = to_string(cmd_);
    m["version"] = FHC_VERSION;
    m["seed"] = cfg_.run.seed;
    m["config_hash"] = config_hash(cfg_.source_text);
    m["space"] = cfg_.space.name();
    m["weights"] = cfg_.weights.name();
    m["exec"] = cfg_.run.exec;
    m["horizon"] = cfg_.run.horizon;
    m["exit_code"] = result_.exit_code;
    if (!result_.message.empty()) m["message"] = result_.message;
    m["certificates"] = nlohmann::ordered_json::array();
    for (const CertificateRecord& c : result_.certificates)
      m["certificates"].push_back({{"name", c.name}, {"verdict", c.verdict}, {"detail", c.detail}});
    m["outputs"] = nlohmann::ordered_json::array();
    for (const auto& p : result_.outputs) m["outputs"].push_back(p.filename().string());
    m["notes"] = notes_;
    const auto path = opt_.out_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << m.dump(2) << '\n';
    result_.outputs.push_back(path);
  }

  ExperimentConfig cfg_;
  Command cmd_;
  RunOptions opt_;
  kernels::Exec exec_;
  RunResult result_;
  std::vector<std::string> notes_;
  std::shared_ptr<const UFamily> family_;
  std::optional<DeltaSequence> deltas_;
  std::optional<DistributionSpec> law_;
};

}  // namespace

std::string to_string(Command c) {
  for (const NamedCommand& nc : kCommands)
    if (nc.command == c) return nc.name;
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const NamedCommand& nc : kCommands)
    if (name == nc.name) return nc.command;
  return std::nullopt;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const NamedCommand& nc : kCommands) v.emplace_back(nc.name);
    return v;
  }();
  return names;
}

RunResult run(const ExperimentConfig& config, Command command, const RunOptions& options) {
  return Session(config, command, options).execute();
}

}  // namespace fhc
