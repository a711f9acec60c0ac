#include "spde/cli.hpp"

#include "spde/config.hpp"
#include "spde/experiments.hpp"
#include "spde/io.hpp"
#include "spde/linear_errors.hpp"
#include "spde/nonlinearity.hpp"
#include "spde/scheme.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace spde {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> paths;
  std::optional<std::uint32_t> threads;
};

RunConfig resolve(const Overrides &o) {
  RunConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
  apply_environment(cfg);
  if (o.out)
    cfg.out_dir = *o.out;
  if (o.seed)
    cfg.study.seed = *o.seed;
  if (o.paths)
    cfg.study.paths = *o.paths;
  if (o.threads)
    cfg.study.threads = *o.threads;
  return cfg;
}

// Validation failures before any computation are configuration errors.
template <class Fn> void validated(Fn &&fn) {
  try {
    fn();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

int heat_errors(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const double T = cfg.study.model.horizon, nu = cfg.study.model.nu;
  validated([&] {
    if (!(T > 0.0) || !(nu > 0.0))
      throw std::invalid_argument("horizon and nu must be positive");
  });
  const auto rows = heat_error_reports(cfg.steps_grid, cfg.modes_grid, T, nu);
  std::ostringstream csv;
  write_error_reports_csv(csv, rows);
  const auto path = cfg.out_dir / "heat_errors.csv";
  write_file_atomic(path, csv.str());

  std::size_t violations = 0;
  for (const auto &r : rows)
    if (!r.sandwiched(1e-12)) {
      ++violations;
      err << "sandwich violated: kind=" << to_string(r.kind) << " M=" << r.steps << " N=" << r.modes.to_string()
          << " lower=" << format_double(r.lower) << " exact=" << format_double(r.exact)
          << " upper=" << format_double(r.upper) << '\n';
    }
  out << "wrote " << rows.size() << " rows to " << path.string() << '\n';
  return violations ? kExitSandwich : kExitOk;
}

int simulate_cmd(const RunConfig &cfg, std::ostream &out) {
  const StudyConfig &s = cfg.study;
  const DiscretizationParams disc = s.discretization(cfg.simulate_steps, cfg.simulate_modes);
  validated([&] {
    s.model.validate();
    disc.validate();
  });
  const NoiseTape tape(s.seed, disc.steps, disc.modes, s.model.horizon, cfg.simulate_path);
  const Trajectory traj = simulate_trajectory(s.model, disc, tape);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, disc, s.model.horizon, OperatorSpectrum(s.model.nu));
  const auto path = cfg.out_dir / "trajectory.csv";
  write_file_atomic(path, csv.str());
  out << "wrote " << traj.states.size() << " states to " << path.string() << " (suppressed drift on "
      << format_double(traj.truncation_fraction()) << " of steps)\n";
  return kExitOk;
}

int converge(RunConfig cfg, std::ostream &out, std::ostream &err) {
  cfg.require_finite_modes();
  validated([&] { cfg.study.validate(); });

  const ConvergenceStudy study = run_convergence_study(cfg.study);
  std::ostringstream csv;
  write_error_table_csv(csv, study);
  write_file_atomic(cfg.out_dir / "convergence.csv", csv.str());
  write_file_atomic(cfg.out_dir / "rates.json", rate_fits_json(study));
  out << "temporal slope " << format_double(study.temporal.slope) << ", spatial slope "
      << format_double(study.spatial.slope) << '\n';

  if (!cfg.moments)
    return kExitOk;
  const MomentAudit audit = moment_audit(cfg.study);
  std::ostringstream mcsv;
  write_moment_audit_csv(mcsv, audit);
  write_file_atomic(cfg.out_dir / "moments.csv", mcsv.str());
  if (audit.flagged) {
    err << "moment audit flagged: some estimate exceeds 3x the grid median by more than 3 stderr\n";
    return kExitAudit;
  }
  return kExitOk;
}

struct AuditLine {
  std::string name;
  std::string detail;
  std::size_t trials = 0;
  double max_residual = std::nan("");
  double mean_residual = std::nan("");
  std::size_t violations = 0;
};

std::string coefficient_label(const CubicCoefficients &a) {
  std::ostringstream s;
  s << '(' << a[0] << ' ' << a[1] << ' ' << a[2] << ' ' << a[3] << ')';
  return s.str();
}

int check(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const double T = cfg.study.model.horizon, nu = cfg.study.model.nu;
  validated([&] {
    cfg.study.model.validate();
    if (cfg.audit_trials < 1 || cfg.audit_modes < 1)
      throw std::invalid_argument("audit_trials and audit_modes must be >= 1");
  });
  const OperatorSpectrum spec(nu);
  const std::uint64_t seed = cfg.study.seed;
  std::vector<AuditLine> lines;

  std::vector<CubicCoefficients> sets = {CubicCoefficients::allen_cahn(), CubicCoefficients(0.5, -2.0, 1.0, -1.0),
                                         CubicCoefficients(-1.0, 3.0, -2.0, -0.5),
                                         CubicCoefficients(0.0, 0.0, 0.0, -2.0)};
  if (std::find(sets.begin(), sets.end(), cfg.study.model.drift) == sets.end())
    sets.insert(sets.begin(), cfg.study.model.drift);
  for (InequalityKind kind :
       {InequalityKind::monotonicity, InequalityKind::lipschitz, InequalityKind::coercivity_gradient})
    for (const CubicCoefficients &a : sets) {
      const InequalityAudit r = audit_inequality(kind, a, spec, cfg.audit_trials, cfg.audit_modes, seed);
      lines.push_back({to_string(kind), coefficient_label(a), r.trials, r.max_residual, r.mean_residual,
                       r.violations});
    }

  // Monotonicity of the squared HS norms on random times.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AuditLine semigroup{"hs_monotone_semigroup_time", "s1<=s2", cfg.audit_trials};
  AuditLine increment{"hs_monotone_increment_time", "s1<=s2", cfg.audit_trials};
  for (std::size_t i = 0; i < cfg.audit_trials; ++i) {
    const std::size_t n = 1 + std::size_t(unit(rng) * double(cfg.audit_modes));
    double s1 = T * unit(rng), s2 = T * unit(rng);
    if (s1 > s2)
      std::swap(s1, s2);
    const double t = T * unit(rng);
    semigroup.violations += hs_monotone_in_semigroup_time(n, s1, s2, t, nu) ? 0 : 1;
    increment.violations += hs_monotone_in_increment_time(n, t, s1, s2, nu) ? 0 : 1;
  }
  lines.push_back(semigroup);
  lines.push_back(increment);

  AuditLine bracket{"hs_norm_bracket", "N in 1..64, t in (0,T]", 0};
  for (std::size_t n = 1; n <= 64; ++n)
    for (int j = 1; j <= 16; ++j) {
      const double t = T * double(j) / 16.0;
      const HsNormBracket b = hs_norm_bracket(n, t, T, nu);
      ++bracket.trials;
      bracket.violations += (b.lower <= b.value + 1e-12 && b.value <= b.upper + 1e-12) ? 0 : 1;
    }
  lines.push_back(bracket);

  AuditLine sandwich{"heat_error_sandwich", "configured grid", 0};
  for (const auto &r : heat_error_reports(cfg.steps_grid, cfg.modes_grid, T, nu)) {
    ++sandwich.trials;
    sandwich.violations += r.sandwiched(1e-12) ? 0 : 1;
  }
  lines.push_back(sandwich);

  std::ostringstream csv;
  csv << "audit,detail,trials,max_residual,mean_residual,violations,status\n";
  std::size_t failed = 0;
  for (const AuditLine &l : lines) {
    const bool ok = l.violations == 0;
    failed += ok ? 0 : 1;
    auto num = [](double x) { return std::isnan(x) ? std::string("NA") : format_double(x); };
    csv << l.name << ',' << l.detail << ',' << l.trials << ',' << num(l.max_residual) << ','
        << num(l.mean_residual) << ',' << l.violations << ',' << (ok ? "pass" : "fail") << '\n';
    out << (ok ? "pass " : "FAIL ") << l.name << ' ' << l.detail << " trials=" << l.trials
        << " max_residual=" << num(l.max_residual) << " violations=" << l.violations << '\n';
  }
  write_file_atomic(cfg.out_dir / "check.csv", csv.str());
  if (failed) {
    err << failed << " audit(s) failed\n";
    return kExitAudit;
  }
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spectral Galerkin exponential Euler experiments for stochastic Allen-Cahn type equations"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  Overrides o;
  app.add_option("--config", o.config, "JSON configuration file");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  auto *heat = app.add_subcommand("heat-errors", "exact linear errors with lower/upper bounds");
  auto *sim = app.add_subcommand("simulate", "dump one trajectory");
  auto *conv = app.add_subcommand("converge", "strong-error convergence study");
  auto *chk = app.add_subcommand("check", "inequality and property audits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(o);
    if (heat->parsed())
      return heat_errors(cfg, out, err);
    if (sim->parsed())
      return simulate_cmd(cfg, out);
    if (conv->parsed())
      return converge(cfg, out, err);
    if (chk->parsed())
      return check(cfg, out, err);
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace spde
