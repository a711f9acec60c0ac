#include "spde/experiments.hpp"

#include "spde/io.hpp"
#include "spde/parallel.hpp"
#include "spde/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace spde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_value(double x) { return std::isnan(x) ? std::string("NA") : format_double(x); }

} // namespace

DiscretizationParams StudyConfig::discretization(std::size_t steps, std::size_t modes) const {
  DiscretizationParams d;
  d.steps = steps;
  d.modes = modes;
  d.gamma = gamma;
  d.chi = chi;
  return d;
}

void StudyConfig::validate() const {
  model.validate();
  discretization(ref_steps, ref_modes).validate();
  if (paths < 1)
    throw std::invalid_argument("n_paths must be >= 1");
  if (steps_grid.empty() || modes_grid.empty())
    throw std::invalid_argument("M and N grids must be nonempty");
  auto check_steps = [&](std::size_t M) {
    if (M < 1 || ref_steps % M != 0)
      throw std::invalid_argument("M = " + std::to_string(M) + " does not divide M_ref = " +
                                  std::to_string(ref_steps));
  };
  auto check_modes = [&](std::size_t N) {
    if (N < 1 || N > ref_modes)
      throw std::invalid_argument("N = " + std::to_string(N) + " is outside 1..N_ref = " +
                                  std::to_string(ref_modes));
  };
  for (std::size_t M : steps_grid)
    check_steps(M);
  for (std::size_t N : modes_grid)
    check_modes(N);
  check_steps(fixed_steps());
  check_modes(fixed_modes());
  if (!(moment_order == 2.0 || moment_order == 4.0 || moment_order == 8.0))
    throw std::invalid_argument("moment order p must be 2, 4 or 8");
  if (!(moment_norm >= 0.0 && moment_norm < 0.25))
    throw std::invalid_argument("moment norm exponent must lie in [0, 1/4)");
}

std::vector<ErrorEstimate> strong_errors_mc(const StudyConfig &cfg,
                                            const std::vector<std::pair<std::size_t, std::size_t>> &targets) {
  cfg.validate();
  for (const auto &[M, N] : targets)
    if (M < 1 || cfg.ref_steps % M != 0 || N < 1 || N > cfg.ref_modes)
      throw std::invalid_argument("target (" + std::to_string(M) + ", " + std::to_string(N) +
                                  ") is not coarser than the reference");

  const ExponentialEuler reference(cfg.model, cfg.discretization(cfg.ref_steps, cfg.ref_modes));
  std::vector<ExponentialEuler> schemes;
  schemes.reserve(targets.size());
  for (const auto &[M, N] : targets)
    schemes.emplace_back(cfg.model, cfg.discretization(M, N));

  const NoiseTape base(cfg.seed, cfg.ref_steps, cfg.ref_modes, cfg.model.horizon);
  const std::size_t paths = cfg.paths;

  // sq[i][path * (M_i + 1) + m]: squared H-distance at coarse time m.
  std::vector<std::vector<double>> sq(targets.size());
  std::vector<std::vector<double>> suppressed(targets.size(), std::vector<double>(paths));
  for (std::size_t i = 0; i < targets.size(); ++i)
    sq[i].assign(paths * (targets[i].first + 1), 0.0);

  parallel_for(paths, cfg.threads, [&](std::size_t path) {
    const std::vector<SpectralVector> master =
        master_increments(base.for_path(std::uint32_t(path)), cfg.ref_modes);
    std::vector<SpectralVector> ref_y;
    ref_y.reserve(cfg.ref_steps + 1);
    simulate(reference, master, [&](const SchemeState &s, bool) { ref_y.push_back(s.Y); });

    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto [M, N] = targets[i];
      const std::size_t ratio = cfg.ref_steps / M;
      double *row = sq[i].data() + path * (M + 1);
      std::size_t off = 0;
      simulate(schemes[i], coarsen_increments(master, M, N), [&](const SchemeState &s, bool active) {
        const SpectralVector &r = ref_y[s.step * ratio];
        CompensatedSum d;
        for (std::size_t k = 0; k < r.size(); ++k) {
          const double diff = k < N ? r[k] - s.Y[k] : r[k];
          d += diff * diff;
        }
        row[s.step] = d.value();
        if (s.step < M && !active)
          ++off;
      });
      suppressed[i][path] = double(off) / double(M);
    }
  });

  std::vector<ErrorEstimate> out;
  out.reserve(targets.size());
  std::vector<double> column(paths);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t M = targets[i].first;
    ErrorEstimate e;
    double best_mean = -1.0, best_se = 0.0;
    for (std::size_t m = 0; m <= M; ++m) {
      for (std::size_t p = 0; p < paths; ++p)
        column[p] = sq[i][p * (M + 1) + m];
      const SampleSummary s = summarize(column);
      if (s.mean > best_mean) {
        best_mean = s.mean;
        best_se = s.stderr_of_mean;
      }
    }
    e.estimate = std::sqrt(best_mean);
    if (std::isnan(best_se))
      e.stderr_of_estimate = kNaN;
    else
      e.stderr_of_estimate = best_mean > 0.0 ? best_se / (2.0 * e.estimate) : 0.0;
    e.activation_fraction = summarize(suppressed[i]).mean;
    out.push_back(e);
  }
  return out;
}

ErrorEstimate strong_error_mc(const StudyConfig &cfg, std::size_t steps, std::size_t modes) {
  return strong_errors_mc(cfg, {{steps, modes}}).front();
}

namespace {

RateFit fit_positive(const std::vector<std::pair<double, double>> &points) {
  std::vector<std::pair<double, double>> usable;
  for (const auto &p : points)
    if (p.second > 0.0 && std::isfinite(p.second))
      usable.push_back(p);
  if (usable.size() < 3) {
    RateFit f;
    f.slope = f.intercept = f.residual = kNaN;
    f.points = usable.size();
    return f;
  }
  return fit_rate(usable);
}

} // namespace

ConvergenceStudy run_convergence_study(const StudyConfig &cfg) {
  cfg.validate();
  ConvergenceStudy study;
  study.paths = cfg.paths;
  study.seed = cfg.seed;

  std::vector<std::pair<std::size_t, std::size_t>> targets;
  for (std::size_t M : cfg.steps_grid)
    targets.emplace_back(M, cfg.fixed_modes());
  for (std::size_t N : cfg.modes_grid)
    targets.emplace_back(cfg.fixed_steps(), N);

  std::vector<ErrorEstimate> values;
  if (cfg.exact_linear) {
    if (!cfg.model.drift.vanishes())
      throw std::invalid_argument("exact linear mode requires a vanishing drift");
    for (double c : cfg.model.initial.data())
      if (c != 0.0)
        throw std::invalid_argument("exact linear mode requires a zero initial value");
    const double T = cfg.model.horizon, nu = cfg.model.nu;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto [M, N] = targets[i];
      ErrorEstimate e;
      e.estimate = i < cfg.steps_grid.size() ? temporal_error_exact(M, N, T, nu) : spatial_error_exact(N, T, nu);
      e.stderr_of_estimate = 0.0;
      e.activation_fraction = kNaN;
      values.push_back(e);
    }
  } else {
    values = strong_errors_mc(cfg, targets);
  }

  std::vector<std::pair<double, double>> tpts, spts;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const bool temporal = i < cfg.steps_grid.size();
    study.rows.push_back({temporal ? ErrorKind::temporal : ErrorKind::spatial, targets[i].first, targets[i].second,
                          values[i]});
    if (temporal)
      tpts.emplace_back(double(targets[i].first), values[i].estimate);
    else
      spts.emplace_back(double(targets[i].second), values[i].estimate);
  }
  study.temporal = fit_positive(tpts);
  study.spatial = fit_positive(spts);
  return study;
}

void write_error_table_csv(std::ostream &os, const ConvergenceStudy &study) {
  os << "kind,M,N,estimate,stderr,activation_fraction,paths,seed\n";
  for (const ErrorRow &r : study.rows)
    os << to_string(r.kind) << ',' << r.steps << ',' << r.modes << ',' << csv_value(r.value.estimate) << ','
       << csv_value(r.value.stderr_of_estimate) << ',' << csv_value(r.value.activation_fraction) << ','
       << study.paths << ',' << study.seed << '\n';
}

std::string rate_fits_json(const ConvergenceStudy &study) {
  auto number = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json out = nlohmann::json::array();
  for (const auto &[axis, fit] : {std::pair{"temporal", study.temporal}, std::pair{"spatial", study.spatial}})
    out.push_back({{"axis", axis},
                   {"slope", number(fit.slope)},
                   {"intercept", number(fit.intercept)},
                   {"residual", number(fit.residual)},
                   {"points", fit.points}});
  return out.dump(2) + "\n";
}

bool monotone_within_noise(const ConvergenceStudy &study, double sigmas) {
  auto se = [](const ErrorEstimate &e) { return std::isnan(e.stderr_of_estimate) ? 0.0 : e.stderr_of_estimate; };
  for (ErrorKind kind : {ErrorKind::temporal, ErrorKind::spatial}) {
    std::vector<ErrorRow> sweep;
    for (const ErrorRow &r : study.rows)
      if (r.kind == kind)
        sweep.push_back(r);
    std::sort(sweep.begin(), sweep.end(), [&](const ErrorRow &a, const ErrorRow &b) {
      return kind == ErrorKind::temporal ? a.steps < b.steps : a.modes < b.modes;
    });
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      const double slack = sigmas * std::hypot(se(sweep[i - 1].value), se(sweep[i].value));
      if (sweep[i].value.estimate > sweep[i - 1].value.estimate + slack)
        return false;
    }
  }
  return true;
}

MomentAudit moment_audit(const StudyConfig &cfg) {
  if (!(cfg.moment_order == 2.0 || cfg.moment_order == 4.0 || cfg.moment_order == 8.0))
    throw std::invalid_argument("moment order p must be 2, 4 or 8");
  if (!(cfg.moment_norm >= 0.0 && cfg.moment_norm < 0.25))
    throw std::invalid_argument("moment norm exponent must lie in [0, 1/4)");
  if (cfg.steps_grid.empty() || cfg.modes_grid.empty() || cfg.paths < 1)
    throw std::invalid_argument("moment audit needs nonempty grids and at least one path");
  cfg.model.validate();

  std::size_t master_steps = 1;
  for (std::size_t M : cfg.steps_grid)
    master_steps = std::lcm(master_steps, M);
  const std::size_t master_modes = *std::max_element(cfg.modes_grid.begin(), cfg.modes_grid.end());
  const OperatorSpectrum spec(cfg.model.nu);
  const NoiseTape base(cfg.seed, master_steps, master_modes, cfg.model.horizon);

  struct Cell {
    ExponentialEuler scheme;
    std::vector<double> weights;
  };
  std::vector<Cell> cells;
  for (std::size_t M : cfg.steps_grid)
    for (std::size_t N : cfg.modes_grid)
      cells.push_back({ExponentialEuler(cfg.model, cfg.discretization(M, N)), hr_weights(N, cfg.moment_norm, spec)});

  std::vector<std::vector<double>> moment(cells.size(), std::vector<double>(cfg.paths));
  std::vector<std::vector<double>> suppressed(cells.size(), std::vector<double>(cfg.paths));
  parallel_for(cfg.paths, cfg.threads, [&](std::size_t path) {
    const std::vector<SpectralVector> master = master_increments(base.for_path(std::uint32_t(path)), master_modes);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const DiscretizationParams &d = cells[c].scheme.discretization();
      std::size_t off = 0;
      simulate(cells[c].scheme, coarsen_increments(master, d.steps, d.modes), [&](const SchemeState &s, bool active) {
        if (s.step < d.steps) {
          off += active ? 0 : 1;
          return;
        }
        moment[c][path] = std::pow(hr_norm(s.Y, cells[c].weights), cfg.moment_order);
      });
      suppressed[c][path] = double(off) / double(d.steps);
    }
  });

  MomentAudit audit;
  std::vector<double> means;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const DiscretizationParams &d = cells[c].scheme.discretization();
    const SampleSummary s = summarize(moment[c]);
    audit.rows.push_back({d.steps, d.modes, s.mean, s.stderr_of_mean, summarize(suppressed[c]).mean});
    means.push_back(s.mean);
  }
  std::sort(means.begin(), means.end());
  const std::size_t n = means.size();
  audit.median = n % 2 ? means[n / 2] : 0.5 * (means[n / 2 - 1] + means[n / 2]);
  for (const MomentRow &r : audit.rows) {
    const double se = std::isnan(r.stderr_of_moment) ? 0.0 : r.stderr_of_moment;
    if (r.moment > 3.0 * audit.median + 3.0 * se)
      audit.flagged = true;
  }
  return audit;
}

void write_moment_audit_csv(std::ostream &os, const MomentAudit &audit) {
  os << "M,N,moment,stderr,activation_fraction,flagged\n";
  for (const MomentRow &r : audit.rows)
    os << r.steps << ',' << r.modes << ',' << csv_value(r.moment) << ',' << csv_value(r.stderr_of_moment) << ','
       << csv_value(r.activation_fraction) << ',' << (audit.flagged ? 1 : 0) << '\n';
}

} // namespace spde
