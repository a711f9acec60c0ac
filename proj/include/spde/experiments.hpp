#pragma once

// Monte Carlo strong-error studies of the truncated exponential Euler scheme.
//
// Every path draws one master increment table (M_ref steps, N_ref modes) and
// drives the reference resolution and all targets from it, so the errors are
// those of coupled approximations. Work is split across paths; each path owns
// its result slot and aggregation runs in path order, so output does not
// depend on the thread count.

#include "spde/linear_errors.hpp"
#include "spde/scheme.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spde {

struct StudyConfig {
  ModelParams model;
  std::vector<std::size_t> steps_grid{16, 32, 64, 128};
  std::vector<std::size_t> modes_grid{8, 16, 32, 64};
  std::size_t ref_steps = 2048; // M_ref, also the master tape length
  std::size_t ref_modes = 128;  // N_ref, also the master tape width
  std::size_t temporal_modes = 0; // N held fixed while M varies; 0 means N_ref
  std::size_t spatial_steps = 0;  // M held fixed while N varies; 0 means M_ref
  std::size_t paths = 200;
  std::uint64_t seed = 1;
  double gamma = 0.2;
  double chi = DiscretizationParams::max_chi(0.2);
  unsigned threads = 1;
  bool exact_linear = false; // fill tables from the closed-form linear errors
  double moment_order = 2.0;  // p of moment_audit
  double moment_norm = 0.2;   // r of the H_r norm in moment_audit

  std::size_t fixed_modes() const noexcept { return temporal_modes ? temporal_modes : ref_modes; }
  std::size_t fixed_steps() const noexcept { return spatial_steps ? spatial_steps : ref_steps; }
  DiscretizationParams discretization(std::size_t steps, std::size_t modes) const;

  /// Throws std::invalid_argument when a target does not divide M_ref, a mode
  /// count exceeds N_ref, paths is zero, or the model/discretization is invalid.
  void validate() const;
};

struct ErrorEstimate {
  double estimate = 0.0;
  double stderr_of_estimate = 0.0; // NaN with a single path
  double activation_fraction = 0.0; // share of steps whose drift was suppressed
};

/// sup over coarse grid times of (E ||Y_ref - Y^{M,N}||_H^2)^{1/2}; modes of the
/// reference beyond N stay in the difference. The standard error follows from
/// the delta method at the maximizing time.
std::vector<ErrorEstimate> strong_errors_mc(const StudyConfig &cfg,
                                            const std::vector<std::pair<std::size_t, std::size_t>> &targets);
ErrorEstimate strong_error_mc(const StudyConfig &cfg, std::size_t steps, std::size_t modes);

struct ErrorRow {
  ErrorKind kind = ErrorKind::temporal; // temporal: M varies; spatial: N varies
  std::size_t steps = 0;
  std::size_t modes = 0;
  ErrorEstimate value;
};

struct ConvergenceStudy {
  std::vector<ErrorRow> rows;
  RateFit temporal;
  RateFit spatial;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

/// Temporal sweep over steps_grid at fixed_modes() and spatial sweep over
/// modes_grid at fixed_steps(). With exact_linear the drift must vanish and
/// each row holds the closed-form error against the exact solution.
ConvergenceStudy run_convergence_study(const StudyConfig &cfg);

/// CSV: kind,M,N,estimate,stderr,activation_fraction,paths,seed ("NA" for
/// undefined values).
void write_error_table_csv(std::ostream &os, const ConvergenceStudy &study);

/// JSON array of {axis, slope, intercept, residual, points}.
std::string rate_fits_json(const ConvergenceStudy &study);

/// Errors monotone within noise: along each sweep, refining never raises the
/// estimate by more than `sigmas` combined standard errors.
bool monotone_within_noise(const ConvergenceStudy &study, double sigmas = 3.0);

struct MomentRow {
  std::size_t steps = 0;
  std::size_t modes = 0;
  double moment = 0.0; // E ||Y^{M,N}_T||^p_{H_r}
  double stderr_of_moment = 0.0;
  double activation_fraction = 0.0;
};

struct MomentAudit {
  std::vector<MomentRow> rows;
  double median = 0.0;
  bool flagged = false; // some moment > 3 median + 3 stderr
};

/// Moments over the product grid steps_grid x modes_grid. p must be 2, 4 or 8.
MomentAudit moment_audit(const StudyConfig &cfg);

void write_moment_audit_csv(std::ostream &os, const MomentAudit &audit);

} // namespace spde
