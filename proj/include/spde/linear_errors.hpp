#pragma once

// Exact strong errors of spectral Galerkin / exponential Euler approximations
// of the linear stochastic heat equation dO = A O dt + dW, O_0 = 0, together
// with closed-form lower and upper bounds of order M^{-1/4} and N^{-1/2}.
//
// All quantities are L^2(P; H) norms at the final time T and follow from the
// Ito isometry as series over sine modes; nothing here is random.

#include "spde/spectral.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spde {

/// Number of Galerkin modes, or "all modes" (no spatial discretization).
class ModeCount {
public:
  constexpr ModeCount(std::size_t n) : n_(n) {} // NOLINT: implicit by design of call sites
  static constexpr ModeCount all() { return ModeCount(); }

  constexpr bool is_all() const noexcept { return !n_.has_value(); }
  constexpr std::size_t value() const { return n_.value(); }
  std::string to_string() const { return is_all() ? "all" : std::to_string(*n_); }

  friend constexpr bool operator==(const ModeCount &, const ModeCount &) = default;

private:
  constexpr ModeCount() = default;
  std::optional<std::size_t> n_;
};

/// ||O_T - P_N O_T||: sqrt(sum_{k>N} (1 - e^{-2 mu_k T}) / (2 mu_k)). N = 0 is
/// the full norm of O_T. Modes are summed explicitly while e^{-2 mu_k T} exceeds
/// tail_rel_tol; the remaining tail sum_{k>K} 1/(2 mu_k) is added in closed form.
double spatial_error_exact(std::size_t modes, double horizon, double nu, double tail_rel_tol = 1e-15);

/// Per-mode contribution E|<e_k, P_N O_T - O^{M,N}_T>|^2:
///   [sum_{j<M} e^{-2 mu jh}] [(1-e^{-2 mu h})/(2mu) - 2 e^{-mu h}(1-e^{-mu h})/mu + h e^{-2 mu h}].
double temporal_mode_integral(std::size_t k, std::size_t steps, double horizon, double nu);

/// ||P_N O_T - O^{M,N}_T|| (equal to the sup over t in [0,T]).
double temporal_error_exact(std::size_t steps, ModeCount modes, double horizon, double nu,
                            double tail_rel_tol = 1e-15);

/// ||O_T - O^{M,N}_T|| = sqrt(spatial^2 + temporal^2) by orthogonality of P_N.
double full_error_exact(std::size_t steps, ModeCount modes, double horizon, double nu);

double bound_lower_temporal(std::size_t steps, ModeCount modes, double horizon, double nu);
double bound_upper_temporal(std::size_t steps, double horizon, double nu);
double bound_lower_spatial(std::size_t modes, double horizon, double nu);
double bound_upper_spatial(std::size_t modes, double horizon, double nu);

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};
Bounds bounds_full(std::size_t steps, ModeCount modes, double horizon, double nu);

/// ||P_N (-sqrt(t) A)^{-1/2} (Id - e^{tA})||_{HS} and its bracket
/// [lower, upper]; the lower bound uses the horizon T through (1 + sqrt(T))^2.
struct HsNormBracket {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
HsNormBracket hs_norm_bracket(ModeCount modes, double t, double horizon, double nu);

/// Monotonicity of squared HS norms of P_N e^{sA}(Id - e^{tA}):
/// (i)  nonincreasing in the semigroup time s (fixed increment t);
/// (ii) nondecreasing in the increment time (fixed semigroup time).
bool hs_monotone_in_semigroup_time(std::size_t modes, double s1, double s2, double t, double nu);
bool hs_monotone_in_increment_time(std::size_t modes, double t, double s1, double s2, double nu);

/// L^2(P; H) distance between two coupled discrete OU constructions
/// O^{M,N} and O^{M_ref,N_ref} (both from P xi) at each coarse grid time
/// mT/M, m = 0..M. M must divide M_ref and N <= N_ref.
std::vector<double> coupled_ou_distance(std::size_t steps, std::size_t modes, std::size_t ref_steps,
                                        std::size_t ref_modes, double horizon, double nu,
                                        const SpectralVector &initial = {});

enum class ErrorKind { temporal, spatial, full };
std::string to_string(ErrorKind kind);

struct ErrorBoundsReport {
  std::size_t steps = 0;
  ModeCount modes = 1;
  ErrorKind kind = ErrorKind::full;
  double exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool sandwiched(double tol = 0.0) const noexcept { return lower <= exact + tol && exact <= upper + tol; }
};

/// One row per (M, N) per kind. Spatial and full rows are omitted for N = all.
std::vector<ErrorBoundsReport> heat_error_reports(const std::vector<std::size_t> &steps_grid,
                                                  const std::vector<ModeCount> &modes_grid, double horizon,
                                                  double nu);

/// CSV: M,N,exact,lower,upper,kind
void write_error_reports_csv(std::ostream &os, const std::vector<ErrorBoundsReport> &rows);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // root-mean-square residual in log space
  std::size_t points = 0;
};

/// Least squares of log(error) on log(resolution). Throws
/// std::invalid_argument for fewer than 3 points or nonpositive values.
RateFit fit_rate(const std::vector<std::pair<double, double>> &resolution_error);

} // namespace spde
