#pragma once

// Full-discrete nonlinearity-truncated exponential Euler scheme for
//   dX = [A X + F(X)] dt + dW,  X_0 = xi,
// on (0,1) with Dirichlet boundary conditions. With h = T/M and m = 0..M-1:
//   O_{m+1} = e^{hA} (O_m + P_N dW_m)
//   Y_{m+1} = e^{hA} Y_m + O_{m+1} - e^{hA} O_m
//             + A^{-1}(e^{hA} - Id) 1{||Y_m||_{H_gamma} + ||O_m||_{H_gamma} <= (M/T)^chi} P_N F(Y_m)
// starting from Y_0 = O_0 = P_N xi.

#include "spde/noise.hpp"
#include "spde/nonlinearity.hpp"
#include "spde/spectral.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spde {

struct ModelParams {
  double horizon = 1.0; // T
  double nu = 1.0;
  CubicCoefficients drift = CubicCoefficients::allen_cahn();
  SpectralVector initial; // xi, any length; projected onto N modes on use

  /// Throws std::invalid_argument on T <= 0, nu <= 0 or non-finite xi.
  void validate() const;
};

/// Initial-value presets: "zero", "first_mode" (e_1) and "bump" (x(1-x),
/// coefficients sqrt(2) 2 (1 - (-1)^k) / (k pi)^3). Throws on unknown names.
SpectralVector initial_value_preset(const std::string &name, std::size_t n_modes);

struct DiscretizationParams {
  std::size_t steps = 64; // M
  std::size_t modes = 64; // N
  double gamma = 0.2;
  double chi = max_chi(0.2);

  /// Largest admissible threshold exponent gamma/3 - 1/18.
  static constexpr double max_chi(double gamma) { return gamma / 3.0 - 1.0 / 18.0; }

  /// Throws std::invalid_argument unless M, N >= 1, gamma in (1/6, 1/4) and
  /// chi in (0, gamma/3 - 1/18].
  void validate() const;
};

struct SchemeState {
  std::size_t step = 0; // m
  SpectralVector Y;
  SpectralVector O;
};

/// ||Y||_{H_gamma} + ||O||_{H_gamma} <= (M/T)^chi. The boundary case is included.
bool truncation_indicator(const SpectralVector &Y, const SpectralVector &O, const DiscretizationParams &disc,
                          double horizon, const OperatorSpectrum &spec);

/// Precomputed per-resolution factors; step() is the hot loop of every study.
class ExponentialEuler {
public:
  ExponentialEuler(const ModelParams &model, const DiscretizationParams &disc);

  const ModelParams &model() const noexcept { return model_; }
  const DiscretizationParams &discretization() const noexcept { return disc_; }
  double step_size() const noexcept { return h_; }
  double threshold() const noexcept { return threshold_; }

  SchemeState initial_state() const;

  bool indicator(const SpectralVector &Y, const SpectralVector &O) const;

  /// Advances s given the OU value at the next grid time; returns the
  /// indicator that gated the drift.
  bool step(SchemeState &s, const SpectralVector &O_next) const;

private:
  ModelParams model_;
  DiscretizationParams disc_;
  OperatorSpectrum spec_;
  double h_;
  double threshold_;
  std::size_t grid_size_;
  std::vector<double> decay_, phi1_, hgamma_weights_;
};

/// One scheme step (convenience wrapper around ExponentialEuler).
SchemeState euler_step(const SchemeState &s, const SpectralVector &O_next, const ModelParams &model,
                       const DiscretizationParams &disc);

struct Trajectory {
  double step_size = 0.0;
  std::vector<SchemeState> states; // grid times 0, h, ..., T
  std::vector<bool> indicators;    // indicators[m] gated the step m -> m+1

  double time(std::size_t m) const noexcept { return double(m) * step_size; }
  /// Fraction of steps whose drift was suppressed.
  double truncation_fraction() const;
};

/// Called with each state at grid times 0..M (and the indicator of the step
/// that follows it; false at m = M).
using StateObserver = std::function<void(const SchemeState &, bool)>;

/// Runs the scheme on precomputed per-step increments (size M, each >= N modes).
void simulate(const ExponentialEuler &scheme, const std::vector<SpectralVector> &increments,
              const StateObserver &observe);

/// Deterministic function of (model, disc, tape): coarsens the tape and runs the scheme.
Trajectory simulate_trajectory(const ModelParams &model, const DiscretizationParams &disc, const NoiseTape &tape);

/// Scheme at (M_ref, N_ref) as a proxy for the exact solution. Requires
/// M_ref >= 8 max_target_steps and N_ref >= 2 max_target_modes.
Trajectory reference_solution(const ModelParams &model, const DiscretizationParams &disc, const NoiseTape &tape,
                              std::size_t ref_steps, std::size_t ref_modes, std::size_t max_target_steps,
                              std::size_t max_target_modes);

/// sup over grid times of ||Y - O||^2_{H_1/2}: the pathwise a priori quantity.
double lyapunov_diagnostic(const Trajectory &traj, const OperatorSpectrum &spec);

/// CSV with header t,mode_index,Y_coeff,O_coeff,indicator; one row per (grid
/// time, mode). indicator is truncation_indicator(Y_t, O_t) as 0/1.
void write_trajectory_csv(std::ostream &os, const Trajectory &traj, const DiscretizationParams &disc,
                          double horizon, const OperatorSpectrum &spec);

} // namespace spde
