#include "spde/scheme.hpp"

#include "spde/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spde {

void ModelParams::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon T must be positive");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("diffusion nu must be positive");
  if (!initial.all_finite())
    throw std::invalid_argument("initial value has non-finite coefficients");
}

SpectralVector initial_value_preset(const std::string &name, std::size_t n_modes) {
  SpectralVector xi(n_modes);
  if (name == "zero")
    return xi;
  if (name == "first_mode") {
    if (n_modes >= 1)
      xi[0] = 1.0;
    return xi;
  }
  if (name == "bump") {
    for (std::size_t k = 1; k <= n_modes; k += 2) {
      const double kp = double(k) * kPi;
      xi[k - 1] = std::sqrt(2.0) * 4.0 / (kp * kp * kp);
    }
    return xi;
  }
  throw std::invalid_argument("unknown initial value preset '" + name + "'");
}

void DiscretizationParams::validate() const {
  if (steps < 1 || modes < 1)
    throw std::invalid_argument("M and N must be >= 1");
  if (!(gamma > 1.0 / 6.0 && gamma < 0.25))
    throw std::invalid_argument("gamma must lie in (1/6, 1/4)");
  // chi = max_chi(gamma) must be admissible even after rounding of gamma/3 - 1/18.
  if (!(chi > 0.0 && chi <= max_chi(gamma) * (1.0 + 1e-12)))
    throw std::invalid_argument("chi must lie in (0, gamma/3 - 1/18]");
}

bool truncation_indicator(const SpectralVector &Y, const SpectralVector &O, const DiscretizationParams &disc,
                          double horizon, const OperatorSpectrum &spec) {
  if (Y.size() != O.size())
    throw std::invalid_argument("Y and O dimensions differ");
  const double lhs = hr_norm(Y, disc.gamma, spec) + hr_norm(O, disc.gamma, spec);
  return lhs <= std::pow(double(disc.steps) / horizon, disc.chi);
}

ExponentialEuler::ExponentialEuler(const ModelParams &model, const DiscretizationParams &disc)
    : model_(model), disc_(disc), spec_(model.nu), h_(model.horizon / double(disc.steps)),
      threshold_(std::pow(double(disc.steps) / model.horizon, disc.chi)),
      grid_size_(alias_free_grid_size(disc.modes)), decay_(disc.modes), phi1_(disc.modes),
      hgamma_weights_(hr_weights(disc.modes, disc.gamma, spec_)) {
  model.validate();
  disc.validate();
  for (std::size_t k = 1; k <= disc.modes; ++k) {
    const double mu = spec_.eigenvalue(k);
    decay_[k - 1] = std::exp(-mu * h_);
    phi1_[k - 1] = phi1_multiplier(mu, h_);
  }
}

SchemeState ExponentialEuler::initial_state() const {
  const SpectralVector xi = model_.initial.truncated(disc_.modes);
  return {0, xi, xi};
}

bool ExponentialEuler::indicator(const SpectralVector &Y, const SpectralVector &O) const {
  return hr_norm(Y, hgamma_weights_) + hr_norm(O, hgamma_weights_) <= threshold_;
}

bool ExponentialEuler::step(SchemeState &s, const SpectralVector &O_next) const {
  const std::size_t n = disc_.modes;
  if (s.Y.size() != n || s.O.size() != n || O_next.size() != n)
    throw std::invalid_argument("scheme state dimension mismatch");
  const bool active = indicator(s.Y, s.O);
  SpectralVector drift;
  if (active && !model_.drift.vanishes())
    drift = project_F(s.Y, model_.drift, grid_size_);
  for (std::size_t i = 0; i < n; ++i) {
    double y = decay_[i] * s.Y[i] + O_next[i] - decay_[i] * s.O[i];
    if (!drift.empty())
      y += phi1_[i] * drift[i];
    s.Y[i] = y;
  }
  s.O = O_next;
  ++s.step;
  return active;
}

SchemeState euler_step(const SchemeState &s, const SpectralVector &O_next, const ModelParams &model,
                       const DiscretizationParams &disc) {
  SchemeState next = s;
  ExponentialEuler(model, disc).step(next, O_next);
  return next;
}

double Trajectory::truncation_fraction() const {
  if (indicators.empty())
    return 0.0;
  const auto off = std::count(indicators.begin(), indicators.end(), false);
  return double(off) / double(indicators.size());
}

void simulate(const ExponentialEuler &scheme, const std::vector<SpectralVector> &increments,
              const StateObserver &observe) {
  const DiscretizationParams &disc = scheme.discretization();
  if (increments.size() != disc.steps)
    throw std::invalid_argument("increment table does not match the step count");
  const OUPropagator ou(disc.modes, scheme.step_size(), OperatorSpectrum(scheme.model().nu));
  SchemeState s = scheme.initial_state();
  SpectralVector o_next(disc.modes);
  for (std::size_t m = 0; m < disc.steps; ++m) {
    if (increments[m].size() < disc.modes)
      throw std::invalid_argument("increment has fewer modes than the scheme");
    o_next = s.O;
    ou.step(o_next, increments[m].size() == disc.modes ? increments[m] : increments[m].truncated(disc.modes));
    const SchemeState before = s;
    const bool active = scheme.step(s, o_next);
    observe(before, active);
  }
  observe(s, false);
}

Trajectory simulate_trajectory(const ModelParams &model, const DiscretizationParams &disc, const NoiseTape &tape) {
  if (std::abs(tape.horizon() - model.horizon) > 1e-14 * model.horizon)
    throw std::invalid_argument("tape horizon differs from model horizon");
  const ExponentialEuler scheme(model, disc);
  const std::vector<SpectralVector> dw = coarsen_increments(tape, disc.steps, disc.modes);
  Trajectory traj;
  traj.step_size = scheme.step_size();
  traj.states.reserve(disc.steps + 1);
  traj.indicators.reserve(disc.steps);
  simulate(scheme, dw, [&](const SchemeState &s, bool active) {
    traj.states.push_back(s);
    if (s.step < disc.steps)
      traj.indicators.push_back(active);
  });
  return traj;
}

Trajectory reference_solution(const ModelParams &model, const DiscretizationParams &disc, const NoiseTape &tape,
                              std::size_t ref_steps, std::size_t ref_modes, std::size_t max_target_steps,
                              std::size_t max_target_modes) {
  if (ref_steps < 8 * max_target_steps)
    throw std::invalid_argument("reference needs at least 8x the largest target step count");
  if (ref_modes < 2 * max_target_modes)
    throw std::invalid_argument("reference needs at least 2x the largest target mode count");
  DiscretizationParams ref = disc;
  ref.steps = ref_steps;
  ref.modes = ref_modes;
  return simulate_trajectory(model, ref, tape);
}

double lyapunov_diagnostic(const Trajectory &traj, const OperatorSpectrum &spec) {
  double sup = 0.0;
  for (const SchemeState &s : traj.states) {
    const double n = hr_norm(s.Y - s.O, 0.5, spec);
    sup = std::max(sup, n * n);
  }
  return sup;
}

void write_trajectory_csv(std::ostream &os, const Trajectory &traj, const DiscretizationParams &disc,
                          double horizon, const OperatorSpectrum &spec) {
  os << "t,mode_index,Y_coeff,O_coeff,indicator\n";
  for (std::size_t m = 0; m < traj.states.size(); ++m) {
    const SchemeState &s = traj.states[m];
    const int ind = truncation_indicator(s.Y, s.O, disc, horizon, spec) ? 1 : 0;
    const std::string t = format_double(traj.time(m));
    for (std::size_t k = 1; k <= s.Y.size(); ++k)
      os << t << ',' << k << ',' << format_double(s.Y[k - 1]) << ',' << format_double(s.O[k - 1]) << ',' << ind
         << '\n';
  }
}

} // namespace spde
