#include "spde/scheme.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace spde;

namespace {

ModelParams linear_model(const std::string &initial = "bump") {
  ModelParams m;
  m.drift = CubicCoefficients::zero();
  m.initial = initial_value_preset(initial, 32);
  return m;
}

DiscretizationParams disc(std::size_t M, std::size_t N) {
  DiscretizationParams d;
  d.steps = M;
  d.modes = N;
  return d;
}

} // namespace

TEST_CASE("parameter validation") {
  ModelParams m;
  CHECK_NOTHROW(m.validate());
  m.horizon = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  DiscretizationParams d;
  CHECK(d.chi == doctest::Approx(0.2 / 3.0 - 1.0 / 18.0));
  CHECK_NOTHROW(d.validate());
  d.gamma = 0.25;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.gamma = 0.2;
  d.chi = 0.02;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.chi = 0.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = DiscretizationParams{};
  d.modes = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS_AS(initial_value_preset("nope", 4), std::invalid_argument);
}

TEST_CASE("bump preset is the sine series of x(1-x)") {
  const SpectralVector xi = initial_value_preset("bump", 9);
  for (std::size_t k = 1; k <= 9; ++k) {
    double ref = 0.0;
    for (int i = 0; i < 32; ++i)
      ref += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double x) { return x * (1.0 - x) * std::sqrt(2.0) * std::sin(double(k) * kPi * x); }, i / 32.0,
          (i + 1) / 32.0);
    CHECK(std::abs(xi[k - 1] - ref) < 1e-14);
  }
  CHECK(initial_value_preset("first_mode", 3) == SpectralVector{1.0, 0.0, 0.0});
  CHECK(initial_value_preset("zero", 2) == SpectralVector(2));
}

TEST_CASE("truncation indicator") {
  const OperatorSpectrum spec(1.0);
  const DiscretizationParams d = disc(64, 4);
  CHECK(truncation_indicator(SpectralVector(4), SpectralVector(4), d, 1.0, spec));
  CHECK_FALSE(truncation_indicator(SpectralVector(4, 10.0), SpectralVector(4), d, 1.0, spec));
  // Boundary: ||Y|| + ||O|| equal to the threshold counts as active.
  const double threshold = std::pow(64.0, d.chi);
  const double unit_norm = hr_norm(SpectralVector::unit(4, 1), d.gamma, spec);
  const SpectralVector y = (threshold / unit_norm) * SpectralVector::unit(4, 1);
  CHECK(hr_norm(y, d.gamma, spec) <= threshold);
  CHECK(truncation_indicator(y, SpectralVector(4), d, 1.0, spec) ==
        (hr_norm(y, d.gamma, spec) <= threshold));
  CHECK_THROWS_AS(truncation_indicator(SpectralVector(3), SpectralVector(4), d, 1.0, spec), std::invalid_argument);
}

TEST_CASE("one step against the scalar closed form") {
  // F(v) = v, xi = 0.1 e_1, zero noise: Y_1 = 0.1 (e^{-mu h} + (1 - e^{-mu h}) / mu).
  ModelParams m;
  m.drift = CubicCoefficients(0.0, 1.0, 0.0, 0.0);
  m.initial = SpectralVector{0.1};
  const DiscretizationParams d = disc(4, 1);
  const ExponentialEuler scheme(m, d);
  SchemeState s = scheme.initial_state();
  CHECK(scheme.indicator(s.Y, s.O));
  const bool active = scheme.step(s, apply_semigroup(s.O, 0.25, OperatorSpectrum(1.0)));
  CHECK(active);
  const double mu = kPi * kPi, h = 0.25;
  CHECK(s.Y[0] == doctest::Approx(0.1 * (std::exp(-mu * h) + (1.0 - std::exp(-mu * h)) / mu)).epsilon(1e-14));
  CHECK(s.step == 1);

  const SchemeState t = euler_step(scheme.initial_state(), s.O, m, d);
  CHECK(t.Y == s.Y);

  // Outside the threshold the drift is dropped.
  SchemeState big{0, SpectralVector{100.0}, SpectralVector{100.0}};
  CHECK_FALSE(scheme.step(big, SpectralVector{0.0}));
  CHECK(std::abs(big.Y[0]) < 1e-12); // e^{-mu h} 100 + 0 - e^{-mu h} 100
}

TEST_CASE("linear case reproduces the discrete OU process") {
  const ModelParams m = linear_model();
  const DiscretizationParams d = disc(32, 16);
  const NoiseTape tape(3, 64, 32, 1.0);
  const Trajectory traj = simulate_trajectory(m, d, tape);
  REQUIRE(traj.states.size() == 33);
  REQUIRE(traj.indicators.size() == 32);

  const OperatorSpectrum spec(1.0);
  OUState ou{0.0, m.initial.truncated(16)};
  const auto dw = coarsen_increments(tape, 32, 16);
  for (std::size_t step = 0; step <= 32; ++step) {
    const SchemeState &s = traj.states[step];
    CHECK(s.step == step);
    for (std::size_t k = 0; k < 16; ++k) {
      CHECK(std::abs(s.Y[k] - s.O[k]) <= 1e-14);
      CHECK(std::abs(s.O[k] - ou.coeffs[k]) <= 1e-14);
    }
    if (step < 32)
      ou = ou_step(ou, dw[step], traj.step_size, spec);
  }
  CHECK(lyapunov_diagnostic(traj, spec) <= 1e-26);
}

TEST_CASE("trajectories are deterministic and the dump is consistent") {
  ModelParams m;
  m.initial = initial_value_preset("bump", 16);
  const DiscretizationParams d = disc(16, 8);
  const NoiseTape tape(77, 16, 8, 1.0);
  const Trajectory a = simulate_trajectory(m, d, tape);
  const Trajectory b = simulate_trajectory(m, d, tape);
  for (std::size_t i = 0; i < a.states.size(); ++i)
    CHECK(a.states[i].Y == b.states[i].Y);
  CHECK(a.truncation_fraction() >= 0.0);
  CHECK(a.truncation_fraction() <= 1.0);

  std::ostringstream csv;
  write_trajectory_csv(csv, a, d, 1.0, OperatorSpectrum(1.0));
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mode_index,Y_coeff,O_coeff,indicator");
  std::size_t rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == 17 * 8);

  // Indicator of the step that left state m equals the recomputed one.
  const ExponentialEuler scheme(m, d);
  for (std::size_t i = 0; i < a.indicators.size(); ++i)
    CHECK(a.indicators[i] == scheme.indicator(a.states[i].Y, a.states[i].O));

  ModelParams other = m;
  other.horizon = 2.0;
  CHECK_THROWS_AS(simulate_trajectory(other, d, tape), std::invalid_argument);
}

TEST_CASE("reference resolution ratios are enforced") {
  ModelParams m;
  m.initial = initial_value_preset("bump", 16);
  const NoiseTape tape(1, 128, 16, 1.0);
  CHECK_THROWS_AS(reference_solution(m, disc(16, 8), tape, 64, 16, 16, 8), std::invalid_argument);
  CHECK_THROWS_AS(reference_solution(m, disc(16, 8), tape, 128, 8, 16, 8), std::invalid_argument);
  const Trajectory ref = reference_solution(m, disc(16, 8), tape, 128, 16, 16, 8);
  CHECK(ref.states.size() == 129);
  CHECK(ref.states.back().Y.size() == 16);
}
