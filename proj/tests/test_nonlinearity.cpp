#include "spde/nonlinearity.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace spde;

namespace {

double eval_series(const SpectralVector &v, double x) {
  double s = 0.0;
  for (std::size_t k = 1; k <= v.size(); ++k)
    s += v[k - 1] * std::sqrt(2.0) * std::sin(double(k) * kPi * x);
  return s;
}

double eval_derivative(const SpectralVector &v, double x) {
  double s = 0.0;
  for (std::size_t k = 1; k <= v.size(); ++k)
    s += v[k - 1] * std::sqrt(2.0) * double(k) * kPi * std::cos(double(k) * kPi * x);
  return s;
}

// Composite 20-point Gauss-Legendre on `pieces` equal subintervals of [0,1].
template <class F> double integrate01(F f, int pieces = 64) {
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = double(i) / pieces, b = double(i + 1) / pieces;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
  }
  return total;
}

SpectralVector random_vector(std::size_t n, double amp, std::mt19937_64 &rng) {
  std::normal_distribution<double> z;
  SpectralVector v(n);
  for (std::size_t k = 1; k <= n; ++k)
    v[k - 1] = amp * z(rng) / double(k);
  return v;
}

} // namespace

TEST_CASE("cubic coefficients are validated") {
  CHECK_NOTHROW(CubicCoefficients(1.0, 2.0, 3.0, -1.0));
  CHECK_NOTHROW(CubicCoefficients(1.0, 2.0, 0.0, 0.0));
  CHECK_THROWS_AS(CubicCoefficients(0.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CubicCoefficients(0.0, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK(CubicCoefficients::zero().vanishes());
  CHECK(CubicCoefficients::allen_cahn().evaluate(2.0) == -6.0);
}

TEST_CASE("projection of -v^3 for v = e_1") {
  // (sqrt2 sin)^3 = sqrt2 (3/2 sin(pi x) - 1/2 sin(3 pi x)).
  const SpectralVector p = project_F(SpectralVector::unit(4, 1), CubicCoefficients(0, 0, 0, -1));
  CHECK(p[0] == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(std::abs(p[1]) < 1e-14);
  CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(p[3]) < 1e-14);
}

TEST_CASE("projection of a constant has the odd sine coefficients 2 sqrt2 / (k pi)") {
  const SpectralVector p = project_F(SpectralVector(9), CubicCoefficients(1, 0, 0, 0));
  for (std::size_t k = 1; k <= 9; ++k) {
    const double expected = k % 2 ? 2.0 * std::sqrt(2.0) / (double(k) * kPi) : 0.0;
    CHECK(p[k - 1] == doctest::Approx(expected).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("projection matches high-resolution quadrature") {
  std::mt19937_64 rng(5);
  const std::vector<CubicCoefficients> sets = {CubicCoefficients::allen_cahn(), CubicCoefficients(0.7, -1.3, 2.1, -0.4),
                                               CubicCoefficients(-2.0, 0.5, -1.0, -3.0),
                                               CubicCoefficients(0.0, 0.0, 1.0, -1.0)};
  for (const auto &a : sets)
    for (std::size_t n : {1u, 3u, 8u, 16u}) {
      const SpectralVector v = random_vector(n, 1.5, rng);
      const SpectralVector p = project_F(v, a);
      for (std::size_t k = 1; k <= n; ++k) {
        const double ref = integrate01([&](double x) {
          return a.evaluate(eval_series(v, x)) * std::sqrt(2.0) * std::sin(double(k) * kPi * x);
        });
        CHECK(std::abs(p[k - 1] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
      }
    }
}

TEST_CASE("projection refuses aliasing grids") {
  const SpectralVector v(8);
  CHECK(alias_free_grid_size(8) == 32);
  CHECK_THROWS_AS(project_F(v, CubicCoefficients::allen_cahn(), 16), AliasRiskError);
  CHECK_NOTHROW(project_F(v, CubicCoefficients::allen_cahn(), 32));
}

TEST_CASE("monotonicity constant") {
  CHECK(monotonicity_constant(CubicCoefficients::allen_cahn()) == 2.0);
  CHECK(monotonicity_constant(CubicCoefficients::zero()) == 2.0);
  // 2 * max{1, 1/0.5} * max{1, 3^2, (2*1)^2} = 36.
  CHECK(monotonicity_constant(CubicCoefficients(0, 3, 1, -0.5)) == doctest::Approx(36.0));
}

TEST_CASE("inequality residuals match quadrature oracles") {
  const OperatorSpectrum spec(1.3);
  std::mt19937_64 rng(17);
  const CubicCoefficients a(0.4, 1.5, -0.8, -0.6);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 6;
    const SpectralVector v = random_vector(n, 2.0, rng), w = random_vector(n, 2.0, rng);
    const SpectralVector d = v - w;

    // monotonicity: <d, A d> + <d, F(v)-F(w)> - c |d|^2
    double dad = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      dad -= spec.eigenvalue(k) * d[k - 1] * d[k - 1];
    const double cross = integrate01([&](double x) {
      return eval_series(d, x) * (a.evaluate(eval_series(v, x)) - a.evaluate(eval_series(w, x)));
    });
    const double mono = dad + cross - monotonicity_constant(a) * dot(d, d);
    CHECK(check_monotonicity(v, w, a, spec) == doctest::Approx(mono).epsilon(1e-11));

    // Lipschitz with L6 norms.
    auto l6 = [&](const SpectralVector &u) {
      return std::pow(integrate01([&](double x) { return std::pow(eval_series(u, x), 6); }), 1.0 / 6.0);
    };
    const double lhs = integrate01([&](double x) {
      const double f = a.evaluate(eval_series(v, x)) - a.evaluate(eval_series(w, x));
      return f * f;
    });
    const double amax = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2]), std::abs(a[3])});
    const double lip = lhs - 36.0 * amax * amax * std::pow(l6(d), 2) * (1.0 + std::pow(l6(v), 4) + std::pow(l6(w), 4));
    CHECK(check_lipschitz(v, w, a) == doctest::Approx(lip).epsilon(1e-10));

    // coercivity-gradient: -nu <v'', F0(v)> = nu int v'^2 F0'(v).
    const double grad = spec.nu() * integrate01([&](double x) {
      const double u = eval_series(v, x), du = eval_derivative(v, x);
      return du * du * (a[1] + 2.0 * a[2] * u + 3.0 * a[3] * u * u);
    });
    double h12 = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      h12 += spec.eigenvalue(k) * v[k - 1] * v[k - 1];
    const double coer = grad - (std::abs(a[1]) + a[2] * a[2] / (3.0 * std::abs(a[3]))) * h12;
    CHECK(check_coercivity_gradient(v, a, spec) == doctest::Approx(coer).epsilon(1e-10));
  }
}

TEST_CASE("randomized inequality audits pass") {
  const OperatorSpectrum spec(1.0);
  for (const auto &a : {CubicCoefficients::allen_cahn(), CubicCoefficients(0.5, -2.0, 1.0, -1.0),
                        CubicCoefficients(0.0, 0.0, 0.0, 0.0)})
    for (InequalityKind kind :
         {InequalityKind::monotonicity, InequalityKind::lipschitz, InequalityKind::coercivity_gradient}) {
      const InequalityAudit r = audit_inequality(kind, a, spec, 200, 16, 99);
      INFO(to_string(kind));
      CHECK(r.trials == 200);
      CHECK(r.passed());
      CHECK(r.max_residual <= 1e-8);
      CHECK(r.mean_residual <= r.max_residual);
    }
}
