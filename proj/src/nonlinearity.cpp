#include "spde/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace spde {

CubicCoefficients::CubicCoefficients(double a0, double a1, double a2, double a3) : a_{a0, a1, a2, a3} {
  for (double x : a_)
    if (!std::isfinite(x))
      throw std::invalid_argument("cubic coefficients must be finite");
  if (a3 > 0.0)
    throw std::invalid_argument("leading coefficient a3 must be <= 0");
  if (a3 == 0.0 && a2 != 0.0)
    throw std::invalid_argument("a2 must vanish when a3 == 0");
}

std::size_t alias_free_grid_size(std::size_t n_modes) { return grid_size_for(3 * n_modes + 1); }

namespace {

// Cosine coefficients b_0..b_{G-1} of a function sampled at x_j = j/G,
// j = 0..G, whose boundary samples are zero:
//   f(x) = b_0 + sum_{m>=1} b_m cos(m pi x).
std::vector<double> cosine_coefficients(const std::vector<double> &interior, std::size_t grid_size) {
  std::vector<double> samples(grid_size + 1, 0.0);
  std::copy(interior.begin(), interior.end(), samples.begin() + 1);
  std::vector<double> y(grid_size + 1);
  detail::dct1(samples, y);
  std::vector<double> b(grid_size);
  b[0] = y[0] / (2.0 * double(grid_size));
  for (std::size_t m = 1; m < grid_size; ++m)
    b[m] = y[m] / double(grid_size);
  return b;
}

// <e_k, cos(m pi .)>_H = sqrt(2) k (1 - (-1)^{k+m}) / (pi (k^2 - m^2)), zero for k == m.
double sine_cosine_overlap(std::size_t k, std::size_t m) {
  if ((k + m) % 2 == 0)
    return 0.0;
  const double kk = double(k), mm = double(m);
  return std::sqrt(2.0) * 2.0 * kk / (kPi * (kk * kk - mm * mm));
}

} // namespace

SpectralVector project_F(const SpectralVector &v, const CubicCoefficients &a, std::size_t grid_size) {
  const std::size_t n = v.size();
  if (n == 0)
    throw std::invalid_argument("empty spectral vector");
  if (grid_size < 2 || grid_size - 1 < 3 * n + 1)
    throw AliasRiskError("grid size " + std::to_string(grid_size) + " aliases cubic terms of " +
                         std::to_string(n) + " modes; need G-1 >= 3N+1");
  if (!v.all_finite())
    throw std::invalid_argument("non-finite spectral coefficients");

  SpectralVector out = a[1] * v;
  const bool odd_cubic = a[3] != 0.0;
  const bool even_part = a[0] != 0.0 || a[2] != 0.0;
  if (!odd_cubic && !even_part)
    return out;

  const GridFunction g = to_grid(v, grid_size);

  if (odd_cubic) {
    // v^3 is an odd, band-limited sine series (modes <= 3N): DST analysis is exact.
    GridFunction cube{grid_size, g.values};
    for (double &x : cube.values)
      x = x * x * x;
    const SpectralVector c3 = from_grid(cube, n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] += a[3] * c3[i];
  }

  if (even_part) {
    // a0 + a2 v^2 is a cosine polynomial of degree <= 2N; its sine projection
    // follows from the exact sine/cosine overlap integrals.
    std::vector<double> b(2 * n + 1, 0.0);
    if (a[2] != 0.0) {
      std::vector<double> sq(g.values.size());
      for (std::size_t j = 0; j < sq.size(); ++j)
        sq[j] = g.values[j] * g.values[j];
      const std::vector<double> full = cosine_coefficients(sq, grid_size);
      for (std::size_t m = 0; m <= 2 * n; ++m)
        b[m] = a[2] * full[m];
    }
    b[0] += a[0];
    for (std::size_t k = 1; k <= n; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m <= 2 * n; ++m)
        if (b[m] != 0.0)
          s += b[m] * sine_cosine_overlap(k, m);
      out[k - 1] += s;
    }
  }
  return out;
}

SpectralVector project_F(const SpectralVector &v, const CubicCoefficients &a) {
  return project_F(v, a, alias_free_grid_size(v.size()));
}

double monotonicity_constant(const CubicCoefficients &a) {
  const double a3 = std::abs(a[3]) + (a[3] == 0.0 ? 1.0 : 0.0);
  const double k1 = std::abs(a[1]);
  const double k2 = 2.0 * std::abs(a[2]);
  return 2.0 * std::max(1.0, 1.0 / a3) * std::max({1.0, k1 * k1, k2 * k2});
}

double check_monotonicity(const SpectralVector &v, const SpectralVector &w, const CubicCoefficients &a,
                          const OperatorSpectrum &spec) {
  if (v.size() != w.size())
    throw std::invalid_argument("spectral vector dimension mismatch");
  const SpectralVector d = v - w;
  double linear = 0.0;
  for (std::size_t k = 1; k <= d.size(); ++k)
    linear -= spec.eigenvalue(k) * d[k - 1] * d[k - 1];
  // <d, F(v) - F(w)> only sees P_N of the difference since d lies in P_N(H).
  const double drift = dot(d, project_F(v, a) - project_F(w, a));
  return linear + drift - monotonicity_constant(a) * dot(d, d);
}

double check_lipschitz(const SpectralVector &v, const SpectralVector &w, const CubicCoefficients &a,
                       std::size_t grid_size) {
  if (v.size() != w.size())
    throw std::invalid_argument("spectral vector dimension mismatch");
  if (grid_size == 0)
    grid_size = grid_size_for(std::max<std::size_t>(8 * v.size(), 64));
  const GridFunction gv = to_grid(v, grid_size);
  const GridFunction gw = to_grid(w, grid_size);

  GridFunction diff{grid_size, std::vector<double>(gv.values.size())};
  double lhs = 0.0;
  for (std::size_t j = 0; j < gv.values.size(); ++j) {
    diff.values[j] = gv.values[j] - gw.values[j];
    const double df = a.evaluate(gv.values[j]) - a.evaluate(gw.values[j]);
    lhs += df * df;
  }
  lhs /= double(grid_size);

  const double amax = std::max({std::abs(a[1]), std::abs(a[2]), std::abs(a[3])});
  const double d6 = lq_norm_on_grid(diff, 6.0);
  const double v6 = lq_norm_on_grid(gv, 6.0);
  const double w6 = lq_norm_on_grid(gw, 6.0);
  const double rhs = 36.0 * amax * amax * d6 * d6 * (1.0 + std::pow(v6, 4) + std::pow(w6, 4));
  return lhs - rhs;
}

double check_coercivity_gradient(const SpectralVector &v, const CubicCoefficients &a,
                                 const OperatorSpectrum &spec) {
  // -nu <v'', v^k> = <(-A) v, v^k> = sum_j mu_j c_j <e_j, v^k>, and (-A)v lies in
  // P_N(H), so the projected drift gives the pairing exactly.
  const CubicCoefficients no_constant(0.0, a[1], a[2], a[3]);
  const SpectralVector fv = project_F(v, no_constant);
  double lhs = 0.0, h_half = 0.0;
  for (std::size_t k = 1; k <= v.size(); ++k) {
    const double mu = spec.eigenvalue(k);
    lhs += mu * v[k - 1] * fv[k - 1];
    h_half += mu * v[k - 1] * v[k - 1];
  }
  const double a3 = 3.0 * std::abs(a[3]) + (a[3] == 0.0 ? 1.0 : 0.0);
  const double rhs = (std::abs(a[1]) + a[2] * a[2] / a3) * h_half;
  return lhs - rhs;
}

std::string to_string(InequalityKind kind) {
  switch (kind) {
  case InequalityKind::monotonicity:
    return "monotonicity";
  case InequalityKind::lipschitz:
    return "lipschitz";
  case InequalityKind::coercivity_gradient:
    return "coercivity_gradient";
  }
  return "unknown";
}

InequalityAudit audit_inequality(InequalityKind kind, const CubicCoefficients &a, const OperatorSpectrum &spec,
                                 std::size_t trials, std::size_t max_modes, std::uint64_t seed,
                                 double tolerance) {
  if (max_modes == 0)
    throw std::invalid_argument("max_modes must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> modes(1, max_modes);
  std::uniform_real_distribution<double> log_amp(std::log(0.05), std::log(5.0));
  std::normal_distribution<double> normal;

  auto draw = [&](std::size_t n) {
    const double amp = std::exp(log_amp(rng));
    SpectralVector v(n);
    for (std::size_t k = 1; k <= n; ++k)
      v[k - 1] = amp * normal(rng) / double(k);
    return v;
  };

  InequalityAudit audit{kind, a, trials, -std::numeric_limits<double>::infinity(), 0.0, 0, tolerance};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = modes(rng);
    const SpectralVector v = draw(n);
    double r = 0.0;
    switch (kind) {
    case InequalityKind::monotonicity:
      r = check_monotonicity(v, draw(n), a, spec);
      break;
    case InequalityKind::lipschitz:
      r = check_lipschitz(v, draw(n), a);
      break;
    case InequalityKind::coercivity_gradient:
      r = check_coercivity_gradient(v, a, spec);
      break;
    }
    audit.max_residual = std::max(audit.max_residual, r);
    audit.mean_residual += r / double(trials);
    if (!(r <= tolerance))
      ++audit.violations;
  }
  return audit;
}

} // namespace spde
