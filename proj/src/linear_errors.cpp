#include "spde/linear_errors.hpp"

#include "spde/io.hpp"
#include "spde/stats.hpp"

#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace spde {

namespace {

void require_positive(double horizon, double nu) {
  if (!(horizon > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("T and nu must be positive");
}

// sum_{k>K} 1 / (2 nu pi^2 k^2) = trigamma(K+1) / (2 nu pi^2).
double inverse_square_tail(std::size_t K, double nu) {
  return boost::math::trigamma(double(K) + 1.0) / (2.0 * nu * kPi * kPi);
}

// int_0^1 e^{-2xu} (1 - e^{-x(1-u)})^2 du, i.e. the per-step bracket divided by h.
double step_bracket(double x) {
  if (x < 0.1) {
    static constexpr double c[] = {1.0 / 3.0,          -5.0 / 12.0,           17.0 / 60.0,
                                   -49.0 / 360.0,      43.0 / 840.0,          -107.0 / 6720.0,
                                   769.0 / 181440.0,   -1793.0 / 1814400.0,   4097.0 / 19958400.0,
                                   -9217.0 / 239500800.0, 6827.0 / 1037836800.0, -15019.0 / 14529715200.0};
    double s = 0.0;
    for (int i = int(std::size(c)) - 1; i >= 0; --i)
      s = s * x + c[i];
    return s * x * x;
  }
  const double e1 = std::exp(-x);
  return -std::expm1(-2.0 * x) / (2.0 * x) + 2.0 * e1 * std::expm1(-x) / x + e1 * e1;
}

// sum_{j=0}^{M-1} e^{-2 mu j h} = (1 - e^{-2 mu T}) / (1 - e^{-2 mu h}).
double geometric_weight(double mu, double h, std::size_t steps) {
  const double den = -std::expm1(-2.0 * mu * h);
  if (den == 0.0)
    return double(steps);
  return -std::expm1(-2.0 * mu * h * double(steps)) / den;
}

} // namespace

double spatial_error_exact(std::size_t modes, double horizon, double nu, double tail_rel_tol) {
  require_positive(horizon, nu);
  if (!(tail_rel_tol > 0.0))
    throw std::invalid_argument("tail tolerance must be positive");
  const OperatorSpectrum spec(nu);
  CompensatedSum sum;
  std::size_t k = modes + 1;
  for (;; ++k) {
    const double mu = spec.eigenvalue(k);
    const double decay = std::exp(-2.0 * mu * horizon);
    if (decay <= tail_rel_tol)
      break;
    sum += -std::expm1(-2.0 * mu * horizon) / (2.0 * mu);
  }
  // Remaining terms equal 1/(2 mu_k) up to a relative factor e^{-2 mu_k T} <= tol.
  sum += inverse_square_tail(k - 1, nu);
  return std::sqrt(sum.value());
}

double temporal_mode_integral(std::size_t k, std::size_t steps, double horizon, double nu) {
  require_positive(horizon, nu);
  if (steps < 1 || k < 1)
    throw std::invalid_argument("M and k must be >= 1");
  const double mu = eigenvalue(long(k), nu);
  const double h = horizon / double(steps);
  return geometric_weight(mu, h, steps) * h * step_bracket(mu * h);
}

double temporal_error_exact(std::size_t steps, ModeCount modes, double horizon, double nu, double tail_rel_tol) {
  require_positive(horizon, nu);
  if (steps < 1)
    throw std::invalid_argument("M must be >= 1");
  CompensatedSum sum;
  if (!modes.is_all()) {
    for (std::size_t k = 1; k <= modes.value(); ++k)
      sum += temporal_mode_integral(k, steps, horizon, nu);
    return std::sqrt(sum.value());
  }
  // For mu h large the mode integral is 1/(2 mu) (1 + O(e^{-mu h})).
  const OperatorSpectrum spec(nu);
  const double h = horizon / double(steps);
  std::size_t k = 1;
  for (;; ++k) {
    if (4.0 * std::exp(-spec.eigenvalue(k) * h) <= tail_rel_tol)
      break;
    sum += temporal_mode_integral(k, steps, horizon, nu);
  }
  sum += inverse_square_tail(k - 1, nu);
  return std::sqrt(sum.value());
}

double full_error_exact(std::size_t steps, ModeCount modes, double horizon, double nu) {
  const double temporal = temporal_error_exact(steps, modes, horizon, nu);
  if (modes.is_all())
    return temporal;
  const double spatial = spatial_error_exact(modes.value(), horizon, nu);
  return std::sqrt(spatial * spatial + temporal * temporal);
}

namespace {

// M^{-1/4} [ int_0^X sqrt(T)(1 - e^{-nu pi^2 T}) e^2 / (c nu pi^2 sqrt(2) (x + a)^{3/2}) dx ]^{1/2}
// with a = (1 + sqrt(T))^2 and e = 1 - exp(-nu pi^2 min{1, T N^2 / (2M)}).
double temporal_lower(std::size_t steps, ModeCount modes, double horizon, double nu, double denominator_factor) {
  require_positive(horizon, nu);
  if (steps < 1)
    throw std::invalid_argument("M must be >= 1");
  const double M = double(steps);
  const double a = (1.0 + std::sqrt(horizon)) * (1.0 + std::sqrt(horizon));
  double e, integral;
  if (modes.is_all()) {
    e = -std::expm1(-nu * kPi * kPi);
    integral = 2.0 / std::sqrt(a);
  } else {
    const double N = double(modes.value());
    const double lead = 1.0 + std::sqrt(horizon) / std::sqrt(2.0 * M);
    const double X = std::max(0.0, horizon * (N + 1.0) * (N + 1.0) / (2.0 * M) - lead * lead);
    e = -std::expm1(-nu * kPi * kPi * std::min(1.0, horizon * N * N / (2.0 * M)));
    integral = 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(X + a));
  }
  const double prefactor = std::sqrt(horizon) * -std::expm1(-nu * kPi * kPi * horizon) * e * e /
                           (denominator_factor * nu * kPi * kPi * std::sqrt(2.0));
  return std::pow(M, -0.25) * std::sqrt(prefactor * integral);
}

double hs_upper_constant(double nu) {
  const double sn = std::sqrt(nu);
  return 1.0 / (kPi * sn) + 1.0 / (nu * kPi * kPi) + 4.0 * kPi * sn;
}

} // namespace

double bound_lower_temporal(std::size_t steps, ModeCount modes, double horizon, double nu) {
  return temporal_lower(steps, modes, horizon, nu, 8.0);
}

double bound_upper_temporal(std::size_t steps, double horizon, double nu) {
  require_positive(horizon, nu);
  if (steps < 1)
    throw std::invalid_argument("M must be >= 1");
  return std::pow(double(steps), -0.25) * std::sqrt(std::sqrt(horizon) / 2.0 * hs_upper_constant(nu));
}

double bound_lower_spatial(std::size_t modes, double horizon, double nu) {
  require_positive(horizon, nu);
  if (modes < 1)
    throw std::invalid_argument("N must be >= 1");
  return std::sqrt(-std::expm1(-nu * horizon)) / (2.0 * kPi * std::sqrt(nu)) / std::sqrt(double(modes));
}

double bound_upper_spatial(std::size_t modes, double horizon, double nu) {
  require_positive(horizon, nu);
  if (modes < 1)
    throw std::invalid_argument("N must be >= 1");
  return 1.0 / (kPi * std::sqrt(2.0 * nu)) / std::sqrt(double(modes));
}

Bounds bounds_full(std::size_t steps, ModeCount modes, double horizon, double nu) {
  Bounds b;
  b.lower = temporal_lower(steps, modes, horizon, nu, 32.0);
  b.upper = bound_upper_temporal(steps, horizon, nu);
  if (!modes.is_all()) {
    const double N = double(modes.value());
    b.lower += std::sqrt(-std::expm1(-nu * horizon)) / (4.0 * kPi * std::sqrt(nu)) / std::sqrt(N);
    b.upper += bound_upper_spatial(modes.value(), horizon, nu);
  }
  return b;
}

HsNormBracket hs_norm_bracket(ModeCount modes, double t, double horizon, double nu) {
  require_positive(horizon, nu);
  if (!(t > 0.0) || t > horizon)
    throw std::invalid_argument("t must lie in (0, T]");
  const OperatorSpectrum spec(nu);
  const double st = std::sqrt(t);
  CompensatedSum sum;
  std::size_t k = 1;
  for (;; ++k) {
    if (!modes.is_all() && k > modes.value())
      break;
    const double mu = spec.eigenvalue(k);
    if (modes.is_all() && std::exp(-mu * t) <= 1e-17)
      break;
    const double g = -std::expm1(-mu * t);
    sum += g * g / (mu * st);
  }
  if (modes.is_all())
    sum += 2.0 * inverse_square_tail(k - 1, nu) / st;

  const double a = (1.0 + std::sqrt(horizon)) * (1.0 + std::sqrt(horizon));
  double e, integral;
  if (modes.is_all()) {
    e = -std::expm1(-nu * kPi * kPi);
    integral = 2.0 / std::sqrt(a);
  } else {
    const double N = double(modes.value());
    const double X = std::max(0.0, t * (N + 1.0) * (N + 1.0) - (1.0 + st) * (1.0 + st));
    e = -std::expm1(-nu * kPi * kPi * std::min(1.0, t * N * N));
    integral = 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(X + a));
  }
  HsNormBracket b;
  b.value = std::sqrt(sum.value());
  b.lower = std::sqrt(e * e * integral / (2.0 * nu * kPi * kPi));
  b.upper = std::sqrt(hs_upper_constant(nu));
  return b;
}

bool hs_monotone_in_semigroup_time(std::size_t modes, double s1, double s2, double t, double nu) {
  if (!(0.0 <= s1 && s1 <= s2) || !(t >= 0.0))
    throw std::invalid_argument("need 0 <= s1 <= s2 and t >= 0");
  const OperatorSpectrum spec(nu);
  CompensatedSum a, b;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double mu = spec.eigenvalue(k);
    const double g = -std::expm1(-mu * t);
    a += std::exp(-2.0 * mu * s1) * g * g;
    b += std::exp(-2.0 * mu * s2) * g * g;
  }
  return a.value() >= b.value();
}

bool hs_monotone_in_increment_time(std::size_t modes, double t, double s1, double s2, double nu) {
  if (!(0.0 <= s1 && s1 <= s2) || !(t >= 0.0))
    throw std::invalid_argument("need 0 <= s1 <= s2 and t >= 0");
  const OperatorSpectrum spec(nu);
  CompensatedSum a, b;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double mu = spec.eigenvalue(k);
    const double d = std::exp(-2.0 * mu * t);
    const double g1 = -std::expm1(-mu * s1);
    const double g2 = -std::expm1(-mu * s2);
    a += d * g1 * g1;
    b += d * g2 * g2;
  }
  return a.value() <= b.value();
}

std::vector<double> coupled_ou_distance(std::size_t steps, std::size_t modes, std::size_t ref_steps,
                                        std::size_t ref_modes, double horizon, double nu,
                                        const SpectralVector &initial) {
  require_positive(horizon, nu);
  if (steps < 1 || ref_steps % steps != 0)
    throw std::invalid_argument("M must divide M_ref");
  if (modes < 1 || modes > ref_modes)
    throw std::invalid_argument("need 1 <= N <= N_ref");
  const OperatorSpectrum spec(nu);
  const std::size_t ratio = ref_steps / steps;
  const double hf = horizon / double(ref_steps);

  // On the fine interval [i hf, (i+1) hf) the reference integrand is
  // e^{-mu (t - i hf)} and the coarse one e^{-mu (t - floor(i/ratio) ratio hf)};
  // both are constant there, so the Ito isometry reduces to finite sums.
  std::vector<double> out(steps + 1, 0.0);
  for (std::size_t m = 1; m <= steps; ++m) {
    const std::size_t fine_end = m * ratio;
    const double t = double(fine_end) * hf;
    CompensatedSum sum;
    for (std::size_t k = 1; k <= ref_modes; ++k) {
      const double mu = spec.eigenvalue(k);
      for (std::size_t i = 0; i < fine_end; ++i) {
        const double ref = std::exp(-mu * double(fine_end - i) * hf);
        const double coarse = k <= modes ? std::exp(-mu * double(fine_end - (i / ratio) * ratio) * hf) : 0.0;
        sum += hf * (ref - coarse) * (ref - coarse);
      }
      if (k > modes && k <= initial.size()) {
        const double det = std::exp(-mu * t) * initial[k - 1];
        sum += det * det;
      }
    }
    out[m] = std::sqrt(sum.value());
  }
  CompensatedSum at_zero;
  for (std::size_t k = modes + 1; k <= std::min(ref_modes, initial.size()); ++k)
    at_zero += initial[k - 1] * initial[k - 1];
  out[0] = std::sqrt(at_zero.value());
  return out;
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::temporal:
    return "temporal";
  case ErrorKind::spatial:
    return "spatial";
  case ErrorKind::full:
    return "full";
  }
  return "unknown";
}

std::vector<ErrorBoundsReport> heat_error_reports(const std::vector<std::size_t> &steps_grid,
                                                  const std::vector<ModeCount> &modes_grid, double horizon,
                                                  double nu) {
  std::vector<ErrorBoundsReport> rows;
  for (std::size_t M : steps_grid) {
    for (const ModeCount &N : modes_grid) {
      const double temporal = temporal_error_exact(M, N, horizon, nu);
      rows.push_back({M, N, ErrorKind::temporal, temporal, bound_lower_temporal(M, N, horizon, nu),
                      bound_upper_temporal(M, horizon, nu)});
      if (N.is_all())
        continue;
      const double spatial = spatial_error_exact(N.value(), horizon, nu);
      rows.push_back({M, N, ErrorKind::spatial, spatial, bound_lower_spatial(N.value(), horizon, nu),
                      bound_upper_spatial(N.value(), horizon, nu)});
      const Bounds b = bounds_full(M, N, horizon, nu);
      rows.push_back(
          {M, N, ErrorKind::full, std::sqrt(spatial * spatial + temporal * temporal), b.lower, b.upper});
    }
  }
  return rows;
}

void write_error_reports_csv(std::ostream &os, const std::vector<ErrorBoundsReport> &rows) {
  os << "M,N,exact,lower,upper,kind\n";
  for (const auto &r : rows)
    os << r.steps << ',' << r.modes.to_string() << ',' << format_double(r.exact) << ',' << format_double(r.lower)
       << ',' << format_double(r.upper) << ',' << to_string(r.kind) << '\n';
}

RateFit fit_rate(const std::vector<std::pair<double, double>> &resolution_error) {
  if (resolution_error.size() < 3)
    throw std::invalid_argument("rate fit needs at least 3 points");
  std::vector<double> xs, ys;
  for (const auto &[res, err] : resolution_error) {
    if (!(res > 0.0) || !(err > 0.0) || !std::isfinite(err))
      throw std::invalid_argument("rate fit needs positive resolutions and errors");
    xs.push_back(std::log(res));
    ys.push_back(std::log(err));
  }
  const double n = double(xs.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx.value() == 0.0)
    throw std::invalid_argument("rate fit needs at least two distinct resolutions");
  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum rss;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss.value() / n);
  return fit;
}

} // namespace spde
