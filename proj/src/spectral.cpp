#include "spde/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace spde {

SpectralVector::SpectralVector(std::size_t n, double value) : c_(n, value) {}

SpectralVector::SpectralVector(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

SpectralVector::SpectralVector(std::initializer_list<double> coeffs) : c_(coeffs) {}

SpectralVector SpectralVector::unit(std::size_t n, std::size_t k) {
  if (k < 1 || k > n)
    throw std::invalid_argument("unit vector index out of range");
  SpectralVector v(n);
  v.c_[k - 1] = 1.0;
  return v;
}

bool SpectralVector::all_finite() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double x) { return std::isfinite(x); });
}

SpectralVector SpectralVector::truncated(std::size_t n) const {
  SpectralVector out(n);
  std::copy_n(c_.begin(), std::min(n, c_.size()), out.c_.begin());
  return out;
}

SpectralVector &SpectralVector::operator+=(const SpectralVector &o) {
  if (o.size() != size())
    throw std::invalid_argument("spectral vector dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i)
    c_[i] += o.c_[i];
  return *this;
}

SpectralVector &SpectralVector::operator-=(const SpectralVector &o) {
  if (o.size() != size())
    throw std::invalid_argument("spectral vector dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i)
    c_[i] -= o.c_[i];
  return *this;
}

SpectralVector &SpectralVector::operator*=(double s) {
  for (double &x : c_)
    x *= s;
  return *this;
}

double dot(const SpectralVector &a, const SpectralVector &b) {
  if (a.size() != b.size())
    throw std::invalid_argument("spectral vector dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

double eigenvalue(long k, double nu) {
  if (k < 1)
    throw std::invalid_argument("mode index must be >= 1");
  if (!(nu > 0.0))
    throw std::invalid_argument("diffusion coefficient must be positive");
  return OperatorSpectrum(nu).eigenvalue(std::size_t(k));
}

OperatorSpectrum::OperatorSpectrum(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("diffusion coefficient must be positive and finite");
}

std::vector<double> hr_weights(std::size_t n, double r, const OperatorSpectrum &spec) {
  std::vector<double> w(n);
  for (std::size_t k = 1; k <= n; ++k)
    w[k - 1] = r == 0.0 ? 1.0 : std::pow(spec.eigenvalue(k), 2.0 * r);
  return w;
}

double hr_norm(const SpectralVector &v, std::span<const double> weights) {
  if (weights.size() < v.size())
    throw std::invalid_argument("H_r weight table shorter than vector");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += weights[i] * v[i] * v[i];
  return std::sqrt(s);
}

double hr_norm(const SpectralVector &v, double r, const OperatorSpectrum &spec) {
  if (!v.all_finite())
    throw std::invalid_argument("non-finite spectral coefficients");
  return hr_norm(v, hr_weights(v.size(), r, spec));
}

SpectralVector apply_semigroup(const SpectralVector &v, double h, const OperatorSpectrum &spec) {
  if (!(h >= 0.0))
    throw std::invalid_argument("semigroup time must be nonnegative");
  SpectralVector out = v;
  for (std::size_t k = 1; k <= v.size(); ++k)
    out[k - 1] *= std::exp(-spec.eigenvalue(k) * h);
  return out;
}

double phi1_multiplier(double mu, double h) {
  const double x = mu * h;
  if (x < kPhi1SeriesThreshold) {
    // h (1 - x/2 + x^2/6 - x^3/24)
    return h * (1.0 - x / 2.0 * (1.0 - x / 3.0 * (1.0 - x / 4.0)));
  }
  return -std::expm1(-x) / mu;
}

SpectralVector apply_phi1(const SpectralVector &v, double h, const OperatorSpectrum &spec) {
  if (!(h >= 0.0))
    throw std::invalid_argument("phi1 time must be nonnegative");
  SpectralVector out = v;
  for (std::size_t k = 1; k <= v.size(); ++k)
    out[k - 1] *= phi1_multiplier(spec.eigenvalue(k), h);
  return out;
}

namespace detail {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (kind, size) and never destroyed.
class PlanCache {
public:
  fftw_plan get(fftw_r2r_kind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(int(kind), n);
    if (auto it = plans_.find(key); it != plans_.end())
      return it->second;
    std::vector<double> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_r2r_1d(n, in.data(), out.data(), kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p)
      throw std::runtime_error("fftw plan creation failed for size " + std::to_string(n));
    plans_.emplace(key, p);
    return p;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache &plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(fftw_r2r_kind kind, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size() || in.empty())
    throw std::invalid_argument("transform size mismatch");
  fftw_plan p = plan_cache().get(kind, int(in.size()));
  // Out-of-place r2r transforms preserve their input.
  fftw_execute_r2r(p, const_cast<double *>(in.data()), out.data());
}

} // namespace

void dst1(std::span<const double> in, std::span<double> out) { execute(FFTW_RODFT00, in, out); }

void dct1(std::span<const double> in, std::span<double> out) {
  if (in.size() < 2)
    throw std::invalid_argument("DCT-I needs at least two points");
  execute(FFTW_REDFT00, in, out);
}

} // namespace detail

GridFunction to_grid(const SpectralVector &v, std::size_t grid_size) {
  if (grid_size < 2 || grid_size - 1 < v.size())
    throw std::invalid_argument("grid too coarse for spectral vector: need G-1 >= N");
  const std::size_t n = grid_size - 1;
  std::vector<double> padded(n, 0.0);
  std::copy(v.coeffs().begin(), v.coeffs().end(), padded.begin());
  GridFunction g{grid_size, std::vector<double>(n)};
  detail::dst1(padded, g.values);
  const double scale = std::sqrt(2.0) / 2.0;
  for (double &x : g.values)
    x *= scale;
  return g;
}

SpectralVector from_grid(const GridFunction &g, std::size_t n_modes) {
  if (g.grid_size < 2 || g.values.size() != g.grid_size - 1)
    throw std::invalid_argument("malformed grid function");
  if (n_modes > g.values.size())
    throw std::invalid_argument("cannot analyse more modes than interior grid nodes");
  std::vector<double> out(g.values.size());
  detail::dst1(g.values, out);
  const double scale = std::sqrt(2.0) / (2.0 * double(g.grid_size));
  out.resize(n_modes);
  for (double &x : out)
    x *= scale;
  return SpectralVector(std::move(out));
}

double lq_norm_on_grid(const GridFunction &g, double q) {
  if (!(q >= 1.0))
    throw std::invalid_argument("L^q exponent must be >= 1");
  if (std::isinf(q))
    return sup_norm_on_grid(g);
  double s = 0.0;
  for (double x : g.values)
    s += std::pow(std::abs(x), q);
  return std::pow(s / double(g.grid_size), 1.0 / q);
}

double sup_norm_on_grid(const GridFunction &g) {
  double m = 0.0;
  for (double x : g.values)
    m = std::max(m, std::abs(x));
  return m;
}

std::size_t grid_size_for(std::size_t min_interior) {
  std::size_t g = 2;
  while (g - 1 < min_interior)
    g *= 2;
  return g;
}

} // namespace spde
