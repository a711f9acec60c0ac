#pragma once

// Sine eigenbasis of the Dirichlet Laplacian on (0,1).
//
// A function v is represented by its coefficients c_k = <e_k, v> against
// e_k(x) = sqrt(2) sin(k pi x), k = 1..N. The operator A = nu * d^2/dx^2 is
// diagonal in this basis with A e_k = -mu_k e_k, mu_k = nu pi^2 k^2.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace spde {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

class SpectralVector {
public:
  SpectralVector() = default;
  explicit SpectralVector(std::size_t n, double value = 0.0);
  explicit SpectralVector(std::vector<double> coeffs);
  SpectralVector(std::initializer_list<double> coeffs);

  /// Unit vector e_k (1-based mode index) in an N-dimensional space.
  static SpectralVector unit(std::size_t n, std::size_t k);

  std::size_t size() const noexcept { return c_.size(); }
  bool empty() const noexcept { return c_.empty(); }

  /// 0-based storage: operator[](k-1) is the coefficient of e_k.
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  double &operator[](std::size_t i) noexcept { return c_[i]; }

  /// Coefficient of e_k, 1-based.
  double mode(std::size_t k) const { return c_.at(k - 1); }

  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }
  const std::vector<double> &data() const noexcept { return c_; }

  bool all_finite() const noexcept;

  /// First n coefficients (P_n), zero-padded when n > size().
  SpectralVector truncated(std::size_t n) const;

  SpectralVector &operator+=(const SpectralVector &o);
  SpectralVector &operator-=(const SpectralVector &o);
  SpectralVector &operator*=(double s);

  friend SpectralVector operator+(SpectralVector a, const SpectralVector &b) { return a += b; }
  friend SpectralVector operator-(SpectralVector a, const SpectralVector &b) { return a -= b; }
  friend SpectralVector operator*(double s, SpectralVector a) { return a *= s; }
  friend bool operator==(const SpectralVector &, const SpectralVector &) = default;

private:
  std::vector<double> c_;
};

/// Euclidean (= L^2(0,1)) inner product of two coefficient vectors of equal size.
double dot(const SpectralVector &a, const SpectralVector &b);

/// mu_k = nu pi^2 k^2. Throws std::invalid_argument for k < 1 or nu <= 0.
double eigenvalue(long k, double nu);

class OperatorSpectrum {
public:
  explicit OperatorSpectrum(double nu);

  double nu() const noexcept { return nu_; }
  double eigenvalue(std::size_t k) const noexcept { return nu_ * kPi * kPi * double(k) * double(k); }

private:
  double nu_;
};

/// ||(-A)^r v||_H = (sum_k mu_k^{2r} c_k^2)^{1/2}.
double hr_norm(const SpectralVector &v, double r, const OperatorSpectrum &spec);

/// Per-mode weights mu_k^{2r}, k = 1..n, so repeated H_r norms avoid pow().
std::vector<double> hr_weights(std::size_t n, double r, const OperatorSpectrum &spec);
double hr_norm(const SpectralVector &v, std::span<const double> weights);

/// e^{hA}: c_k -> e^{-mu_k h} c_k.
SpectralVector apply_semigroup(const SpectralVector &v, double h, const OperatorSpectrum &spec);

/// A^{-1}(e^{hA} - Id) restricted to P_N(H): c_k -> (1 - e^{-mu_k h}) / mu_k * c_k.
SpectralVector apply_phi1(const SpectralVector &v, double h, const OperatorSpectrum &spec);

/// Scalar multiplier (1 - e^{-mu h}) / mu, switching to a Taylor series for
/// mu h below kPhi1SeriesThreshold.
double phi1_multiplier(double mu, double h);
inline constexpr double kPhi1SeriesThreshold = 1e-5;

/// Values at interior nodes x_j = j/G, j = 1..G-1.
struct GridFunction {
  std::size_t grid_size = 0;  // G
  std::vector<double> values; // size G-1

  double node(std::size_t j) const noexcept { return double(j) / double(grid_size); }
};

/// Sine-series synthesis sum_k c_k sqrt(2) sin(k pi x_j). Requires G-1 >= N.
GridFunction to_grid(const SpectralVector &v, std::size_t grid_size);

/// First N sine coefficients of the trigonometric interpolant of g.
SpectralVector from_grid(const GridFunction &g, std::size_t n_modes);

/// Composite trapezoid on [0,1] with zero boundary values: (sum_j |g_j|^q / G)^{1/q}.
double lq_norm_on_grid(const GridFunction &g, double q);
double sup_norm_on_grid(const GridFunction &g);

/// Smallest power of two G with G - 1 >= min_interior.
std::size_t grid_size_for(std::size_t min_interior);

namespace detail {

/// Unnormalized DST-I: y_j = 2 sum_{k=0}^{n-1} x_k sin(pi (j+1)(k+1)/(n+1)).
void dst1(std::span<const double> in, std::span<double> out);

/// Unnormalized DCT-I on n points: y_k = x_0 + (-1)^k x_{n-1} + 2 sum_{j=1}^{n-2} x_j cos(pi j k/(n-1)).
void dct1(std::span<const double> in, std::span<double> out);

} // namespace detail

} // namespace spde
