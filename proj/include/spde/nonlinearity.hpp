#pragma once

// Cubic Nemytskii drift F(v)(x) = a0 + a1 v(x) + a2 v(x)^2 + a3 v(x)^3 and
// its Galerkin projection onto the first N sine modes.

#include "spde/spectral.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spde {

class AliasRiskError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class CubicCoefficients {
public:
  /// Throws std::invalid_argument unless a3 <= 0 and (a3 == 0 implies a2 == 0).
  CubicCoefficients(double a0, double a1, double a2, double a3);
  explicit CubicCoefficients(const std::array<double, 4> &a) : CubicCoefficients(a[0], a[1], a[2], a[3]) {}

  static CubicCoefficients zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static CubicCoefficients allen_cahn() { return {0.0, 1.0, 0.0, -1.0}; }

  double operator[](std::size_t i) const noexcept { return a_[i]; }
  const std::array<double, 4> &values() const noexcept { return a_; }

  /// F is identically zero.
  bool vanishes() const noexcept { return a_[0] == 0.0 && a_[1] == 0.0 && a_[2] == 0.0 && a_[3] == 0.0; }

  double evaluate(double v) const noexcept { return a_[0] + v * (a_[1] + v * (a_[2] + v * a_[3])); }

  friend bool operator==(const CubicCoefficients &, const CubicCoefficients &) = default;

private:
  std::array<double, 4> a_;
};

/// P_N F(v). Requires G - 1 >= 3N + 1; throws AliasRiskError otherwise.
SpectralVector project_F(const SpectralVector &v, const CubicCoefficients &a, std::size_t grid_size);

/// project_F on the smallest power-of-two grid that is alias-free for v.
SpectralVector project_F(const SpectralVector &v, const CubicCoefficients &a);

/// Minimal alias-free grid size for project_F with N modes.
std::size_t alias_free_grid_size(std::size_t n_modes);

/// c = 2 max{1, 1/(|a3| + 1_{0}(a3))} max{1, max_{k=1,2} (k |a_k|)^2}.
double monotonicity_constant(const CubicCoefficients &a);

/// <v-w, A(v-w) + F(v) - F(w)>_H - c ||v-w||_H^2.
double check_monotonicity(const SpectralVector &v, const SpectralVector &w, const CubicCoefficients &a,
                          const OperatorSpectrum &spec);

/// ||F(v)-F(w)||_H^2 - 36 max_j|a_j|^2 ||v-w||_{L6}^2 (1 + ||v||_{L6}^4 + ||w||_{L6}^4),
/// all norms by trapezoidal quadrature on a grid of size G (0 picks 8N rounded up).
double check_lipschitz(const SpectralVector &v, const SpectralVector &w, const CubicCoefficients &a,
                       std::size_t grid_size = 0);

/// -nu sum_{k=1}^3 a_k <v'', v^k>_H - (|a1| + a2^2/(3|a3| + 1_{0}(a3))) ||v||_{H_1/2}^2.
double check_coercivity_gradient(const SpectralVector &v, const CubicCoefficients &a,
                                 const OperatorSpectrum &spec);

enum class InequalityKind { monotonicity, lipschitz, coercivity_gradient };

std::string to_string(InequalityKind kind);

struct InequalityAudit {
  InequalityKind kind;
  CubicCoefficients coefficients;
  std::size_t trials = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t violations = 0;
  double tolerance = 0.0;

  bool passed() const noexcept { return violations == 0; }
};

/// Randomized audit over `trials` draws with mode counts in 1..max_modes.
/// Inputs have amplitude spread over several orders of magnitude so both the
/// linear and the cubic regime of F are exercised.
InequalityAudit audit_inequality(InequalityKind kind, const CubicCoefficients &a, const OperatorSpectrum &spec,
                                 std::size_t trials, std::size_t max_modes, std::uint64_t seed,
                                 double tolerance = 1e-8);

} // namespace spde
