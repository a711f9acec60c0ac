#pragma once

// Space-time white noise in the sine basis and the Ornstein-Uhlenbeck
// processes it drives.
//
// A NoiseTape is a virtual table of standard normals indexed by
// (seed, path, master step j, mode k). Element (j, k) yields
//   dW_{j,k}  -- the increment of <e_k, W> over [j h, (j+1) h], h = T / M_master
//   Z2_{j,k}  -- an independent normal used to sample the exact stochastic
//                convolution int_{jh}^{(j+1)h} e^{-mu_k ((j+1)h - s)} d<e_k, W>_s
//                jointly with dW_{j,k}.
// Nothing is stored; every element is regenerated on demand.

#include "spde/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace spde {

struct TapeHeader {
  std::uint64_t seed = 0;
  std::uint64_t master_steps = 0; // M_master
  std::uint64_t master_modes = 0; // N_master
  double horizon = 1.0;           // T

  friend bool operator==(const TapeHeader &, const TapeHeader &) = default;
};

/// Binary layout (little-endian): "SPDETAPE" | u32 version=1 | u64 seed |
/// u64 M_master | u64 N_master | f64 T. Increments are never serialized.
void write_tape_header(std::ostream &os, const TapeHeader &h);
TapeHeader read_tape_header(std::istream &is);

class NoiseTape {
public:
  NoiseTape(std::uint64_t seed, std::size_t master_steps, std::size_t master_modes, double horizon,
            std::uint32_t path = 0);

  const TapeHeader &header() const noexcept { return header_; }
  std::uint32_t path() const noexcept { return path_; }
  std::size_t master_steps() const noexcept { return std::size_t(header_.master_steps); }
  std::size_t master_modes() const noexcept { return std::size_t(header_.master_modes); }
  double horizon() const noexcept { return header_.horizon; }
  double master_step() const noexcept { return header_.horizon / double(header_.master_steps); }

  /// Same seed and geometry, different Monte Carlo path.
  NoiseTape for_path(std::uint32_t path) const;

  /// (Z1, Z2) standard normals of element (j, k); k is 1-based.
  std::pair<double, double> normals(std::size_t j, std::size_t k) const;

  /// dW_{j,k} = sqrt(T / M_master) Z1.
  double increment(std::size_t j, std::size_t k) const;

private:
  TapeHeader header_;
  std::uint32_t path_;
};

NoiseTape generate_tape(std::uint64_t seed, std::size_t master_steps, std::size_t master_modes, double horizon,
                        std::uint32_t path = 0);

/// Per-step increments for step size T/M restricted to the first n modes:
/// entry m is the sum of the M_master/M master increments in [m T/M, (m+1) T/M).
/// Throws std::invalid_argument if M does not divide M_master or n > N_master.
std::vector<SpectralVector> coarsen_increments(const NoiseTape &tape, std::size_t steps, std::size_t n_modes);

/// All master-step increments of the first n modes, materialized once so that
/// several resolutions can be coarsened from them without regenerating.
std::vector<SpectralVector> master_increments(const NoiseTape &tape, std::size_t n_modes);

/// Same as coarsen_increments, starting from a materialized master table.
std::vector<SpectralVector> coarsen_increments(const std::vector<SpectralVector> &master, std::size_t steps,
                                               std::size_t n_modes);

struct OUState {
  double t = 0.0;
  SpectralVector coeffs;
};

/// O_{t+h} = e^{hA}(O_t + dW): the frozen-semigroup OU update.
OUState ou_step(const OUState &state, const SpectralVector &dW, double h, const OperatorSpectrum &spec);

/// Vectorised ou_step with precomputed decay factors e^{-mu_k h}.
class OUPropagator {
public:
  OUPropagator(std::size_t n_modes, double h, const OperatorSpectrum &spec);

  std::size_t modes() const noexcept { return decay_.size(); }
  double step_size() const noexcept { return h_; }
  std::span<const double> decay() const noexcept { return decay_; }

  void step(SpectralVector &coeffs, const SpectralVector &dW) const;

private:
  double h_;
  std::vector<double> decay_;
};

/// Exact P_N O (untruncated-in-time OU projected on n modes) sampled at the
/// master grid from the same tape that drives the discrete OU. Starts at zero.
class ExactOU {
public:
  ExactOU(const NoiseTape &tape, std::size_t n_modes, const OperatorSpectrum &spec);

  /// Advance one master step (j = current step index).
  void advance();
  std::size_t step_index() const noexcept { return j_; }
  const SpectralVector &coeffs() const noexcept { return x_; }

private:
  const NoiseTape *tape_;
  SpectralVector x_;
  std::vector<double> decay_, dw_gain_, z2_gain_;
  std::size_t j_ = 0;
};

/// Var of mode k of the discrete OU at time T after M steps from zero:
/// sum_{j=0}^{M-1} e^{-2 mu_k (j+1) h} h.
double discrete_ou_variance(std::size_t k, std::size_t steps, double horizon, const OperatorSpectrum &spec);

/// Var of mode k of the exact OU at time t from zero: (1 - e^{-2 mu_k t}) / (2 mu_k).
double exact_ou_variance(std::size_t k, double t, const OperatorSpectrum &spec);

struct OUMomentRow {
  std::size_t steps = 0;
  std::size_t modes = 0;
  double hgamma_moment = 0.0; // E ||O_T||^p_{H_gamma}
  double hgamma_stderr = 0.0;
  double sup_moment = 0.0;    // E sup_m ||O_{mT/M}||^p_{L^inf} (grid max)
  double sup_stderr = 0.0;
};

struct OUMomentOptions {
  double horizon = 1.0;
  double nu = 1.0;
  double p = 2.0;
  double gamma = 0.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Monte Carlo moments of the discrete OU (from zero) over a grid of (M, N).
/// Requires p >= 2 and gamma < 1/4.
std::vector<OUMomentRow> ou_moment_diagnostics(const std::vector<std::size_t> &steps_grid,
                                               const std::vector<std::size_t> &modes_grid,
                                               const OUMomentOptions &opts);

/// Boundedness proxy: no estimate exceeds the largest-resolution estimate by
/// more than 3 of its standard errors.
bool ou_moments_bounded(const std::vector<OUMomentRow> &rows);

} // namespace spde
