#include "spde/noise.hpp"

#include "spde/parallel.hpp"
#include "spde/rng.hpp"
#include "spde/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace spde {

namespace {

constexpr char kTapeMagic[8] = {'S', 'P', 'D', 'E', 'T', 'A', 'P', 'E'};
constexpr std::uint32_t kTapeVersion = 1;

template <class T> void put_le(std::ostream &os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  os.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <class T> T get_le(std::istream &is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(bytes), sizeof(T)))
    throw std::runtime_error("truncated tape header");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

// Conditional variance (per unit h) of the exact convolution given dW:
// (1 - e^{-2x}) / (2x) - ((1 - e^{-x}) / x)^2, x = mu h.
double convolution_residual_variance(double x) {
  if (x < 1e-3)
    return x * x * (1.0 / 12.0 - x * (1.0 / 12.0 - x * (17.0 / 360.0 - x * 7.0 / 360.0)));
  const double phi = -std::expm1(-x) / x;
  return std::max(0.0, -std::expm1(-2.0 * x) / (2.0 * x) - phi * phi);
}

} // namespace

void write_tape_header(std::ostream &os, const TapeHeader &h) {
  os.write(kTapeMagic, sizeof(kTapeMagic));
  put_le(os, kTapeVersion);
  put_le(os, h.seed);
  put_le(os, h.master_steps);
  put_le(os, h.master_modes);
  put_le(os, h.horizon);
  if (!os)
    throw std::runtime_error("failed to write tape header");
}

TapeHeader read_tape_header(std::istream &is) {
  char magic[sizeof(kTapeMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kTapeMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a tape header");
  if (get_le<std::uint32_t>(is) != kTapeVersion)
    throw std::runtime_error("unsupported tape header version");
  TapeHeader h;
  h.seed = get_le<std::uint64_t>(is);
  h.master_steps = get_le<std::uint64_t>(is);
  h.master_modes = get_le<std::uint64_t>(is);
  h.horizon = get_le<double>(is);
  return h;
}

NoiseTape::NoiseTape(std::uint64_t seed, std::size_t master_steps, std::size_t master_modes, double horizon,
                     std::uint32_t path)
    : header_{seed, master_steps, master_modes, horizon}, path_(path) {
  if (master_steps < 1 || master_modes < 1)
    throw std::invalid_argument("tape needs at least one step and one mode");
  if (master_steps > std::numeric_limits<std::uint32_t>::max() ||
      master_modes > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("tape dimensions exceed 32-bit counter range");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be positive");
}

NoiseTape NoiseTape::for_path(std::uint32_t path) const {
  return NoiseTape(header_.seed, master_steps(), master_modes(), header_.horizon, path);
}

std::pair<double, double> NoiseTape::normals(std::size_t j, std::size_t k) const {
  if (j >= master_steps() || k < 1 || k > master_modes())
    throw std::out_of_range("tape element out of range");
  return rng::normal_pair(header_.seed, path_, std::uint32_t(j), std::uint32_t(k));
}

double NoiseTape::increment(std::size_t j, std::size_t k) const {
  return std::sqrt(master_step()) * normals(j, k).first;
}

NoiseTape generate_tape(std::uint64_t seed, std::size_t master_steps, std::size_t master_modes, double horizon,
                        std::uint32_t path) {
  return NoiseTape(seed, master_steps, master_modes, horizon, path);
}

std::vector<SpectralVector> coarsen_increments(const NoiseTape &tape, std::size_t steps, std::size_t n_modes) {
  if (steps < 1 || tape.master_steps() % steps != 0)
    throw std::invalid_argument("target step count must divide the master step count");
  if (n_modes < 1 || n_modes > tape.master_modes())
    throw std::invalid_argument("target mode count exceeds tape modes");
  const std::size_t ratio = tape.master_steps() / steps;
  const double scale = std::sqrt(tape.master_step());
  std::vector<SpectralVector> out(steps, SpectralVector(n_modes));
  for (std::size_t m = 0; m < steps; ++m) {
    for (std::size_t k = 1; k <= n_modes; ++k) {
      double s = 0.0;
      for (std::size_t r = 0; r < ratio; ++r)
        s += tape.normals(m * ratio + r, k).first;
      out[m][k - 1] = scale * s;
    }
  }
  return out;
}

std::vector<SpectralVector> master_increments(const NoiseTape &tape, std::size_t n_modes) {
  return coarsen_increments(tape, tape.master_steps(), n_modes);
}

std::vector<SpectralVector> coarsen_increments(const std::vector<SpectralVector> &master, std::size_t steps,
                                               std::size_t n_modes) {
  if (steps < 1 || master.empty() || master.size() % steps != 0)
    throw std::invalid_argument("target step count must divide the master step count");
  if (n_modes < 1 || n_modes > master.front().size())
    throw std::invalid_argument("target mode count exceeds tape modes");
  const std::size_t ratio = master.size() / steps;
  std::vector<SpectralVector> out(steps, SpectralVector(n_modes));
  for (std::size_t m = 0; m < steps; ++m)
    for (std::size_t r = 0; r < ratio; ++r) {
      const SpectralVector &fine = master[m * ratio + r];
      for (std::size_t i = 0; i < n_modes; ++i)
        out[m][i] += fine[i];
    }
  return out;
}

OUState ou_step(const OUState &state, const SpectralVector &dW, double h, const OperatorSpectrum &spec) {
  if (dW.size() != state.coeffs.size())
    throw std::invalid_argument("increment dimension does not match OU state");
  if (!(h >= 0.0))
    throw std::invalid_argument("step size must be nonnegative");
  OUState next{state.t + h, state.coeffs};
  next.coeffs += dW;
  next.coeffs = apply_semigroup(next.coeffs, h, spec);
  return next;
}

OUPropagator::OUPropagator(std::size_t n_modes, double h, const OperatorSpectrum &spec) : h_(h), decay_(n_modes) {
  for (std::size_t k = 1; k <= n_modes; ++k)
    decay_[k - 1] = std::exp(-spec.eigenvalue(k) * h);
}

void OUPropagator::step(SpectralVector &coeffs, const SpectralVector &dW) const {
  if (coeffs.size() != decay_.size() || dW.size() != decay_.size())
    throw std::invalid_argument("OU propagator dimension mismatch");
  for (std::size_t i = 0; i < decay_.size(); ++i)
    coeffs[i] = decay_[i] * (coeffs[i] + dW[i]);
}

ExactOU::ExactOU(const NoiseTape &tape, std::size_t n_modes, const OperatorSpectrum &spec)
    : tape_(&tape), x_(n_modes), decay_(n_modes), dw_gain_(n_modes), z2_gain_(n_modes) {
  if (n_modes < 1 || n_modes > tape.master_modes())
    throw std::invalid_argument("exact OU mode count exceeds tape modes");
  const double h = tape.master_step();
  for (std::size_t k = 1; k <= n_modes; ++k) {
    const double mu = spec.eigenvalue(k);
    decay_[k - 1] = std::exp(-mu * h);
    // Cov(I, dW) = phi1(mu, h); I = (phi1 / h) dW + sqrt(h c(mu h)) Z2.
    dw_gain_[k - 1] = phi1_multiplier(mu, h) / std::sqrt(h);
    z2_gain_[k - 1] = std::sqrt(h * convolution_residual_variance(mu * h));
  }
}

void ExactOU::advance() {
  for (std::size_t k = 1; k <= x_.size(); ++k) {
    const auto [z1, z2] = tape_->normals(j_, k);
    x_[k - 1] = decay_[k - 1] * x_[k - 1] + dw_gain_[k - 1] * z1 + z2_gain_[k - 1] * z2;
  }
  ++j_;
}

double discrete_ou_variance(std::size_t k, std::size_t steps, double horizon, const OperatorSpectrum &spec) {
  const double h = horizon / double(steps);
  const double mu = spec.eigenvalue(k);
  double s = 0.0;
  for (std::size_t j = 0; j < steps; ++j)
    s += std::exp(-2.0 * mu * double(j + 1) * h) * h;
  return s;
}

double exact_ou_variance(std::size_t k, double t, const OperatorSpectrum &spec) {
  const double mu = spec.eigenvalue(k);
  return -std::expm1(-2.0 * mu * t) / (2.0 * mu);
}

std::vector<OUMomentRow> ou_moment_diagnostics(const std::vector<std::size_t> &steps_grid,
                                               const std::vector<std::size_t> &modes_grid,
                                               const OUMomentOptions &opts) {
  if (!(opts.p >= 2.0))
    throw std::invalid_argument("moment exponent must be >= 2");
  if (!(opts.gamma < 0.25))
    throw std::invalid_argument("H_gamma moments need gamma < 1/4");
  if (steps_grid.empty() || modes_grid.empty() || opts.paths < 1)
    throw std::invalid_argument("empty diagnostic grid");

  std::size_t master_steps = 1;
  for (std::size_t m : steps_grid)
    master_steps = std::lcm(master_steps, m);
  const std::size_t master_modes = *std::max_element(modes_grid.begin(), modes_grid.end());
  const OperatorSpectrum spec(opts.nu);
  const NoiseTape base(opts.seed, master_steps, master_modes, opts.horizon);

  const std::size_t cells = steps_grid.size() * modes_grid.size();
  std::vector<std::vector<double>> hg(cells, std::vector<double>(opts.paths));
  std::vector<std::vector<double>> sup(cells, std::vector<double>(opts.paths));

  parallel_for(opts.paths, opts.threads, [&](std::size_t path) {
    const std::vector<SpectralVector> master = master_increments(base.for_path(std::uint32_t(path)), master_modes);
    for (std::size_t a = 0; a < steps_grid.size(); ++a) {
      const std::size_t M = steps_grid[a];
      const std::vector<SpectralVector> dw = coarsen_increments(master, M, master_modes);
      for (std::size_t b = 0; b < modes_grid.size(); ++b) {
        const std::size_t N = modes_grid[b];
        const OUPropagator prop(N, opts.horizon / double(M), spec);
        const std::vector<double> weights = hr_weights(N, opts.gamma, spec);
        const std::size_t G = grid_size_for(std::max<std::size_t>(4 * N, 32));
        SpectralVector o(N);
        double sup_norm = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
          prop.step(o, dw[m].truncated(N));
          sup_norm = std::max(sup_norm, sup_norm_on_grid(to_grid(o, G)));
        }
        const std::size_t cell = a * modes_grid.size() + b;
        hg[cell][path] = std::pow(hr_norm(o, weights), opts.p);
        sup[cell][path] = std::pow(sup_norm, opts.p);
      }
    }
  });

  std::vector<OUMomentRow> rows;
  for (std::size_t a = 0; a < steps_grid.size(); ++a)
    for (std::size_t b = 0; b < modes_grid.size(); ++b) {
      const std::size_t cell = a * modes_grid.size() + b;
      const SampleSummary s1 = summarize(hg[cell]);
      const SampleSummary s2 = summarize(sup[cell]);
      rows.push_back({steps_grid[a], modes_grid[b], s1.mean, s1.stderr_of_mean, s2.mean, s2.stderr_of_mean});
    }
  return rows;
}

bool ou_moments_bounded(const std::vector<OUMomentRow> &rows) {
  if (rows.empty())
    return true;
  const auto top = std::max_element(rows.begin(), rows.end(), [](const auto &x, const auto &y) {
    return std::make_pair(x.steps, x.modes) < std::make_pair(y.steps, y.modes);
  });
  for (const auto &r : rows) {
    if (r.hgamma_moment > top->hgamma_moment + 3.0 * top->hgamma_stderr)
      return false;
    if (r.sup_moment > top->sup_moment + 3.0 * top->sup_stderr)
      return false;
  }
  return true;
}

} // namespace spde
