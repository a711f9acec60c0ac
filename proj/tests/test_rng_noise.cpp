#include "spde/noise.hpp"
#include "spde/rng.hpp"
#include "spde/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace spde;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using rng::Counter;
  CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(rng::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(rng::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms and normals") {
  CHECK(rng::to_open_unit(0, 0) > 0.0);
  CHECK(rng::to_open_unit(0xffffffff, 0xffffffff) < 1.0);
  CHECK(rng::to_open_unit(0x80000000, 0) == 0.5 + 0x1.0p-53);

  std::vector<double> z1, z2, prod;
  for (std::uint32_t i = 0; i < 100000; ++i) {
    const auto [a, b] = rng::normal_pair(42, i, 7, 3);
    z1.push_back(a);
    z2.push_back(b);
    prod.push_back(a * b);
  }
  const SampleSummary s1 = summarize(z1), s2 = summarize(z2), sp = summarize(prod);
  CHECK(std::abs(s1.mean) < 4.0 * s1.stderr_of_mean);
  CHECK(std::abs(s2.mean) < 4.0 * s2.stderr_of_mean);
  CHECK(std::abs(sp.mean) < 4.0 * sp.stderr_of_mean);
  CHECK(s1.variance == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s2.variance == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rng::normal_pair(42, 1, 2, 3) == rng::normal_pair(42, 1, 2, 3));
  CHECK(rng::normal_pair(42, 1, 2, 3) != rng::normal_pair(43, 1, 2, 3));
}

TEST_CASE("tape header round trip") {
  const TapeHeader h{123456789ull, 4096, 256, 0.75};
  std::stringstream buf;
  write_tape_header(buf, h);
  CHECK(buf.str().size() == 8 + 4 + 8 + 8 + 8 + 8);
  CHECK(buf.str().substr(0, 8) == "SPDETAPE");
  CHECK(read_tape_header(buf) == h);

  std::stringstream bad("NOTATAPE");
  CHECK_THROWS(read_tape_header(bad));
}

TEST_CASE("tape increments are N(0, h) and deterministic") {
  const NoiseTape tape = generate_tape(9, 512, 32, 2.0);
  const double h = tape.master_step();
  CHECK(h == doctest::Approx(2.0 / 512));
  std::vector<double> x;
  for (std::size_t j = 0; j < 512; ++j)
    for (std::size_t k = 1; k <= 32; ++k)
      x.push_back(tape.increment(j, k));
  const SampleSummary s = summarize(x);
  CHECK(std::abs(s.mean) < 4.0 * s.stderr_of_mean);
  CHECK(s.variance == doctest::Approx(h).epsilon(0.03));

  CHECK(tape.increment(10, 3) == generate_tape(9, 512, 32, 2.0).increment(10, 3));
  CHECK(tape.increment(10, 3) != tape.for_path(1).increment(10, 3));
  CHECK(tape.increment(10, 3) == std::sqrt(h) * tape.normals(10, 3).first);
  CHECK_THROWS(tape.increment(512, 1));
  CHECK_THROWS(tape.increment(0, 33));
}

TEST_CASE("coarsening sums master increments") {
  const NoiseTape tape(4, 64, 8, 1.0);
  const auto coarse = coarsen_increments(tape, 8, 5);
  REQUIRE(coarse.size() == 8);
  REQUIRE(coarse[0].size() == 5);
  for (std::size_t m = 0; m < 8; ++m)
    for (std::size_t k = 1; k <= 5; ++k) {
      double s = 0.0;
      for (std::size_t j = 8 * m; j < 8 * m + 8; ++j)
        s += tape.increment(j, k);
      CHECK(coarse[m][k - 1] == doctest::Approx(s).epsilon(1e-14));
    }
  const auto master = master_increments(tape, 8);
  const auto again = coarsen_increments(master, 8, 5);
  for (std::size_t m = 0; m < 8; ++m)
    CHECK(again[m] == coarse[m]);
  CHECK_THROWS_AS(coarsen_increments(tape, 7, 5), std::invalid_argument);
  CHECK_THROWS_AS(coarsen_increments(tape, 8, 9), std::invalid_argument);
}

TEST_CASE("OU step and variances") {
  const OperatorSpectrum spec(1.0);
  const OUState s0{0.0, SpectralVector{1.0, 2.0}};
  const OUState s1 = ou_step(s0, SpectralVector{0.5, -1.0}, 0.1, spec);
  CHECK(s1.t == doctest::Approx(0.1));
  CHECK(s1.coeffs[0] == doctest::Approx(std::exp(-spec.eigenvalue(1) * 0.1) * 1.5));
  CHECK(s1.coeffs[1] == doctest::Approx(std::exp(-spec.eigenvalue(2) * 0.1) * 1.0));

  // discrete variance: sum_j h e^{-2 mu (j+1) h}
  const double mu = spec.eigenvalue(1), h = 0.125;
  double v = 0.0;
  for (int j = 0; j < 8; ++j)
    v += h * std::exp(-2.0 * mu * (j + 1) * h);
  CHECK(discrete_ou_variance(1, 8, 1.0, spec) == doctest::Approx(v).epsilon(1e-14));
  CHECK(exact_ou_variance(2, 1.0, spec) ==
        doctest::Approx((1.0 - std::exp(-2.0 * spec.eigenvalue(2))) / (2.0 * spec.eigenvalue(2))));
}

TEST_CASE("Monte Carlo OU variances match closed forms") {
  const OperatorSpectrum spec(1.0);
  const std::size_t paths = 4000, M = 16, n = 4;
  const NoiseTape base(21, M, n, 1.0);
  std::vector<std::vector<double>> disc(n), exact(n);
  const OUPropagator prop(n, 1.0 / M, spec);
  for (std::size_t p = 0; p < paths; ++p) {
    const NoiseTape tape = base.for_path(std::uint32_t(p));
    const auto dw = coarsen_increments(tape, M, n);
    SpectralVector o(n);
    for (const auto &d : dw)
      prop.step(o, d);
    ExactOU x(tape, n, spec);
    for (std::size_t j = 0; j < M; ++j)
      x.advance();
    CHECK(x.step_index() == M);
    for (std::size_t k = 0; k < n; ++k) {
      disc[k].push_back(o[k] * o[k]);
      exact[k].push_back(x.coeffs()[k] * x.coeffs()[k]);
    }
  }
  for (std::size_t k = 1; k <= n; ++k) {
    const SampleSummary d = summarize(disc[k - 1]), e = summarize(exact[k - 1]);
    CHECK(std::abs(d.mean - discrete_ou_variance(k, M, 1.0, spec)) < 4.0 * d.stderr_of_mean);
    CHECK(std::abs(e.mean - exact_ou_variance(k, 1.0, spec)) < 4.0 * e.stderr_of_mean);
  }
}

TEST_CASE("OU moment diagnostics") {
  OUMomentOptions opt;
  opt.paths = 400;
  opt.seed = 8;
  const auto rows = ou_moment_diagnostics({4, 8}, {2, 8}, opt);
  REQUIRE(rows.size() == 4);
  const OperatorSpectrum spec(1.0);
  for (const auto &r : rows) {
    double expected = 0.0;
    for (std::size_t k = 1; k <= r.modes; ++k)
      expected += discrete_ou_variance(k, r.steps, 1.0, spec);
    CHECK(std::abs(r.hgamma_moment - expected) < 4.0 * r.hgamma_stderr);
    CHECK(r.sup_moment >= r.hgamma_moment); // grid sup dominates the L2 norm pathwise
  }
  CHECK(ou_moments_bounded(rows));
  OUMomentOptions threaded = opt;
  threaded.threads = 3;
  const auto rows3 = ou_moment_diagnostics({4, 8}, {2, 8}, threaded);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows3[i].hgamma_moment == rows[i].hgamma_moment);
  CHECK_THROWS_AS(ou_moment_diagnostics({4}, {2}, OUMomentOptions{1.0, 1.0, 1.0}), std::invalid_argument);
}
