#include "spde/linear_errors.hpp"
#include "spde/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace spde;

namespace {

// E|<e_k, P_N O_T - O^{M,N}_T>|^2 = int_0^T (e^{-mu (T-s)} - e^{-mu (T - floor(s))})^2 ds,
// integrated step by step with adaptive Gauss-Kronrod.
double temporal_mode_quadrature(std::size_t k, std::size_t M, double T, double nu) {
  const double mu = nu * kPi * kPi * double(k) * double(k), h = T / double(M);
  double total = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double left = double(j) * h;
    auto f = [&](double s) {
      const double d = std::exp(-mu * (T - s)) - std::exp(-mu * (T - left));
      return d * d;
    };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, left, left + h, 15, 1e-14);
  }
  return total;
}

} // namespace

TEST_CASE("spatial error of the full norm at large T is 1/12") {
  // sum_k 1 / (2 pi^2 k^2) = 1/12.
  const double e = spatial_error_exact(0, 50.0, 1.0);
  CHECK(e * e == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("spatial error against a long direct sum") {
  for (std::size_t N : {1u, 10u, 100u}) {
    const double T = 0.3, nu = 0.8;
    long double s = 0.0L;
    const std::size_t K = 2000000;
    for (std::size_t k = K; k > N; --k) {
      const long double mu = (long double)nu * kPi * kPi * (long double)k * (long double)k;
      s += -std::expm1(-2.0L * mu * T) / (2.0L * mu);
    }
    // Euler-Maclaurin tail of sum_{k>K} 1/(2 nu pi^2 k^2).
    const long double Kd = K;
    s += (1.0L / Kd - 1.0L / (2.0L * Kd * Kd) + 1.0L / (6.0L * Kd * Kd * Kd)) / (2.0L * nu * kPi * kPi);
    CHECK(spatial_error_exact(N, T, nu) == doctest::Approx(double(std::sqrt(s))).epsilon(1e-12));
  }
}

TEST_CASE("temporal mode integrals match quadrature") {
  for (std::size_t M = 1; M <= 16; M += 3)
    for (std::size_t k = 1; k <= 16; k += 3) {
      const double q = temporal_mode_quadrature(k, M, 1.0, 1.0);
      CHECK(std::abs(temporal_mode_integral(k, M, 1.0, 1.0) - q) <= 1e-10 * q);
    }
  // Around the series switch mu h = 0.1 on both sides.
  for (double x : {0.0999, 0.1001, 0.02, 0.5}) {
    const double nu = x * 64.0 / (kPi * kPi);
    const double q = temporal_mode_quadrature(1, 64, 1.0, nu);
    CHECK(std::abs(temporal_mode_integral(1, 64, 1.0, nu) - q) <= 1e-10 * q);
  }
}

TEST_CASE("temporal error with all modes") {
  const double all = temporal_error_exact(16, ModeCount::all(), 1.0, 1.0);
  const double finite = temporal_error_exact(16, 4000, 1.0, 1.0);
  // For these modes mu h is huge and each integral is 1/(2 mu_k) to double precision.
  double tail = 0.0;
  for (std::size_t k = 4000000; k > 4000; --k)
    tail += 1.0 / (2.0 * kPi * kPi * double(k) * double(k));
  tail += 1.0 / (2.0 * kPi * kPi * 4000000.0);
  CHECK(all * all == doctest::Approx(finite * finite + tail).epsilon(1e-11));
  CHECK(all > finite);
}

TEST_CASE("full error combines the orthogonal parts") {
  const double t = temporal_error_exact(8, 5, 1.0, 1.0), s = spatial_error_exact(5, 1.0, 1.0);
  CHECK(full_error_exact(8, 5, 1.0, 1.0) == doctest::Approx(std::hypot(t, s)).epsilon(1e-15));
  CHECK(full_error_exact(8, ModeCount::all(), 1.0, 1.0) == temporal_error_exact(8, ModeCount::all(), 1.0, 1.0));
}

TEST_CASE("bound spot values") {
  // sqrt(1/2 (1/pi + 1/pi^2 + 4 pi)) at M = 1.
  CHECK(bound_upper_temporal(1, 1.0, 1.0) == doctest::Approx(2.5481367).epsilon(1e-7));
  CHECK(bounds_full(1, 1, 1.0, 1.0).lower == doctest::Approx(0.0632689).epsilon(1e-6));
  CHECK(bound_lower_spatial(1, 1.0, 1.0) == doctest::Approx(std::sqrt(1.0 - std::exp(-1.0)) / (2.0 * kPi)));
  CHECK(bound_upper_spatial(4, 1.0, 1.0) == doctest::Approx(1.0 / (kPi * std::sqrt(2.0)) / 2.0));
  CHECK(bound_upper_temporal(16, 1.0, 1.0) == doctest::Approx(bound_upper_temporal(1, 1.0, 1.0) / 2.0));
  CHECK_THROWS_AS(bound_upper_temporal(0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sandwiches hold on a parameter grid") {
  for (double T : {0.5, 1.0, 2.0})
    for (double nu : {0.5, 1.0, 2.0}) {
      const auto rows = heat_error_reports({1, 2, 4, 8, 16, 32, 64}, {1, 2, 4, 8, 16, 32, 64, ModeCount::all()}, T, nu);
      CHECK(rows.size() == 7 * (7 * 3 + 1));
      for (const auto &r : rows) {
        INFO(to_string(r.kind) << " M=" << r.steps << " N=" << r.modes.to_string() << " T=" << T << " nu=" << nu);
        CHECK(r.sandwiched(1e-12));
      }
    }
}

TEST_CASE("HS norm bracket and monotonicity") {
  for (std::size_t n : {1u, 5u, 40u})
    for (double t : {0.01, 0.3, 1.0}) {
      const HsNormBracket b = hs_norm_bracket(n, t, 1.0, 1.0);
      CHECK(b.lower <= b.value);
      CHECK(b.value <= b.upper);
    }
  const HsNormBracket all = hs_norm_bracket(ModeCount::all(), 0.2, 1.0, 1.0);
  CHECK(all.value >= hs_norm_bracket(200, 0.2, 1.0, 1.0).value);
  CHECK(hs_monotone_in_semigroup_time(10, 0.1, 0.2, 0.05, 1.0));
  CHECK(hs_monotone_in_increment_time(10, 0.1, 0.05, 0.2, 1.0));
  CHECK_THROWS_AS(hs_monotone_in_semigroup_time(10, 0.3, 0.2, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hs_norm_bracket(3, 2.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupled OU distance") {
  const SpectralVector xi{0.5, 0.25, 0.1, 0.05};
  const auto same = coupled_ou_distance(8, 4, 8, 4, 1.0, 1.0, xi);
  for (double d : same)
    CHECK(d == 0.0);

  // One coarse step against one fine half-step pair, single mode, by hand.
  const double mu = kPi * kPi, hf = 0.5;
  const double fine0 = std::exp(-2.0 * mu * hf), fine1 = std::exp(-mu * hf);
  const double coarse = std::exp(-2.0 * mu * hf);
  const double expected = hf * (fine0 - coarse) * (fine0 - coarse) + hf * (fine1 - coarse) * (fine1 - coarse);
  const auto d = coupled_ou_distance(1, 1, 2, 1, 1.0, 1.0);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == 0.0);
  CHECK(d[1] * d[1] == doctest::Approx(expected).epsilon(1e-14));

  // With M = M_ref only the extra reference modes remain.
  const auto spatial = coupled_ou_distance(4, 1, 4, 2, 1.0, 1.0, xi);
  const double mu2 = 4.0 * kPi * kPi;
  double v = std::exp(-2.0 * mu2) * 0.25 * 0.25;
  for (int i = 0; i < 4; ++i)
    v += 0.25 * std::exp(-2.0 * mu2 * (4 - i) * 0.25);
  CHECK(spatial[4] * spatial[4] == doctest::Approx(v).epsilon(1e-14));
  CHECK_THROWS_AS(coupled_ou_distance(3, 1, 4, 2, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("rate fitting") {
  std::vector<std::pair<double, double>> pts;
  for (double m : {4.0, 8.0, 16.0, 32.0})
    pts.emplace_back(m, 3.0 * std::pow(m, -0.25));
  const RateFit f = fit_rate(pts);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(f.residual < 1e-13);
  CHECK(f.points == 4);
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 0}, {3, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{2, 1}, {2, 2}, {2, 3}}), std::invalid_argument);
}

TEST_CASE("exact temporal slope is close to -1/4") {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t M = 4; M <= 4096; M *= 2)
    pts.emplace_back(double(M), temporal_error_exact(M, 2048, 1.0, 1.0));
  const RateFit f = fit_rate(pts);
  CHECK(f.slope >= -0.30);
  CHECK(f.slope <= -0.20);
}

TEST_CASE("error report CSV and mode counts") {
  CHECK(ModeCount(5).to_string() == "5");
  CHECK(ModeCount::all().to_string() == "all");
  CHECK(ModeCount::all().is_all());
  std::ostringstream os;
  write_error_reports_csv(os, heat_error_reports({2}, {ModeCount::all()}, 1.0, 1.0));
  std::istringstream in(os.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "M,N,exact,lower,upper,kind");
  CHECK(row.rfind("2,all,", 0) == 0);
  CHECK(row.substr(row.size() - 9) == ",temporal");
  CHECK_FALSE(std::getline(in, extra));
}
