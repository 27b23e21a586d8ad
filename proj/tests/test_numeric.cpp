#include <doctest.h>

#include <cmath>
#include <vector>

#include "zips/numeric.hpp"
#include "zips/random.hpp"

using namespace zips;
using doctest::Approx;

// Reference values from scipy.stats / scipy.special.

TEST_CASE("normal distribution functions") {
  CHECK(numeric::normal_cdf(1.2345) == Approx(0.8914916766373298).epsilon(1e-13));
  CHECK(numeric::normal_sf(5.5) == Approx(1.898956246588768e-08).epsilon(1e-10));
  CHECK(numeric::normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK(numeric::normal_quantile(1e-10) == Approx(-6.361340902404056).epsilon(1e-11));
  for (double x : {-7.0, -2.5, -0.3, 0.0, 0.8, 3.1}) {
    CHECK(numeric::normal_quantile(numeric::normal_cdf(x)) == Approx(x).epsilon(1e-10));
    CHECK(numeric::normal_cdf(x) + numeric::normal_sf(x) == Approx(1.0).epsilon(1e-15));
  }
  CHECK(numeric::normal_pdf(0.0) == Approx(0.3989422804014327));
}

TEST_CASE("chi-square(1) survival") {
  CHECK(numeric::chi2_1_sf(3.84) == Approx(0.05004352124870519).epsilon(1e-12));
  CHECK(numeric::chi2_1_sf(0.04) == Approx(0.841480581121794).epsilon(1e-12));
  CHECK(numeric::chi2_1_sf(0.0) == Approx(1.0));
}

TEST_CASE("incomplete beta and its inverse") {
  CHECK(numeric::beta_inc(2.5, 3.5, 0.3) == Approx(0.29675298929566646).epsilon(1e-12));
  CHECK(numeric::beta_inc(81.5, 17.5, 0.8) == Approx(0.2605258354571151).epsilon(1e-11));
  CHECK(numeric::beta_inc_inv(2.5, 3.5, 0.7) == Approx(0.5181508080687129).epsilon(1e-10));
  CHECK(numeric::beta_inc_inv(0.9, 1.2, 0.95) == Approx(0.9095045571598993).epsilon(1e-10));
  CHECK(numeric::beta_inc(1.0, 1.0, 0.37) == Approx(0.37));
  CHECK(numeric::log_beta(3.2, 4.7) == Approx(-4.702455894538334).epsilon(1e-13));
}

TEST_CASE("Kolmogorov distribution and KS test") {
  CHECK(numeric::kolmogorov_sf(1.0) == Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(numeric::kolmogorov_sf(0.5) == Approx(0.9639452436648751).epsilon(1e-12));

  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  const auto ok = numeric::ks_uniform(grid);
  CHECK(ok.distance == Approx(0.0005));
  CHECK(ok.p_value > 0.99);

  std::vector<double> skewed;
  for (int i = 0; i < 1000; ++i) skewed.push_back(std::pow((i + 0.5) / 1000.0, 2.0));
  CHECK(numeric::ks_uniform(skewed).p_value < 1e-6);
}

TEST_CASE("quantiles and log-sum-exp") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(numeric::quantile_sorted(v, 0.0) == 1.0);
  CHECK(numeric::quantile_sorted(v, 1.0) == 4.0);
  CHECK(numeric::quantile_sorted(v, 0.5) == Approx(2.5));
  CHECK(numeric::quantile_sorted(v, 0.25) == Approx(1.75));
  const std::vector<double> big = {1000.0, 1000.0};
  CHECK(numeric::log_sum_exp(big) == Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("adaptive quadrature") {
  auto r = numeric::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  CHECK(r.converged);
  CHECK(r.value == Approx(std::sqrt(numeric::kPi)).epsilon(1e-12));
  // Integrable endpoint singularity.
  auto s = numeric::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-10);
  CHECK(s.value == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("root finding and maximization") {
  CHECK(numeric::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(numeric::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), NumericalFailure);
  CHECK(numeric::golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, -1.0, 2.0) ==
        Approx(0.3).epsilon(1e-8));
}

TEST_CASE("seed derivation and variates are reproducible") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  auto a = make_rng(42);
  auto b = make_rng(42);
  for (int i = 0; i < 10; ++i) CHECK(beta_variate(a, 2.0, 3.0) == beta_variate(b, 2.0, 3.0));

  // Beta(2, 3) mean 0.4, variance 0.04.
  auto rng = make_rng(7);
  double sum = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = beta_variate(rng, 2.0, 3.0);
    sum += x;
    ss += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == Approx(0.4).epsilon(0.01));
  CHECK(ss / n - mean * mean == Approx(0.04).epsilon(0.02));
}

TEST_CASE("upper incomplete gamma and chi-square survival") {
  CHECK(numeric::gamma_q(2.5, 1.3) == Approx(0.761365267845014).epsilon(1e-12));
  CHECK(numeric::gamma_q(10.0, 25.0) == Approx(0.0002214766382487835).epsilon(1e-10));
  CHECK(numeric::chi2_sf(12.3, 7.0) == Approx(0.0911148860003131).epsilon(1e-12));
  CHECK(numeric::chi2_sf(3.84, 1.0) == Approx(numeric::chi2_1_sf(3.84)).epsilon(1e-12));
}
