#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zips/datasets.hpp"
#include "zips/distribution.hpp"
#include "zips/frequentist.hpp"
#include "zips/numeric.hpp"

using namespace zips;
using doctest::Approx;

namespace {
const CountSample& uti() { static const auto s = embedded_dataset("uti").sample; return s; }
const CountSample& terror() { static const auto s = embedded_dataset("terror").sample; return s; }
const CountSample& cholera() { static const auto s = embedded_dataset("cholera").sample; return s; }
}  // namespace

TEST_CASE("score statistic on the embedded datasets") {
  CHECK(score_statistic(Family::Poisson, uti()) == Approx(15.340495986442455).epsilon(1e-10));
  CHECK(score_statistic(Family::Poisson, terror()) == Approx(0.044663078609214146).epsilon(1e-10));
  CHECK(score_statistic(Family::Poisson, cholera()) == Approx(30.55798148652464).epsilon(1e-10));

  const auto one = score_test(Family::Poisson, uti(), 0.05, Sidedness::OneSided);
  CHECK(*one.p_value == Approx(4.488569194135454e-05).epsilon(1e-8));
  CHECK(one.reject);
  const auto two = score_test(Family::Poisson, terror(), 0.05, Sidedness::TwoSided);
  CHECK(*two.p_value == Approx(0.832624772629305).epsilon(1e-8));
  CHECK_FALSE(two.reject);
  const auto t = score_test(Family::Poisson, terror(), 0.05, Sidedness::OneSided);
  CHECK(t.signed_root == Approx(0.21133641098782327).epsilon(1e-10));
  CHECK(*t.p_value == Approx(0.4163123863146525).epsilon(1e-8));
}

TEST_CASE("geometric score statistic") {
  const CountSample g({{0, 30}, {1, 10}, {2, 6}, {3, 3}, {4, 1}});
  CHECK(score_statistic(Family::Geometric, g) == Approx(17.0 / 245.0).epsilon(1e-10));
}

TEST_CASE("maximum likelihood estimates") {
  SUBCASE("Poisson interior fits against scipy") {
    const auto u = mle_full(Family::Poisson, uti());
    CHECK(u.converged);
    CHECK(u.boundary == MleBoundary::None);
    CHECK(u.p_hat == Approx(0.71155316).epsilon(1e-6));
    CHECK(u.theta_hat == Approx(0.91977477).epsilon(1e-6));
    CHECK(u.loglik == Approx(-61.021388992364756).epsilon(1e-10));
    CHECK(mle_null(Family::Poisson, uti()).loglik == Approx(-67.142434190024).epsilon(1e-10));
    CHECK(mle_null(Family::Poisson, uti()).theta_hat == Approx(uti().mean()));

    const auto t = mle_full(Family::Poisson, terror());
    CHECK(t.p_hat == Approx(0.04257314).epsilon(1e-5));
    CHECK(t.theta_hat == Approx(0.72416324).epsilon(1e-6));
    const auto c = mle_full(Family::Poisson, cholera());
    CHECK(c.p_hat == Approx(0.60331309).epsilon(1e-6));
    CHECK(c.theta_hat == Approx(0.97217784).epsilon(1e-6));
  }
  SUBCASE("negative p estimate when zeros are deflated") {
    const CountSample s({{0, 5}, {1, 20}, {2, 15}, {3, 8}, {4, 2}});
    const auto fit = mle_full(Family::Poisson, s);
    CHECK(fit.p_hat < 0.0);
    CHECK(fit.p_hat > p_lower(Family::Poisson, fit.theta_hat));
    // The zero mass is fitted exactly at an interior MLE.
    CHECK(zero_mass(ModelD{Family::Poisson, fit.p_hat, fit.theta_hat}) == Approx(5.0 / 50.0).epsilon(1e-8));
  }
  SUBCASE("geometric closed form") {
    const CountSample s({{0, 50}, {1, 25}, {2, 25}});
    const auto fit = mle_full(Family::Geometric, s);
    CHECK(fit.p_hat == Approx(-0.5).epsilon(1e-10));
    CHECK(fit.theta_hat == Approx(1.0 / 3.0).epsilon(1e-10));
  }
  SUBCASE("boundaries") {
    const CountSample no_zeros({{1, 4}, {2, 3}, {5, 1}});
    const auto nz = mle_full(Family::Poisson, no_zeros);
    CHECK(nz.boundary == MleBoundary::NoZeros);
    CHECK(nz.p_hat == Approx(p_lower(Family::Poisson, nz.theta_hat)));

    const CountSample ones({{0, 12}, {1, 6}});
    CHECK(mle_full(Family::Poisson, ones).boundary == MleBoundary::ThetaAtZero);
    const auto lr = lr_test(Family::Poisson, ones, 0.05, Sidedness::OneSided);
    CHECK(std::isfinite(lr.statistic));
    CHECK(lr.statistic >= 0.0);

    const CountSample zeros(CountSample::FrequencyTable{{0, 10}});
    CHECK_THROWS_AS(mle_null(Family::Poisson, zeros), DegenerateSample);
    CHECK_THROWS_AS(mle_full(Family::Poisson, zeros), DegenerateSample);
    CHECK_THROWS_AS(score_test(Family::Poisson, zeros, 0.05, Sidedness::OneSided), DegenerateSample);
    CHECK_THROWS_AS(lr_test(Family::Geometric, zeros, 0.05, Sidedness::TwoSided), DegenerateSample);
  }
}

TEST_CASE("likelihood ratio statistic") {
  CHECK(lr_test(Family::Poisson, uti(), 0.05, Sidedness::OneSided).statistic ==
        Approx(12.242090395318499).epsilon(1e-8));
  CHECK(lr_test(Family::Poisson, terror(), 0.05, Sidedness::OneSided).statistic ==
        Approx(0.044550280547213106).epsilon(1e-6));
  CHECK(lr_test(Family::Poisson, cholera(), 0.05, Sidedness::OneSided).statistic ==
        Approx(27.22831148760764).epsilon(1e-8));
  const auto two = lr_test(Family::Poisson, uti(), 0.05, Sidedness::TwoSided);
  CHECK(*two.p_value == Approx(numeric::chi2_1_sf(two.statistic)));
}

TEST_CASE("signed roots square to the statistic and share the score sign") {
  const std::vector<CountSample> samples = {
      uti(), terror(), cholera(), CountSample({{0, 5}, {1, 20}, {2, 15}, {3, 8}, {4, 2}}),
      CountSample({{0, 30}, {1, 10}, {2, 6}, {3, 3}, {4, 1}})};
  for (const auto& s : samples) {
    for (const Family f : {Family::Poisson, Family::Geometric}) {
      const auto sc = score_test(f, s, 0.05, Sidedness::OneSided);
      const auto lr = lr_test(f, s, 0.05, Sidedness::OneSided);
      CHECK(sc.signed_root * sc.signed_root == Approx(sc.statistic).epsilon(1e-12));
      CHECK(lr.signed_root * lr.signed_root == Approx(lr.statistic).epsilon(1e-12));
      if (std::abs(sc.signed_root) > 1e-3) CHECK((sc.signed_root > 0) == (lr.signed_root > 0));
    }
  }
  // Zero deflation gives negative roots.
  CHECK(score_test(Family::Poisson, samples[3], 0.05, Sidedness::OneSided).signed_root < 0.0);
}

TEST_CASE("score statistic depends only on (n, n0, S)") {
  const CountSample a({{0, 20}, {1, 10}, {3, 5}});
  const CountSample a2({{0, 20}, {1, 9}, {2, 3}, {3, 2}, {4, 1}});
  const CountSample b({{0, 20}, {1, 9}, {2, 3}, {3, 2}, {5, 1}});
  REQUIRE(a2.sum() == a.sum());
  REQUIRE(a2.n() == a.n());
  for (const Family f : {Family::Poisson, Family::Geometric}) {
    CHECK(score_statistic(f, a) == Approx(score_statistic(f, a2)).epsilon(1e-14));
    CHECK(score_statistic(f, a) != Approx(score_statistic(f, b)));
  }
}

TEST_CASE("one-sided statistics increase with the zero count") {
  // Replace positive ones with zeros, keeping n fixed; S drops by one each step.
  for (const Family f : {Family::Poisson, Family::Geometric}) {
    double prev_score = -1e300, prev_lr = -1e300;
    for (int k = 0; k <= 10; ++k) {
      const CountSample s({{0, 20 + k}, {1, 20 - k}, {2, 10}, {3, 5}});
      const double sc = score_test(f, s, 0.05, Sidedness::OneSided).signed_root;
      const double lr = lr_test(f, s, 0.05, Sidedness::OneSided).signed_root;
      CHECK(sc > prev_score);
      CHECK(lr > prev_lr - 1e-9);
      prev_score = sc;
      prev_lr = lr;
    }
  }
}

TEST_CASE("signed score root is close to standard normal under the null") {
  const int reps = 4000;
  std::vector<double> roots;
  roots.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto s = sample(ModelD{Family::Poisson, 0.0, 2.0}, 200, 7000 + r);
    roots.push_back(numeric::normal_cdf(score_test(Family::Poisson, s, 0.05, Sidedness::OneSided).signed_root));
  }
  CHECK(numeric::ks_uniform(roots).distance < 0.025);
}

TEST_CASE("decision rules and validation") {
  CHECK(upper_normal_point(0.05) == Approx(1.6448536269514722).epsilon(1e-10));
  const auto u = lr_test(Family::Poisson, uti(), 0.05, Sidedness::OneSided);
  CHECK(u.reject);
  CHECK(u.method == Method::LR);
  CHECK_THROWS_AS(score_test(Family::Poisson, uti(), 0.0, Sidedness::OneSided), std::invalid_argument);
  CHECK_THROWS_AS(score_test(Family::Poisson, uti(), 1.0, Sidedness::OneSided), std::invalid_argument);
}
