#ifndef ZIPS_FREQUENTIST_HPP
#define ZIPS_FREQUENTIST_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zips/common.hpp"
#include "zips/count_sample.hpp"

namespace zips {

/// Where a full-model MLE sits when it is not an interior point.
enum class MleBoundary {
  None,
  NoZeros,      ///< n0 = 0: p* -> 0, p_hat at p_lower(theta_hat)
  ThetaAtZero,  ///< every positive count is 1: supremum approached as theta -> 0
};

struct MleResult {
  double p_hat = 0.0;
  double theta_hat = 0.0;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  MleBoundary boundary = MleBoundary::None;
};

/// MLE under p = 0. Throws DegenerateSample when the sample has no positive counts.
MleResult mle_null(Family family, const CountSample& sample);

/// Full-model MLE over the extended space. Poisson uses damped fixed-point
/// iteration; geometric has a closed form through the p* factorization.
MleResult mle_full(Family family, const CountSample& sample, double tol = 1e-10, int max_iter = 10000);

enum class Method { Score, LR, Bayes };
enum class Sidedness { OneSided, TwoSided };

std::string_view to_string(Method method);
std::string_view to_string(Sidedness sidedness);

struct TestReport {
  Method method = Method::Score;
  double statistic = 0.0;
  double signed_root = 0.0;
  std::optional<double> p_value;
  std::optional<double> posterior_prob;
  double alpha = 0.05;
  bool reject = false;
  Sidedness sidedness = Sidedness::OneSided;
  std::vector<std::string> notes;
};

/// Upper-alpha point of N(0, 1).
double upper_normal_point(double alpha);

/// Closed-form score statistic T_s for H0: p = 0. Depends on (n, n0, S) only.
double score_statistic(Family family, const CountSample& sample);

TestReport score_test(Family family, const CountSample& sample, double alpha, Sidedness sidedness);
TestReport lr_test(Family family, const CountSample& sample, double alpha, Sidedness sidedness);

}  // namespace zips

#endif  // ZIPS_FREQUENTIST_HPP
