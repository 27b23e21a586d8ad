#ifndef ZIPS_ASYMPTOTICS_HPP
#define ZIPS_ASYMPTOTICS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "zips/bayes.hpp"
#include "zips/common.hpp"
#include "zips/count_sample.hpp"
#include "zips/distribution.hpp"

namespace zips {

/// Ingredients of the order n^{-1/2} posterior tail expansion for eta_1 = p.
/// `a` and `a3` hold derivatives of the total log-likelihood at the MLE;
/// per-observation quantities (info, info_inv, m, K) use I = -a / n.
struct ExpansionInputs {
  Family family = Family::Poisson;
  PriorSpec prior;
  std::int64_t n = 0;
  Vector2<double> eta_hat = Vector2<double>::Zero();
  Matrix2<double> a = Matrix2<double>::Zero();
  std::array<Matrix2<double>, 2> a3{Matrix2<double>::Zero(), Matrix2<double>::Zero()};  // a3[i](j, k)
  Matrix2<double> info = Matrix2<double>::Zero();
  Matrix2<double> info_inv = Matrix2<double>::Zero();
  Vector2<double> m = Vector2<double>::Zero();
  Matrix2<double> K = Matrix2<double>::Zero();
  Vector2<double> prior_grad = Vector2<double>::Zero();
  double prior_value = 0.0;

  double a3_at(int i, int j, int k) const { return a3[i](j, k); }
};

/// Analytic second and third derivatives of the log-likelihood in (p, theta).
struct LoglikDerivatives {
  Vector2<double> gradient;
  Matrix2<double> hessian;
  std::array<Matrix2<double>, 2> third;
};
LoglikDerivatives loglik_derivatives(const ModelD& model, const CountSample& sample);

/// Throws DegenerateSample when the full MLE sits on the boundary.
ExpansionInputs expansion_inputs(Family family, const CountSample& sample, const PriorSpec& prior);

struct ExpansionTerms {
  double w = 0.0;
  double g1 = 0.0;
  double g3 = 0.0;
  double leading = 0.0;  // Phi(w)
  double value = 0.0;
};

/// P(eta_1 <= eta10 | y) to order n^{-1/2}, clipped to [0, 1]:
///   Phi(w) - n^{-1/2} phi(w) {G1 + G3 (w^2 - 1)}.
ExpansionTerms expansion_terms(const ExpansionInputs& inputs, double eta10, std::int64_t n);
double posterior_tail_expansion(const ExpansionInputs& inputs, double eta10, std::int64_t n);

/// Simulated null T values with the usual uniformity diagnostics.
struct UniformityReport {
  double ks_distance = 0.0;
  double ks_pvalue = 0.0;
  double moment1 = 0.0;
  double moment2 = 0.0;  // central
  std::vector<double> values;
  std::size_t redraws = 0;
};

/// T(Y) = P(p > 0 | Y) over `reps` datasets simulated with p = 0.
std::vector<double> simulate_null_t(Family family, double theta_null, std::int64_t n, std::size_t reps,
                                    std::size_t B, std::uint64_t seed, std::size_t* redraws = nullptr,
                                    unsigned threads = 0);

UniformityReport uniformity_check(Family family, double theta_null, std::int64_t n, std::size_t reps,
                                  std::size_t B, std::uint64_t seed, unsigned threads = 0);

struct BetaCalibration {
  double alpha_hat = 1.0;
  double beta_hat = 1.0;
  std::int64_t n = 0;
  Family family = Family::Poisson;
  double theta_null = 0.0;
  double mean = 0.5;
  double variance = 1.0 / 12.0;
  bool uniform_fallback = false;
  std::vector<std::string> warnings;
};

/// Method-of-moments Beta fit; falls back to Uniform when v >= m (1 - m).
BetaCalibration beta_from_moments(double mean, double variance);

BetaCalibration beta_calibration(Family family, double theta_null, std::int64_t n, std::size_t reps, std::size_t B,
                                 std::uint64_t seed, unsigned threads = 0);

/// Upper-alpha point of the calibrated Beta (1 - alpha under the Uniform fallback).
double calibrated_cutoff(const BetaCalibration& calibration, double alpha);

}  // namespace zips

#endif  // ZIPS_ASYMPTOTICS_HPP
