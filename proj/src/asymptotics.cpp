#include "zips/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "zips/distribution.hpp"
#include "zips/frequentist.hpp"
#include "zips/numeric.hpp"
#include "zips/parallel.hpp"
#include "zips/random.hpp"

namespace zips {

LoglikDerivatives loglik_derivatives(const ModelD& model, const CountSample& sample) {
  validate(model);
  const double p = model.p;
  const double t = model.theta;
  const double n0 = static_cast<double>(sample.n0());
  const double npos = static_cast<double>(sample.n_positive());
  const double s = static_cast<double>(sample.sum());
  const auto f = zero_prob_derivatives(model.family, t);
  const auto lg = log_normalizer_derivatives(model.family, t);
  const double a = p + (1.0 - p) * f[0];

  // Partial derivatives of A = p + (1 - p) f0 in (p, theta); A_pp = A_ppp = A_ppt = 0.
  const double A1[2] = {1.0 - f[0], (1.0 - p) * f[1]};
  const double A2[2][2] = {{0.0, -f[1]}, {-f[1], (1.0 - p) * f[2]}};
  auto A3 = [&](int i, int j, int k) {
    const int thetas = i + j + k;
    if (thetas <= 1) return 0.0;
    if (thetas == 2) return -f[2];
    return (1.0 - p) * f[3];
  };

  LoglikDerivatives d;
  for (int i = 0; i < 2; ++i) {
    d.gradient(i) = n0 * A1[i] / a;
    for (int j = 0; j < 2; ++j) {
      d.hessian(i, j) = n0 * (A2[i][j] / a - A1[i] * A1[j] / (a * a));
      for (int k = 0; k < 2; ++k) {
        const double dlogA = A3(i, j, k) / a -
                             (A2[i][j] * A1[k] + A2[i][k] * A1[j] + A2[j][k] * A1[i]) / (a * a) +
                             2.0 * A1[i] * A1[j] * A1[k] / (a * a * a);
        d.third[i](j, k) = n0 * dlogA;
      }
    }
  }
  const double q = 1.0 - p;
  d.gradient(0) -= npos / q;
  d.hessian(0, 0) -= npos / (q * q);
  d.third[0](0, 0) -= 2.0 * npos / (q * q * q);
  d.gradient(1) += s / t - npos * lg[1];
  d.hessian(1, 1) += -s / (t * t) - npos * lg[2];
  d.third[1](1, 1) += 2.0 * s / (t * t * t) - npos * lg[3];
  return d;
}

ExpansionInputs expansion_inputs(Family family, const CountSample& sample, const PriorSpec& prior) {
  const auto fit = mle_full(family, sample);
  if (fit.boundary != MleBoundary::None) {
    throw DegenerateSample("tail expansion needs an interior MLE; the full MLE lies on the boundary");
  }
  ExpansionInputs in;
  in.family = family;
  in.prior = prior;
  in.n = sample.n();
  in.eta_hat << fit.p_hat, fit.theta_hat;
  const ModelD model{family, fit.p_hat, fit.theta_hat};
  const auto d = loglik_derivatives(model, sample);
  in.a = d.hessian;
  in.a3 = d.third;
  in.info = -in.a / static_cast<double>(in.n);
  in.info_inv = in.info.inverse();
  const double i11 = in.info_inv(0, 0);
  if (!(i11 > 0.0)) throw NumericalFailure("observed information is not positive definite at the MLE");
  in.m = in.info_inv.col(0) / i11;
  in.K = in.info_inv - in.info_inv.col(0) * in.info_inv.col(0).transpose() / i11;
  in.prior_value = prior_density(prior, fit.p_hat, fit.theta_hat);
  in.prior_grad = prior_gradient(prior, fit.p_hat, fit.theta_hat);
  return in;
}

ExpansionTerms expansion_terms(const ExpansionInputs& in, double eta10, std::int64_t n) {
  const double nn = static_cast<double>(n);
  const double i11 = in.info_inv(0, 0);
  const double root = std::sqrt(i11);
  // Third derivatives per observation so every term is O(1).
  const double scale = 1.0 / static_cast<double>(in.n);
  double mmm = 0.0, kkm = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double aijk = in.a3_at(i, j, k) * scale;
        mmm += aijk * in.m(i) * in.m(j) * in.m(k);
        kkm += aijk * in.K(i, j) * in.m(k);
      }
  ExpansionTerms t;
  const double prior_term = in.prior_value > 0.0 ? in.prior_grad.dot(in.m) / in.prior_value : 0.0;
  t.g3 = mmm * i11 * root / 6.0;
  t.g1 = prior_term * root + 0.5 * kkm * root + 0.5 * mmm * i11 * root;
  t.w = std::sqrt(nn / i11) * (eta10 - in.eta_hat(0));
  t.leading = numeric::normal_cdf(t.w);
  const double correction = numeric::normal_pdf(t.w) * (t.g1 + t.g3 * (t.w * t.w - 1.0)) / std::sqrt(nn);
  t.value = std::clamp(t.leading - correction, 0.0, 1.0);
  return t;
}

double posterior_tail_expansion(const ExpansionInputs& inputs, double eta10, std::int64_t n) {
  return expansion_terms(inputs, eta10, n).value;
}

std::vector<double> simulate_null_t(Family family, double theta_null, std::int64_t n, std::size_t reps,
                                    std::size_t B, std::uint64_t seed, std::size_t* redraws, unsigned threads) {
  if (reps == 0) throw std::invalid_argument("replication count must be positive");
  if (n <= 0) throw std::invalid_argument("sample size must be positive");
  check_theta(family, theta_null);
  const ModelD null_model{family, 0.0, theta_null};
  const PriorSpec prior{PriorKind::ConditionalJeffreys, family};
  std::vector<double> values(reps);
  std::atomic<std::size_t> extra{0};
  parallel_for(reps, threads == 0 ? default_threads() : threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt <= 100; ++attempt) {
      const auto y = sample(null_model, n, derive_seed(seed, {r, attempt}));
      if (y.sum() == 0) {
        ++extra;
        continue;
      }
      values[r] = posterior_prob_positive(family, y, prior, B, derive_seed(seed, {r, 0x7e57})).value;
      return;
    }
    throw DegenerateSample("null simulation kept producing all-zero samples");
  });
  if (redraws) *redraws = extra.load();
  return values;
}

UniformityReport uniformity_check(Family family, double theta_null, std::int64_t n, std::size_t reps,
                                  std::size_t B, std::uint64_t seed, unsigned threads) {
  UniformityReport report;
  report.values = simulate_null_t(family, theta_null, n, reps, B, seed, &report.redraws, threads);
  const auto ks = numeric::ks_uniform(report.values);
  report.ks_distance = ks.distance;
  report.ks_pvalue = ks.p_value;
  double sum = 0.0;
  for (double v : report.values) sum += v;
  report.moment1 = sum / static_cast<double>(reps);
  double ss = 0.0;
  for (double v : report.values) ss += (v - report.moment1) * (v - report.moment1);
  report.moment2 = ss / static_cast<double>(reps);
  return report;
}

BetaCalibration beta_from_moments(double mean, double variance) {
  BetaCalibration c;
  c.mean = mean;
  c.variance = variance;
  const double spread = mean * (1.0 - mean);
  if (!(mean > 0.0 && mean < 1.0) || !(variance > 0.0) || variance >= spread) {
    c.uniform_fallback = true;
    c.alpha_hat = 1.0;
    c.beta_hat = 1.0;
    c.warnings.emplace_back("degenerate moments for a Beta fit; using the Uniform cutoff");
    return c;
  }
  const double common = spread / variance - 1.0;
  c.alpha_hat = mean * common;
  c.beta_hat = (1.0 - mean) * common;
  return c;
}

BetaCalibration beta_calibration(Family family, double theta_null, std::int64_t n, std::size_t reps, std::size_t B,
                                 std::uint64_t seed, unsigned threads) {
  if (reps < 500) throw std::invalid_argument("beta calibration needs at least 500 replications");
  const auto values = simulate_null_t(family, theta_null, n, reps, B, seed, nullptr, threads);
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(reps);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  auto c = beta_from_moments(mean, ss / static_cast<double>(reps - 1));
  c.n = n;
  c.family = family;
  c.theta_null = theta_null;
  return c;
}

double calibrated_cutoff(const BetaCalibration& calibration, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (calibration.uniform_fallback) return 1.0 - alpha;
  return numeric::beta_inc_inv(calibration.alpha_hat, calibration.beta_hat, 1.0 - alpha);
}

}  // namespace zips
