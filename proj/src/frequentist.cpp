#include "zips/frequentist.hpp"

#include <cmath>

#include "zips/distribution.hpp"
#include "zips/numeric.hpp"

namespace zips {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Score: return "score";
    case Method::LR: return "lr";
    case Method::Bayes: return "bayes";
  }
  return "?";
}

std::string_view to_string(Sidedness sidedness) {
  return sidedness == Sidedness::OneSided ? "one-sided" : "two-sided";
}

namespace {

double sum_log_coefficients(Family family, const CountSample& sample) {
  double total = 0.0;
  for (const auto& [y, count] : sample.frequencies()) {
    if (y > 0) total += static_cast<double>(count) * log_coefficient<double>(family, y);
  }
  return total;
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Log-likelihood in (p*, theta); pstar may sit on 0 when n0 = 0 and theta may
// be 0 for the limiting fit where every positive count equals one.
double loglik_pstar(Family family, double pstar, double theta, const CountSample& sample) {
  const double n0 = static_cast<double>(sample.n0());
  const double npos = static_cast<double>(sample.n_positive());
  double ll = xlogy(n0, pstar) + xlogy(npos, 1.0 - pstar) + sum_log_coefficients(family, sample);
  if (sample.n_positive() > 0 && theta > 0.0) {
    ll += static_cast<double>(sample.sum()) * std::log(theta) -
          npos * log_normalizer_derivatives(family, theta)[0] -
          npos * std::log(nonzero_prob(family, theta));
  }
  return ll;
}

void require_positive_counts(const CountSample& sample) {
  if (sample.n() <= 0) throw DegenerateSample("empty sample");
  if (sample.sum() == 0) throw DegenerateSample("no positive counts: theta_0 hat at boundary");
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double score_direction(Family family, const CountSample& sample, double theta0) {
  const double observed = static_cast<double>(sample.n0()) / static_cast<double>(sample.n());
  return sign_of(observed - zero_prob(family, theta0));
}

void decide(TestReport& report, double alpha) {
  if (report.sidedness == Sidedness::OneSided) {
    report.p_value = numeric::normal_sf(report.signed_root);
    report.reject = report.signed_root > upper_normal_point(alpha);
  } else {
    report.p_value = numeric::chi2_1_sf(report.statistic);
    const double z = upper_normal_point(0.5 * alpha);
    report.reject = report.statistic > z * z;
    report.notes.emplace_back("two-sided reference distribution: chi-square(1)");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

double upper_normal_point(double alpha) { return numeric::normal_quantile(1.0 - alpha); }

MleResult mle_null(Family family, const CountSample& sample) {
  require_positive_counts(sample);
  const double ybar = sample.mean();
  MleResult r;
  r.p_hat = 0.0;
  r.theta_hat = family == Family::Poisson ? ybar : ybar / (1.0 + ybar);
  r.loglik = log_likelihood(ModelD{family, 0.0, r.theta_hat}, sample);
  r.converged = true;
  return r;
}

MleResult mle_full(Family family, const CountSample& sample, double tol, int max_iter) {
  if (sample.n() <= 0) throw DegenerateSample("empty sample");
  if (sample.sum() == 0) throw DegenerateSample("all observations are zero: p and theta are not identifiable");
  const double n = static_cast<double>(sample.n());
  const double n0 = static_cast<double>(sample.n0());
  const double npos = static_cast<double>(sample.n_positive());
  const double s = static_cast<double>(sample.sum());
  const double pstar = n0 / n;

  MleResult r;
  r.converged = true;
  if (sample.sum() == sample.n_positive()) {
    r.boundary = MleBoundary::ThetaAtZero;
    r.theta_hat = 0.0;
    r.p_hat = -numeric::kInf;
    r.loglik = loglik_pstar(family, pstar, 0.0, sample);
    return r;
  }

  if (family == Family::Poisson) {
    // theta = S (1 - e^-theta) / (n - n0), started at the zero-truncated mean.
    auto map = [&](double t) { return s * -std::expm1(-t) / npos; };
    double theta = s / npos;
    double previous_step = 0.0;
    bool done = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      double next = map(theta);
      double step = next - theta;
      if (previous_step * step < 0.0) {
        next = theta + 0.5 * step;
        step = next - theta;
      }
      theta = next;
      previous_step = step;
      if (std::abs(step) < tol) {
        done = true;
        ++it;
        break;
      }
    }
    if (!done) {
      // Slow contraction when S/(n - n0) is close to one; finish on the bracket.
      theta = numeric::bisect([&](double t) { return npos * t - s * -std::expm1(-t); }, 1e-300,
                              s / npos, 1e-15, 2000);
    }
    r.theta_hat = theta;
    r.iterations = it;
  } else {
    r.theta_hat = (s - npos) / s;
    r.iterations = 0;
  }
  r.p_hat = p_from_pstar(family, pstar, r.theta_hat);
  r.boundary = sample.n0() == 0 ? MleBoundary::NoZeros : MleBoundary::None;
  r.loglik = loglik_pstar(family, pstar, r.theta_hat, sample);
  return r;
}

double score_statistic(Family family, const CountSample& sample) {
  require_positive_counts(sample);
  const double n = static_cast<double>(sample.n());
  const double n0 = static_cast<double>(sample.n0());
  const double ybar = static_cast<double>(sample.sum()) / n;
  if (family == Family::Poisson) {
    const double e = std::exp(-ybar);
    const double num = n0 / e - n;
    return num * num / (n * (-std::expm1(-ybar) / e - ybar));
  }
  const double dev = n0 / n * (1.0 + ybar) - 1.0;
  return n * (1.0 + ybar) / (ybar * ybar) * dev * dev;
}

TestReport score_test(Family family, const CountSample& sample, double alpha, Sidedness sidedness) {
  check_alpha(alpha);
  const auto null_fit = mle_null(family, sample);
  TestReport report;
  report.method = Method::Score;
  report.alpha = alpha;
  report.sidedness = sidedness;
  report.statistic = score_statistic(family, sample);
  report.signed_root = score_direction(family, sample, null_fit.theta_hat) * std::sqrt(report.statistic);
  decide(report, alpha);
  return report;
}

TestReport lr_test(Family family, const CountSample& sample, double alpha, Sidedness sidedness) {
  check_alpha(alpha);
  const auto null_fit = mle_null(family, sample);
  const auto full_fit = mle_full(family, sample);
  double stat = 2.0 * (full_fit.loglik - null_fit.loglik);
  if (stat < 0.0) {
    if (stat < -1e-10 * std::max(1.0, std::abs(null_fit.loglik))) {
      throw NumericalFailure("likelihood ratio statistic is negative: full fit below null fit");
    }
    stat = 0.0;
  }
  TestReport report;
  report.method = Method::LR;
  report.alpha = alpha;
  report.sidedness = sidedness;
  report.statistic = stat;
  double direction = sign_of(full_fit.p_hat);
  if (full_fit.boundary != MleBoundary::None) {
    direction = score_direction(family, sample, null_fit.theta_hat);
    report.notes.emplace_back("full MLE on the boundary; sign taken from the score direction");
  }
  report.signed_root = direction * std::sqrt(stat);
  decide(report, alpha);
  return report;
}

}  // namespace zips
