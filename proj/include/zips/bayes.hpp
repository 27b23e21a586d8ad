#ifndef ZIPS_BAYES_HPP
#define ZIPS_BAYES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zips/common.hpp"
#include "zips/count_sample.hpp"
#include "zips/frequentist.hpp"
#include "zips/numeric.hpp"

namespace zips {

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

enum class PriorKind {
  JeffreysJoint,        ///< sqrt(det I(p, theta))
  ConditionalJeffreys,  ///< pi(p | theta) from I_11, times the Jeffreys prior of the base family
};

std::string_view to_string(PriorKind kind);
PriorKind prior_kind_from_string(std::string_view name);

struct PriorSpec {
  PriorKind kind = PriorKind::ConditionalJeffreys;
  Family family = Family::Poisson;
};

/// Every supported prior factors as
///   log pi(p, theta) = a_exponent log p* + q_exponent log(1 - p) + theta_part(theta),
/// with p* = p + (1 - p) f(0|theta). Both priors are improper in theta.
struct PriorDecomposition {
  double a_exponent;
  double q_exponent;
  PriorSpec spec;
  double theta_part(double theta) const;
  double theta_part_derivative(double theta) const;
};

PriorDecomposition decompose(const PriorSpec& spec);

/// Unnormalized prior density at (p, theta); throws ParameterOutOfRange outside the extended space.
double prior_density(const PriorSpec& spec, double p, double theta);
double log_prior_density(const PriorSpec& spec, double p, double theta);
/// Gradient of pi(p, theta) (not of its log).
Vector2<double> prior_gradient(const PriorSpec& spec, double p, double theta);

/// Proper conditional Jeffreys density pi(p | theta) over (p_lower(theta), 1).
double conditional_prior_p(Family family, double p, double theta);

// ---------------------------------------------------------------------------
// Posterior in (p, theta)
// ---------------------------------------------------------------------------

/// Unnormalized joint posterior L(p, theta) pi(p, theta) for one sample, with
/// the theta-only terms split out so that per-draw work is a single log/exp.
class PosteriorKernel {
 public:
  PosteriorKernel(const PriorSpec& prior, const CountSample& sample);

  const PriorSpec& prior() const { return prior_; }
  Family family() const { return prior_.family; }
  std::int64_t n() const { return n_; }
  std::int64_t n0() const { return n0_; }
  std::int64_t n_positive() const { return n_ - n0_; }
  std::int64_t sum() const { return sum_; }

  /// log L + log pi in (p, theta), without the constant sum of log a_y; -inf outside the space.
  double log_joint(double p, double theta) const;
  /// theta-only part of log_joint.
  double log_theta_term(double theta) const;
  /// Exponents of p* and (1 - p) in log_joint.
  double pstar_exponent() const { return static_cast<double>(n0_) + decomposition_.a_exponent; }
  double q_exponent() const { return static_cast<double>(n_ - n0_) + decomposition_.q_exponent; }

  /// Beta(alpha, beta) posterior of p* (the posterior factorizes in (p*, theta)).
  std::pair<double, double> pstar_posterior() const;
  /// Unnormalized log posterior density of theta, marginal over p*.
  double log_theta_posterior(double theta) const;
  /// Approximate posterior mode of theta.
  double theta_mode() const;
  /// Finite theta range outside which log_theta_posterior is below its maximum minus `drop`.
  std::pair<double, double> theta_bracket(double drop) const;

 private:
  PriorSpec prior_;
  PriorDecomposition decomposition_;
  std::int64_t n_, n0_, sum_;
  double theta_mode_ = 0.0;
};

// ---------------------------------------------------------------------------
// Posterior draws
// ---------------------------------------------------------------------------

struct PosteriorDraws {
  Family family = Family::Poisson;
  PriorKind prior = PriorKind::ConditionalJeffreys;
  std::vector<double> pstar;
  std::vector<double> theta;
  std::vector<double> p;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::size_t B = 0;
};

/// Independent posterior draws of (p*, theta): p* from its Beta posterior, theta
/// by grid inverse-CDF (Poisson) or its Beta posterior (geometric); p recovered from p*.
PosteriorDraws draw_posterior(Family family, const CountSample& sample, std::size_t B, std::uint64_t seed,
                              PriorKind prior = PriorKind::ConditionalJeffreys);

/// Inverse-CDF sampler over a 4096-point grid of the theta posterior in log(theta) or logit(theta).
class ThetaGridSampler {
 public:
  explicit ThetaGridSampler(const PosteriorKernel& kernel, std::size_t grid_points = 4096);
  double draw(double uniform) const;
  double lower() const;
  double upper() const;

 private:
  Family family_;
  std::vector<double> u_;
  std::vector<double> density_;
  std::vector<double> cdf_;
};

struct RejectionDiagnostics {
  double envelope_shape = 0.0;
  double envelope_rate = 0.0;
  double log_bound = 0.0;
  double acceptance_rate = 0.0;
};

/// Rejection sampler for the Poisson theta posterior with a gamma envelope
/// (shape S - (n - n0) + 1/2, rate tuned numerically); a cross-check for the grid sampler.
std::vector<double> draw_theta_rejection(const PosteriorKernel& kernel, std::size_t count, std::uint64_t seed,
                                         RejectionDiagnostics* diagnostics = nullptr);

// ---------------------------------------------------------------------------
// Posterior probability of p > 0
// ---------------------------------------------------------------------------

enum class ThetaProposal {
  LikelihoodGamma,  ///< gamma(shape S - m + 1, rate m) (geometric: Beta(S - m + 1, m + 1))
  Laplace,          ///< gamma fitted to the theta posterior mode/curvature (geometric: exact Beta)
};

std::string_view to_string(ThetaProposal proposal);

struct PosteriorProbability {
  double value = 0.0;
  double mc_se = 0.0;
  double ess = 0.0;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  ThetaProposal proposal = ThetaProposal::Laplace;
  bool low_ess = false;
};

/// Self-normalized importance-sampling estimate of P(p > 0 | y) with p* ~ Beta(n0 + 1, n - n0 + 1).
PosteriorProbability posterior_prob_positive(Family family, const CountSample& sample, const PriorSpec& prior,
                                             std::size_t B, std::uint64_t seed,
                                             ThetaProposal proposal = ThetaProposal::Laplace);

/// Bayes test decision: reject H0: p = 0 for p > 0 when T exceeds the Uniform upper-alpha point 1 - alpha
/// (or `cutoff` when given). The signed root is Phi^{-1}(T).
TestReport bayes_test(const PosteriorProbability& t, double alpha, std::optional<double> cutoff = std::nullopt);

/// Deterministic P(p > 0 | y) as a ratio of 2-D adaptive quadratures over (p, theta).
numeric::QuadratureResult posterior_prob_positive_quadrature(Family family, const CountSample& sample,
                                                             const PriorSpec& prior);

/// Normalizing constant of the joint posterior by 2-D quadrature, reported as
/// log Z relative to `offset` (log Z_true = offset + log_norm).
struct JointNormalizer {
  double offset = 0.0;
  double log_norm = 0.0;
  double prob_positive = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};
JointNormalizer normalize_joint(const PosteriorKernel& kernel);

// ---------------------------------------------------------------------------
// Marginal density and intervals
// ---------------------------------------------------------------------------

/// Rao-Blackwellized estimate pi_hat(p | y) = (1/B) sum_i pi(p | theta_i, y).
class MarginalDensity {
 public:
  MarginalDensity(const PosteriorDraws& draws, const CountSample& sample);

  double operator()(double p) const;
  std::vector<double> operator()(std::span<const double> at_p) const;

 private:
  PosteriorKernel kernel_;
  std::vector<double> zero_prob_;
  std::vector<double> theta_term_;
  double shift_ = 0.0;
};

std::vector<double> marginal_posterior_density(const PosteriorDraws& draws, const CountSample& sample,
                                               std::span<const double> at_p);

/// Density estimate on a grid that spans the posterior support, denser where draws concentrate.
struct DensityCurve {
  std::vector<double> p;
  std::vector<double> density;
  double trapezoid_mass = 0.0;
};
DensityCurve posterior_density_curve(const PosteriorDraws& draws, const CountSample& sample,
                                     std::size_t grid_points);

enum class IntervalKind { EqualTail, HPD };
std::string_view to_string(IntervalKind kind);

struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  IntervalKind kind = IntervalKind::EqualTail;
  std::optional<double> density_threshold;
  bool multimodal = false;
  std::vector<std::string> warnings;
};

IntervalEstimate credible_interval(const PosteriorDraws& draws, double level);
IntervalEstimate hpd_interval(const PosteriorDraws& draws, const CountSample& sample, double level);

// ---------------------------------------------------------------------------
// Posterior-odds Bayes factor (non-authoritative)
// ---------------------------------------------------------------------------

struct ThetaWindow {
  double lower;
  double upper;
};

ThetaWindow default_theta_window(Family family);

/// Prior probability of {p > 0} with theta restricted to `window`.
double prior_prob_positive(const PriorSpec& prior, ThetaWindow window);

struct BayesFactorResult {
  double value = 0.0;
  bool lower_bound = false;
  PosteriorProbability posterior;
  double prior_prob = 0.0;
  ThetaWindow window{0.0, 0.0};
};

/// Posterior odds of {p > 0} divided by prior odds. Not the construction behind
/// published Bayes factors for these data; only the direction of evidence is meaningful.
BayesFactorResult bayes_factor_positive(Family family, const CountSample& sample, const PriorSpec& prior,
                                        std::size_t B, std::uint64_t seed,
                                        std::optional<ThetaWindow> window = std::nullopt);

}  // namespace zips

#endif  // ZIPS_BAYES_HPP
