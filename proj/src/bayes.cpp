#include "zips/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zips/distribution.hpp"
#include "zips/random.hpp"

namespace zips {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = 4096;
// exp(-32.24) ~ 1e-14: theta grid bracket for the inverse-CDF sampler.
constexpr double kGridDrop = 32.24;

// 1 - e^-t - t e^-t without cancellation near zero.
double poisson_truncated_numerator(double t) {
  if (t < 1e-2) {
    const double t2 = t * t;
    return t2 * (0.5 - t / 3.0 + t2 / 8.0 - t2 * t / 30.0 + t2 * t2 / 144.0);
  }
  return -std::expm1(-t) - t * std::exp(-t);
}

void require_informative(const CountSample& sample) {
  if (sample.n() <= 0) throw DegenerateSample("empty sample");
  if (sample.sum() == 0) throw DegenerateSample("no positive counts: posterior of theta is not proper");
}

double to_theta(Family family, double u) {
  return family == Family::Poisson ? std::exp(u) : 1.0 / (1.0 + std::exp(-u));
}

// log |d theta / du| for u = log(theta) or logit(theta).
double log_jacobian(Family family, double u) {
  if (family == Family::Poisson) return u;
  const double t = to_theta(family, u);
  return std::log(t) + std::log1p(-t);
}

std::pair<double, double> u_limits(Family family) {
  return family == Family::Poisson ? std::pair{std::log(1e-12), std::log(1e6)} : std::pair{-40.0, 40.0};
}

}  // namespace

std::string_view to_string(PriorKind kind) {
  return kind == PriorKind::JeffreysJoint ? "jeffreys-joint" : "conditional-jeffreys";
}

PriorKind prior_kind_from_string(std::string_view name) {
  if (name == "jeffreys-joint" || name == "joint") return PriorKind::JeffreysJoint;
  if (name == "conditional-jeffreys" || name == "conditional") return PriorKind::ConditionalJeffreys;
  throw std::invalid_argument("unknown prior '" + std::string(name) + "'");
}

std::string_view to_string(ThetaProposal proposal) {
  return proposal == ThetaProposal::LikelihoodGamma ? "gamma-likelihood" : "laplace-gamma";
}

std::string_view to_string(IntervalKind kind) { return kind == IntervalKind::EqualTail ? "equal-tail" : "hpd"; }

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

PriorDecomposition decompose(const PriorSpec& spec) {
  if (spec.kind == PriorKind::ConditionalJeffreys) return {-0.5, -0.5, spec};
  return {-0.5, 0.0, spec};
}

double PriorDecomposition::theta_part(double theta) const {
  const bool poisson = spec.family == Family::Poisson;
  if (spec.kind == PriorKind::ConditionalJeffreys) {
    const double base = poisson ? -0.5 * std::log(theta) : -std::log1p(-theta) - 0.5 * std::log(theta);
    return 0.5 * std::log(nonzero_prob(spec.family, theta)) + base - std::log(numeric::kPi);
  }
  if (poisson) return 0.5 * std::log(poisson_truncated_numerator(theta)) - 0.5 * std::log(theta);
  return 0.5 * std::log(theta) - std::log1p(-theta);
}

double PriorDecomposition::theta_part_derivative(double theta) const {
  const bool poisson = spec.family == Family::Poisson;
  if (spec.kind == PriorKind::ConditionalJeffreys) {
    if (poisson) return 0.5 / std::expm1(theta) - 0.5 / theta;
    return 1.0 / (1.0 - theta);
  }
  if (poisson) return 0.5 * theta * std::exp(-theta) / poisson_truncated_numerator(theta) - 0.5 / theta;
  return 0.5 / theta + 1.0 / (1.0 - theta);
}

double log_prior_density(const PriorSpec& spec, double p, double theta) {
  const ModelD m{spec.family, p, theta};
  validate(m);
  const auto d = decompose(spec);
  return d.a_exponent * std::log(zero_mass(m)) + d.q_exponent * std::log1p(-p) + d.theta_part(theta);
}

double prior_density(const PriorSpec& spec, double p, double theta) {
  return std::exp(log_prior_density(spec, p, theta));
}

Vector2<double> prior_gradient(const PriorSpec& spec, double p, double theta) {
  const ModelD m{spec.family, p, theta};
  const auto d = decompose(spec);
  const double a = zero_mass(m);
  const auto f0 = zero_prob_derivatives(spec.family, theta);
  Vector2<double> grad;
  grad(0) = d.a_exponent * (1.0 - f0[0]) / a - d.q_exponent / (1.0 - p);
  grad(1) = d.a_exponent * (1.0 - p) * f0[1] / a + d.theta_part_derivative(theta);
  return prior_density(spec, p, theta) * grad;
}

double conditional_prior_p(Family family, double p, double theta) {
  const ModelD m{family, p, theta};
  validate(m);
  return std::sqrt(nonzero_prob(family, theta) / ((1.0 - p) * zero_mass(m))) / numeric::kPi;
}

// ---------------------------------------------------------------------------
// PosteriorKernel
// ---------------------------------------------------------------------------

PosteriorKernel::PosteriorKernel(const PriorSpec& prior, const CountSample& sample)
    : prior_(prior), decomposition_(decompose(prior)), n_(sample.n()), n0_(sample.n0()), sum_(sample.sum()) {
  require_informative(sample);
  const auto [lo, hi] = u_limits(family());
  auto target = [&](double u) {
    const double t = to_theta(family(), u);
    if (!theta_in_range(family(), t)) return kNegInf;
    return log_theta_posterior(t) + log_jacobian(family(), u);
  };
  // Coarse scan first so the golden-section search starts inside the main mode.
  double best_u = lo;
  double best = kNegInf;
  for (int k = 0; k <= 400; ++k) {
    const double u = lo + (hi - lo) * k / 400.0;
    const double v = target(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  const double step = (hi - lo) / 400.0;
  const double u_mode = numeric::golden_section_max(target, std::max(lo, best_u - step),
                                                    std::min(hi, best_u + step), 1e-12);
  theta_mode_ = to_theta(family(), u_mode);
}

double PosteriorKernel::log_theta_term(double theta) const {
  const double npos = static_cast<double>(n_ - n0_);
  return static_cast<double>(sum_) * std::log(theta) - npos * log_normalizer_derivatives(family(), theta)[0] +
         decomposition_.theta_part(theta);
}

double PosteriorKernel::log_joint(double p, double theta) const {
  if (!theta_in_range(family(), theta) || !(p < 1.0)) return kNegInf;
  const double a = p + (1.0 - p) * zero_prob(family(), theta);
  if (!(a > 0.0)) return kNegInf;
  return pstar_exponent() * std::log(a) + q_exponent() * std::log1p(-p) + log_theta_term(theta);
}

std::pair<double, double> PosteriorKernel::pstar_posterior() const {
  return {pstar_exponent() + 1.0, q_exponent() + 1.0};
}

double PosteriorKernel::log_theta_posterior(double theta) const {
  return log_theta_term(theta) - (q_exponent() + 1.0) * std::log(nonzero_prob(family(), theta));
}

double PosteriorKernel::theta_mode() const { return theta_mode_; }

std::pair<double, double> PosteriorKernel::theta_bracket(double drop) const {
  const Family fam = family();
  auto target = [&](double u) { return log_theta_posterior(to_theta(fam, u)) + log_jacobian(fam, u); };
  const double u_mode = fam == Family::Poisson ? std::log(theta_mode_) : std::log(theta_mode_ / (1.0 - theta_mode_));
  const double top = target(u_mode);
  const double h = 1e-3;
  const double curvature = (target(u_mode + h) - 2.0 * top + target(u_mode - h)) / (h * h);
  const double step = curvature < 0.0 ? std::clamp(0.25 / std::sqrt(-curvature), 1e-4, 1.0) : 0.25;
  const auto [lo_limit, hi_limit] = u_limits(fam);
  double lo = u_mode;
  while (lo > lo_limit && target(lo) > top - drop) lo = std::max(lo_limit, lo - step);
  double hi = u_mode;
  while (hi < hi_limit && target(hi) > top - drop) hi = std::min(hi_limit, hi + step);
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Theta samplers
// ---------------------------------------------------------------------------

ThetaGridSampler::ThetaGridSampler(const PosteriorKernel& kernel, std::size_t grid_points)
    : family_(kernel.family()) {
  if (grid_points < 16) throw std::invalid_argument("theta grid needs at least 16 points");
  const auto [lo, hi] = kernel.theta_bracket(kGridDrop);
  u_.resize(grid_points);
  density_.resize(grid_points);
  std::vector<double> logd(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    u_[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    logd[k] = kernel.log_theta_posterior(to_theta(family_, u_[k])) + log_jacobian(family_, u_[k]);
  }
  const double top = *std::max_element(logd.begin(), logd.end());
  for (std::size_t k = 0; k < grid_points; ++k) density_[k] = std::exp(logd[k] - top);
  cdf_.assign(grid_points, 0.0);
  for (std::size_t k = 1; k < grid_points; ++k) {
    cdf_[k] = cdf_[k - 1] + 0.5 * (density_[k - 1] + density_[k]) * (u_[k] - u_[k - 1]);
  }
}

double ThetaGridSampler::draw(double uniform) const {
  const double target = std::clamp(uniform, 0.0, 1.0) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t k = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  k = std::min(k, cdf_.size() - 2);
  // Density is linear within a cell, so the cell CDF is quadratic.
  const double r = target - cdf_[k];
  const double h = u_[k + 1] - u_[k];
  const double d0 = density_[k];
  const double slope = (density_[k + 1] - d0) / h;
  double x;
  if (std::abs(slope) * h <= 1e-12 * std::max(d0, 1e-300)) {
    x = d0 > 0.0 ? r / d0 : 0.5 * h;
  } else {
    const double disc = std::max(0.0, d0 * d0 + 2.0 * slope * r);
    x = (std::sqrt(disc) - d0) / slope;
  }
  return to_theta(family_, u_[k] + std::clamp(x, 0.0, h));
}

double ThetaGridSampler::lower() const { return to_theta(family_, u_.front()); }
double ThetaGridSampler::upper() const { return to_theta(family_, u_.back()); }

std::vector<double> draw_theta_rejection(const PosteriorKernel& kernel, std::size_t count, std::uint64_t seed,
                                         RejectionDiagnostics* diagnostics) {
  if (kernel.family() != Family::Poisson) {
    throw std::invalid_argument("gamma-envelope rejection sampler is defined for the Poisson family");
  }
  const double npos = static_cast<double>(kernel.n_positive());
  const double shape = static_cast<double>(kernel.sum()) - npos + 0.5;
  auto log_ratio = [&](double theta, double rate) {
    return kernel.log_theta_posterior(theta) - ((shape - 1.0) * std::log(theta) - rate * theta);
  };
  // sup over theta of the log target/envelope ratio, searched in log(theta).
  auto log_bound = [&](double rate) {
    auto f = [&](double u) { return log_ratio(std::exp(u), rate); };
    double best_u = -20.0;
    double best = kNegInf;
    for (int k = 0; k <= 200; ++k) {
      const double u = -20.0 + 35.0 * k / 200.0;
      const double v = f(u);
      if (v > best) {
        best = v;
        best_u = u;
      }
    }
    const double u = numeric::golden_section_max(f, best_u - 0.175, best_u + 0.175, 1e-12);
    return std::max(best, f(u));
  };
  // Envelope rate chosen to minimize the expected number of proposals per acceptance.
  auto cost = [&](double rate) { return log_bound(rate) + std::lgamma(shape) - shape * std::log(rate); };
  const double rate = numeric::golden_section_max([&](double r) { return -cost(r); }, 1e-3 * npos,
                                                  npos * (1.0 - 1e-6), 1e-8);
  const double bound = log_bound(rate) + 1e-9;

  Rng rng = make_rng(seed);
  std::vector<double> out;
  out.reserve(count);
  std::size_t proposals = 0;
  const std::size_t max_proposals = std::max<std::size_t>(1000, 10000 * count);
  while (out.size() < count) {
    if (++proposals > max_proposals) throw NumericalFailure("theta rejection sampler: acceptance rate collapsed");
    const double theta = gamma_variate(rng, shape, rate);
    if (!(theta > 0.0)) continue;
    if (std::log(uniform01(rng)) < log_ratio(theta, rate) - bound) out.push_back(theta);
  }
  if (diagnostics) {
    diagnostics->envelope_shape = shape;
    diagnostics->envelope_rate = rate;
    diagnostics->log_bound = bound;
    diagnostics->acceptance_rate = static_cast<double>(count) / static_cast<double>(proposals);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Posterior draws
// ---------------------------------------------------------------------------

PosteriorDraws draw_posterior(Family family, const CountSample& sample, std::size_t B, std::uint64_t seed,
                              PriorKind prior) {
  if (B == 0) throw std::invalid_argument("draw count must be positive");
  const PosteriorKernel kernel(PriorSpec{prior, family}, sample);
  const auto [a, b] = kernel.pstar_posterior();
  std::optional<ThetaGridSampler> grid;
  if (family == Family::Poisson) grid.emplace(kernel);
  const double geo_a = static_cast<double>(kernel.sum() - kernel.n_positive()) + 0.5;
  const double geo_b = static_cast<double>(kernel.n_positive());

  PosteriorDraws draws;
  draws.family = family;
  draws.prior = prior;
  draws.seed = seed;
  draws.B = B;
  draws.pstar.resize(B);
  draws.theta.resize(B);
  draws.p.resize(B);
  draws.weights.assign(B, 1.0);
  const std::size_t chunks = (B + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    Rng rng = make_rng(derive_seed(seed, {0xd1a5, c}));
    const std::size_t end = std::min(B, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double pstar = std::clamp(beta_variate(rng, a, b), 1e-300, 1.0 - 1e-16);
      const double theta = grid ? grid->draw(uniform01(rng)) : beta_variate(rng, geo_a, geo_b);
      draws.pstar[i] = pstar;
      draws.theta[i] = theta;
      draws.p[i] = p_from_pstar(family, pstar, theta);
    }
  }
  return draws;
}

// ---------------------------------------------------------------------------
// P(p > 0 | y)
// ---------------------------------------------------------------------------

namespace {

struct ThetaProposalDensity {
  Family family;
  bool gamma;   // gamma(shape, rate) when true, Beta(shape, rate) otherwise
  double shape;
  double rate;
  double draw(Rng& rng) const { return gamma ? gamma_variate(rng, shape, rate) : beta_variate(rng, shape, rate); }
  double log_density(double theta) const {
    if (gamma) return (shape - 1.0) * std::log(theta) - rate * theta;
    return (shape - 1.0) * std::log(theta) + (rate - 1.0) * std::log1p(-theta);
  }
};

ThetaProposalDensity make_proposal(const PosteriorKernel& kernel, ThetaProposal kind) {
  const double s = static_cast<double>(kernel.sum());
  const double m = static_cast<double>(kernel.n_positive());
  if (kernel.family() == Family::Geometric) {
    if (kind == ThetaProposal::LikelihoodGamma) return {Family::Geometric, false, s - m + 1.0, m + 1.0};
    return {Family::Geometric, false, s - m + 0.5, m};
  }
  if (kind == ThetaProposal::LikelihoodGamma) return {Family::Poisson, true, s - m + 1.0, m};
  // Gamma matched to mode and curvature of the theta posterior in log(theta),
  // variance inflated by 1.5 and shape capped so the weights keep finite variance.
  const double mode = kernel.theta_mode();
  auto t = [&](double u) { return kernel.log_theta_posterior(std::exp(u)) + u; };
  const double u0 = std::log(mode);
  const double h = 1e-3;
  const double curvature = (t(u0 + h) - 2.0 * t(u0) + t(u0 - h)) / (h * h);
  double shape = curvature < 0.0 ? -curvature / 1.5 : s - m + 0.5;
  shape = std::clamp(shape, 0.25, s - m + 0.9);
  const double rate = std::min(shape / mode, 1.5 * m);
  return {Family::Poisson, true, shape, rate};
}

}  // namespace

PosteriorProbability posterior_prob_positive(Family family, const CountSample& sample, const PriorSpec& prior,
                                             std::size_t B, std::uint64_t seed, ThetaProposal proposal) {
  if (B == 0) throw std::invalid_argument("draw count must be positive");
  if (prior.family != family) throw std::invalid_argument("prior family does not match the model family");
  const PosteriorKernel kernel(prior, sample);
  const auto q = make_proposal(kernel, proposal);
  const double n0 = static_cast<double>(kernel.n0());
  const double m = static_cast<double>(kernel.n_positive());
  const double a_exp = kernel.pstar_exponent();
  const double q_exp = kernel.q_exponent();

  std::vector<double> log_w(B);
  std::vector<char> positive(B);
  const std::size_t chunks = (B + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    Rng rng = make_rng(derive_seed(seed, {0x15, c}));
    const std::size_t end = std::min(B, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double pstar = beta_variate(rng, n0 + 1.0, m + 1.0);
      double theta = q.draw(rng);
      if (!theta_in_range(family, theta)) {
        log_w[i] = kNegInf;
        positive[i] = 0;
        continue;
      }
      const double log_target = a_exp * std::log(pstar) + q_exp * std::log1p(-pstar) +
                                kernel.log_theta_posterior(theta);
      const double log_proposal = n0 * std::log(pstar) + m * std::log1p(-pstar) + q.log_density(theta);
      log_w[i] = log_target - log_proposal;
      positive[i] = pstar > zero_prob(family, theta) ? 1 : 0;
    }
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(top)) throw NumericalFailure("importance weights are all zero");
  double sum_w = 0.0, sum_w2 = 0.0, sum_pos = 0.0;
  std::vector<double> w(B);
  for (std::size_t i = 0; i < B; ++i) {
    w[i] = std::exp(log_w[i] - top);
    sum_w += w[i];
    sum_w2 += w[i] * w[i];
    if (positive[i]) sum_pos += w[i];
  }
  PosteriorProbability result;
  result.value = std::clamp(sum_pos / sum_w, 0.0, 1.0);
  double var = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    const double dev = (positive[i] ? 1.0 : 0.0) - result.value;
    var += w[i] * w[i] * dev * dev;
  }
  result.mc_se = std::sqrt(var) / sum_w;
  result.ess = sum_w * sum_w / sum_w2;
  result.draws = B;
  result.seed = seed;
  result.proposal = proposal;
  result.low_ess = result.ess / static_cast<double>(B) < 0.01;
  return result;
}

TestReport bayes_test(const PosteriorProbability& t, double alpha, std::optional<double> cutoff) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  TestReport report;
  report.method = Method::Bayes;
  report.alpha = alpha;
  report.sidedness = Sidedness::OneSided;
  report.statistic = t.value;
  report.posterior_prob = t.value;
  report.signed_root = numeric::normal_quantile(std::clamp(t.value, 1e-16, 1.0 - 1e-16));
  report.reject = t.value > cutoff.value_or(1.0 - alpha);
  if (t.low_ess) report.notes.emplace_back("importance sampling ESS below 1% of draws; estimate unreliable");
  return report;
}

JointNormalizer normalize_joint(const PosteriorKernel& kernel) {
  const Family fam = kernel.family();
  const double n = static_cast<double>(kernel.n());
  const double pstar_hat = kernel.n0() > 0 ? static_cast<double>(kernel.n0()) / n : 0.5 / n;
  const double theta_hat = kernel.theta_mode();
  JointNormalizer out;
  out.offset = kernel.log_joint(p_from_pstar(fam, pstar_hat, theta_hat), theta_hat);

  constexpr double abs_tol = 1e-300;
  constexpr double inner_rel = 1e-11;
  constexpr double outer_rel = 1e-10;
  constexpr int pieces = 8;
  bool converged = true;

  auto inner = [&](double theta, double a, double b) {
    auto f = [&](double p) { return std::exp(kernel.log_joint(p, theta) - out.offset); };
    double total = 0.0;
    for (int k = 0; k < pieces; ++k) {
      const double lo = a + (b - a) * k / pieces;
      const double hi = a + (b - a) * (k + 1) / pieces;
      const auto r = numeric::integrate(f, lo, hi, abs_tol, inner_rel);
      converged = converged && r.converged;
      total += r.value;
    }
    return total;
  };
  auto positive = [&](double u) {
    const double theta = to_theta(fam, u);
    return inner(theta, 0.0, 1.0) * std::exp(log_jacobian(fam, u));
  };
  auto negative = [&](double u) {
    const double theta = to_theta(fam, u);
    return inner(theta, p_lower(fam, theta), 0.0) * std::exp(log_jacobian(fam, u));
  };
  const auto [u_lo, u_hi] = kernel.theta_bracket(46.0);
  double num = 0.0, neg = 0.0, err = 0.0;
  constexpr int outer_pieces = 16;
  for (int k = 0; k < outer_pieces; ++k) {
    const double lo = u_lo + (u_hi - u_lo) * k / outer_pieces;
    const double hi = u_lo + (u_hi - u_lo) * (k + 1) / outer_pieces;
    const auto rp = numeric::integrate(positive, lo, hi, abs_tol, outer_rel);
    const auto rn = numeric::integrate(negative, lo, hi, abs_tol, outer_rel);
    converged = converged && rp.converged && rn.converged;
    num += rp.value;
    neg += rn.value;
    err += rp.abs_error + rn.abs_error;
  }
  const double den = num + neg;
  if (!(den > 0.0)) throw NumericalFailure("posterior normalizing constant vanished");
  out.log_norm = std::log(den);
  out.prob_positive = num / den;
  out.abs_error = err / den;
  out.converged = converged;
  return out;
}

numeric::QuadratureResult posterior_prob_positive_quadrature(Family family, const CountSample& sample,
                                                             const PriorSpec& prior) {
  if (prior.family != family) throw std::invalid_argument("prior family does not match the model family");
  const PosteriorKernel kernel(prior, sample);
  const auto norm = normalize_joint(kernel);
  return {norm.prob_positive, norm.abs_error, norm.converged, 0};
}

// ---------------------------------------------------------------------------
// Marginal density and intervals
// ---------------------------------------------------------------------------

MarginalDensity::MarginalDensity(const PosteriorDraws& draws, const CountSample& sample)
    : kernel_(PriorSpec{draws.prior, draws.family}, sample) {
  if (draws.theta.empty()) throw std::invalid_argument("no posterior draws");
  double total_weight = 0.0;
  for (double w : draws.weights) total_weight += w;
  if (draws.weights.size() != draws.theta.size() || !(total_weight > 0.0)) {
    throw std::invalid_argument("posterior draw weights are inconsistent");
  }
  // p* | theta, y is Beta(alpha, beta) whatever theta is, so pi(p | theta, y) is that
  // Beta density at p* = p + (1 - p) f0 times the Jacobian 1 - f0.
  const auto [alpha, beta] = kernel_.pstar_posterior();
  shift_ = numeric::log_beta(alpha, beta);
  zero_prob_.reserve(draws.theta.size());
  theta_term_.reserve(draws.theta.size());
  for (std::size_t i = 0; i < draws.theta.size(); ++i) {
    const double f0 = zero_prob(draws.family, draws.theta[i]);
    zero_prob_.push_back(f0);
    theta_term_.push_back(beta * std::log1p(-f0) + std::log(draws.weights[i] / total_weight));
  }
}

double MarginalDensity::operator()(double p) const {
  if (!(p < 1.0)) return 0.0;
  const double a_exp = kernel_.pstar_exponent();
  const double q_term = kernel_.q_exponent() * std::log1p(-p) - shift_;
  double total = 0.0;
  for (std::size_t i = 0; i < zero_prob_.size(); ++i) {
    const double a = p + (1.0 - p) * zero_prob_[i];
    if (a <= 0.0) continue;
    total += std::exp(a_exp * std::log(a) + q_term + theta_term_[i]);
  }
  return total;
}

std::vector<double> MarginalDensity::operator()(std::span<const double> at_p) const {
  std::vector<double> out;
  out.reserve(at_p.size());
  for (double p : at_p) out.push_back((*this)(p));
  return out;
}

std::vector<double> marginal_posterior_density(const PosteriorDraws& draws, const CountSample& sample,
                                               std::span<const double> at_p) {
  return MarginalDensity(draws, sample)(at_p);
}

DensityCurve posterior_density_curve(const PosteriorDraws& draws, const CountSample& sample,
                                     std::size_t grid_points) {
  if (grid_points < 16) throw std::invalid_argument("density curve needs at least 16 grid points");
  const MarginalDensity density(draws, sample);
  std::vector<double> sorted = draws.p;
  std::sort(sorted.begin(), sorted.end());
  const double lo0 = sorted.front();
  const double hi0 = sorted.back();
  const double width = std::max(hi0 - lo0, 1e-6);
  double top = 0.0;
  for (int k = 0; k <= 200; ++k) top = std::max(top, density(lo0 + width * k / 200.0));
  // Push both ends out until the density is negligible.
  const double floor = 1e-4 * top;
  double lo = lo0;
  for (int k = 0; k < 200 && density(lo) > floor; ++k) lo -= 0.05 * width;
  double hi = hi0;
  for (int k = 0; k < 200 && hi < 1.0 && density(hi) > floor; ++k) hi = std::min(hi + 0.05 * width, 1.0 - 1e-12);

  DensityCurve curve;
  const std::size_t uniform_points = grid_points / 2;
  const std::size_t quantile_points = grid_points - uniform_points;
  for (std::size_t k = 0; k < uniform_points; ++k) {
    curve.p.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(uniform_points - 1));
  }
  for (std::size_t k = 0; k < quantile_points; ++k) {
    curve.p.push_back(numeric::quantile_sorted(sorted, (k + 0.5) / static_cast<double>(quantile_points)));
  }
  std::sort(curve.p.begin(), curve.p.end());
  curve.p.erase(std::unique(curve.p.begin(), curve.p.end()), curve.p.end());
  curve.density = density(curve.p);
  for (std::size_t k = 1; k < curve.p.size(); ++k) {
    curve.trapezoid_mass += 0.5 * (curve.density[k] + curve.density[k - 1]) * (curve.p[k] - curve.p[k - 1]);
  }
  return curve;
}

namespace {
void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("credible level must lie in (0, 1)");
}
}  // namespace

IntervalEstimate credible_interval(const PosteriorDraws& draws, double level) {
  check_level(level);
  if (draws.p.empty()) throw std::invalid_argument("no posterior draws");
  std::vector<double> sorted = draws.p;
  std::sort(sorted.begin(), sorted.end());
  const double alpha = 1.0 - level;
  IntervalEstimate out;
  out.kind = IntervalKind::EqualTail;
  out.level = level;
  out.lower = numeric::quantile_sorted(sorted, 0.5 * alpha);
  out.upper = numeric::quantile_sorted(sorted, 1.0 - 0.5 * alpha);
  return out;
}

IntervalEstimate hpd_interval(const PosteriorDraws& draws, const CountSample& sample, double level) {
  check_level(level);
  if (draws.p.size() < 2) throw std::invalid_argument("HPD interval needs at least two draws");
  const MarginalDensity density(draws, sample);
  const auto [min_it, max_it] = std::minmax_element(draws.p.begin(), draws.p.end());
  const double lo = *min_it;
  const double hi = *max_it;

  constexpr std::size_t grid_points = 2048;
  std::vector<double> grid(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) grid[k] = lo + (hi - lo) * k / (grid_points - 1.0);
  const auto values = density(grid);

  // Density at each draw by linear interpolation on the grid.
  const double spacing = (hi - lo) / (grid_points - 1.0);
  std::vector<double> at_draws;
  at_draws.reserve(draws.p.size());
  for (double p : draws.p) {
    const double pos = spacing > 0.0 ? (p - lo) / spacing : 0.0;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, pos)), grid_points - 2);
    const double frac = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
    at_draws.push_back(values[k] + frac * (values[k + 1] - values[k]));
  }
  std::sort(at_draws.begin(), at_draws.end());
  const double threshold = numeric::quantile_sorted(at_draws, 1.0 - level);

  IntervalEstimate out;
  out.kind = IntervalKind::HPD;
  out.level = level;
  out.density_threshold = threshold;

  std::size_t first = grid_points, last = 0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    if (values[k] >= threshold) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == grid_points) {
    out.lower = lo;
    out.upper = hi;
    out.warnings.emplace_back("density estimate never reaches the HPD threshold; reporting the draw range");
    return out;
  }
  for (std::size_t k = first; k <= last; ++k) {
    if (values[k] < threshold) {
      out.multimodal = true;
      out.warnings.emplace_back("estimated marginal posterior is not unimodal; reporting the hull of the HPD set");
      break;
    }
  }
  auto excess = [&](double p) { return density(p) - threshold; };
  out.lower = first == 0 ? lo : numeric::bisect(excess, grid[first - 1], grid[first], 1e-10);
  out.upper = last == grid_points - 1 ? hi : numeric::bisect(excess, grid[last], grid[last + 1], 1e-10);
  return out;
}

// ---------------------------------------------------------------------------
// Bayes factor
// ---------------------------------------------------------------------------

ThetaWindow default_theta_window(Family family) {
  return family == Family::Poisson ? ThetaWindow{0.0, 50.0} : ThetaWindow{0.0, 0.999};
}

double prior_prob_positive(const PriorSpec& prior, ThetaWindow window) {
  if (!(window.lower >= 0.0 && window.upper > window.lower)) throw std::invalid_argument("invalid theta window");
  if (prior.family == Family::Geometric && window.upper >= 1.0) {
    throw std::invalid_argument("geometric theta window must end below 1");
  }
  const auto d = decompose(prior);
  // Integrate in p* = sin^2(phi) and theta = s^2, which removes the
  // inverse-square-root endpoint singularities of both priors.
  auto log_pstar_density = [&](double phi, double theta) {
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    return 2.0 * d.a_exponent * std::log(sp) + 2.0 * d.q_exponent * std::log(cp) + std::log(2.0 * sp * cp) -
           (1.0 + d.q_exponent) * std::log(nonzero_prob(prior.family, theta)) + d.theta_part(theta);
  };
  auto inner = [&](double theta, bool positive_part) {
    const double split = std::asin(std::sqrt(zero_prob(prior.family, theta)));
    const double a = positive_part ? split : 0.0;
    const double b = positive_part ? 0.5 * numeric::kPi : split;
    auto f = [&](double phi) { return std::exp(log_pstar_density(phi, theta)); };
    return numeric::integrate(f, a, b, 1e-300, 1e-11).value;
  };
  auto outer = [&](bool positive_part) {
    auto g = [&](double s) { return 2.0 * s * inner(s * s, positive_part); };
    const double lo = std::sqrt(window.lower);
    const double hi = std::sqrt(window.upper);
    double total = 0.0;
    constexpr int pieces = 16;
    for (int k = 0; k < pieces; ++k) {
      total += numeric::integrate(g, lo + (hi - lo) * k / pieces, lo + (hi - lo) * (k + 1) / pieces, 1e-300, 1e-10)
                   .value;
    }
    return total;
  };
  const double pos = outer(true);
  const double neg = outer(false);
  return pos / (pos + neg);
}

BayesFactorResult bayes_factor_positive(Family family, const CountSample& sample, const PriorSpec& prior,
                                        std::size_t B, std::uint64_t seed, std::optional<ThetaWindow> window) {
  BayesFactorResult out;
  out.window = window.value_or(default_theta_window(family));
  out.posterior = posterior_prob_positive(family, sample, prior, B, seed);
  out.prior_prob = prior_prob_positive(prior, out.window);
  double t = out.posterior.value;
  const double resolution = std::max(2.0 * out.posterior.mc_se, 1.0 / std::max(out.posterior.ess, 1.0));
  if (1.0 - t <= resolution) {
    out.lower_bound = true;
    t = 1.0 - std::max(1.0 - t + 2.0 * out.posterior.mc_se, 1.0 / std::max(out.posterior.ess, 1.0));
  }
  const double prior_odds = out.prior_prob / (1.0 - out.prior_prob);
  out.value = (t / (1.0 - t)) / prior_odds;
  return out;
}

}  // namespace zips
