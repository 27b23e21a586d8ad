#include "zips/distribution.hpp"

#include <random>
#include <vector>

#include "zips/random.hpp"

namespace zips {

std::string_view to_string(Family family) {
  return family == Family::Poisson ? "poisson" : "geometric";
}

Family family_from_string(std::string_view name) {
  if (name == "poisson" || name == "Poisson" || name == "zip") return Family::Poisson;
  if (name == "geometric" || name == "Geometric") return Family::Geometric;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

namespace {

std::int64_t draw_base(Family family, double theta, Rng& rng) {
  if (family == Family::Poisson) return std::poisson_distribution<std::int64_t>(theta)(rng);
  // Failures before the first success with success probability 1 - theta.
  return std::geometric_distribution<std::int64_t>(1.0 - theta)(rng);
}

std::int64_t draw_inverse_cdf(const ModelD& model, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = pmf(model, 0);
  std::int64_t y = 0;
  while (u > cumulative) {
    ++y;
    const double mass = pmf(model, y);
    cumulative += mass;
    // Remaining tail is below double resolution; accept the current value.
    if (mass < 1e-300 && y > static_cast<std::int64_t>(base_mean(model.family, model.theta))) break;
  }
  return y;
}

}  // namespace

CountSample sample(const ModelD& model, std::int64_t n, std::uint64_t seed) {
  validate(model);
  if (n <= 0) throw std::invalid_argument("sample size must be positive");
  Rng rng = make_rng(seed);
  CountSample::FrequencyTable freq;
  if (model.p >= 0.0) {
    for (std::int64_t i = 0; i < n; ++i) {
      if (uniform01(rng) < model.p) {
        ++freq[0];
      } else {
        ++freq[draw_base(model.family, model.theta, rng)];
      }
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) ++freq[draw_inverse_cdf(model, rng)];
  }
  return CountSample(std::move(freq));
}

}  // namespace zips
