#ifndef ZIPS_DISTRIBUTION_HPP
#define ZIPS_DISTRIBUTION_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "zips/common.hpp"
#include "zips/count_sample.hpp"

// Zero-inflated power-series families on the extended parameter space
//   f*(0) = p + (1 - p) f(0|theta),  f*(y) = (1 - p) f(y|theta) for y > 0,
// with f(y|theta) = a_y theta^y / g(theta) and p_lower(theta) < p < 1.
namespace zips {

template <typename Scalar>
bool theta_in_range(Family family, Scalar theta) {
  switch (family) {
    case Family::Poisson:
      return theta > Scalar(kBoundaryEps) && std::isfinite(static_cast<double>(theta));
    case Family::Geometric:
      return theta > Scalar(kBoundaryEps) && theta < Scalar(1) - Scalar(kBoundaryEps);
  }
  return false;
}

template <typename Scalar>
void check_theta(Family family, Scalar theta) {
  if (!theta_in_range(family, theta)) {
    throw ParameterOutOfRange("theta = " + std::to_string(static_cast<double>(theta)) +
                              " outside the " + std::string(to_string(family)) + " range");
  }
}

/// f(0|theta).
template <typename Scalar>
Scalar zero_prob(Family family, Scalar theta) {
  using std::exp;
  return family == Family::Poisson ? exp(-theta) : Scalar(1) - theta;
}

/// 1 - f(0|theta), computed without cancellation for small theta.
template <typename Scalar>
Scalar nonzero_prob(Family family, Scalar theta) {
  using std::expm1;
  return family == Family::Poisson ? -expm1(-theta) : theta;
}

/// f(0|theta) and its first three theta-derivatives.
template <typename Scalar>
std::array<Scalar, 4> zero_prob_derivatives(Family family, Scalar theta) {
  using std::exp;
  if (family == Family::Poisson) {
    const Scalar e = exp(-theta);
    return {e, -e, e, -e};
  }
  return {Scalar(1) - theta, Scalar(-1), Scalar(0), Scalar(0)};
}

/// log g(theta) and its first three derivatives.
template <typename Scalar>
std::array<Scalar, 4> log_normalizer_derivatives(Family family, Scalar theta) {
  using std::log;
  if (family == Family::Poisson) return {theta, Scalar(1), Scalar(0), Scalar(0)};
  const Scalar q = Scalar(1) - theta;
  return {-log(q), Scalar(1) / q, Scalar(1) / (q * q), Scalar(2) / (q * q * q)};
}

/// log a_y (Poisson: -log y!, geometric: 0).
template <typename Scalar>
Scalar log_coefficient(Family family, std::int64_t y) {
  using std::lgamma;
  return family == Family::Poisson ? -lgamma(Scalar(y) + Scalar(1)) : Scalar(0);
}

template <typename Scalar>
Scalar base_log_pmf(Family family, Scalar theta, std::int64_t y) {
  using std::log;
  return log_coefficient<Scalar>(family, y) + Scalar(y) * log(theta) -
         log_normalizer_derivatives(family, theta)[0];
}

/// theta g'(theta) / g(theta), the mean of the non-inflated family.
template <typename Scalar>
Scalar base_mean(Family family, Scalar theta) {
  return family == Family::Poisson ? theta : theta / (Scalar(1) - theta);
}

/// Open lower endpoint of the extended p range, -f(0)/(1 - f(0)).
template <typename Scalar>
Scalar p_lower(Family family, Scalar theta) {
  check_theta(family, theta);
  return -zero_prob(family, theta) / nonzero_prob(family, theta);
}

template <typename Scalar>
struct Model {
  Family family = Family::Poisson;
  Scalar p = Scalar(0);
  Scalar theta = Scalar(1);
};

using ModelD = Model<double>;

template <typename Scalar>
bool in_extended_space(const Model<Scalar>& m) {
  if (!theta_in_range(m.family, m.theta)) return false;
  const Scalar lower = -zero_prob(m.family, m.theta) / nonzero_prob(m.family, m.theta);
  return m.p > lower + Scalar(kBoundaryEps) && m.p < Scalar(1) - Scalar(kBoundaryEps);
}

template <typename Scalar>
void validate(const Model<Scalar>& m) {
  if (!in_extended_space(m)) {
    throw ParameterOutOfRange("(p, theta) = (" + std::to_string(static_cast<double>(m.p)) + ", " +
                              std::to_string(static_cast<double>(m.theta)) +
                              ") outside the extended " + std::string(to_string(m.family)) +
                              " parameter space");
  }
}

/// p* = p + (1 - p) f(0|theta), the probability of a zero.
template <typename Scalar>
Scalar zero_mass(const Model<Scalar>& m) {
  return m.p + (Scalar(1) - m.p) * zero_prob(m.family, m.theta);
}

template <typename Scalar>
Scalar log_pmf(const Model<Scalar>& m, std::int64_t y) {
  using std::log;
  validate(m);
  if (y < 0) return -std::numeric_limits<Scalar>::infinity();
  if (y == 0) return log(zero_mass(m));
  return log(Scalar(1) - m.p) + base_log_pmf(m.family, m.theta, y);
}

template <typename Scalar>
Scalar pmf(const Model<Scalar>& m, std::int64_t y) {
  using std::exp;
  if (y < 0) return Scalar(0);
  validate(m);
  if (y == 0) return zero_mass(m);
  return (Scalar(1) - m.p) * exp(base_log_pmf(m.family, m.theta, y));
}

/// Mean (1 - p) theta g'(theta) / g(theta).
template <typename Scalar>
Scalar mean(const Model<Scalar>& m) {
  return (Scalar(1) - m.p) * base_mean(m.family, m.theta);
}

/// Log-likelihood including the sum of log a_y, so values are comparable across models.
template <typename Scalar>
Scalar log_likelihood(const Model<Scalar>& m, const CountSample& sample) {
  using std::log;
  validate(m);
  const auto n0 = Scalar(sample.n0());
  const auto npos = Scalar(sample.n_positive());
  Scalar ll = Scalar(0);
  if (sample.n0() > 0) {
    const Scalar a = zero_mass(m);
    if (!(a > Scalar(0))) return -std::numeric_limits<Scalar>::infinity();
    ll += n0 * log(a);
  }
  if (sample.n_positive() > 0) {
    ll += npos * (log(Scalar(1) - m.p) - log_normalizer_derivatives(m.family, m.theta)[0]);
    ll += Scalar(sample.sum()) * log(m.theta);
    for (const auto& [y, count] : sample.frequencies()) {
      if (y > 0) ll += Scalar(count) * log_coefficient<Scalar>(m.family, y);
    }
  }
  return ll;
}

enum class Parametrization { PTheta, PStarTheta };

/// Per-observation Fisher information.
template <typename Scalar>
struct FisherInfo {
  Matrix2<Scalar> matrix = Matrix2<Scalar>::Zero();
  Parametrization parametrization = Parametrization::PTheta;

  Scalar i11() const { return matrix(0, 0); }
  Scalar i12() const { return matrix(0, 1); }
  Scalar i22() const { return matrix(1, 1); }
  Scalar determinant() const { return matrix.determinant(); }
};

/// Fisher information in (p, theta), closed forms for the ZIP and zero-inflated geometric.
template <typename Scalar>
FisherInfo<Scalar> fisher_info(const Model<Scalar>& m) {
  validate(m);
  const Scalar p = m.p;
  const Scalar t = m.theta;
  const Scalar q = Scalar(1) - p;
  const Scalar a = zero_mass(m);
  FisherInfo<Scalar> info;
  if (m.family == Family::Poisson) {
    using std::exp;
    const Scalar e = exp(-t);
    info.matrix(0, 0) = nonzero_prob(m.family, t) / (q * a);
    info.matrix(0, 1) = -e / a;
    info.matrix(1, 1) = q / t - p * q * e / a;
  } else {
    const Scalar u = Scalar(1) - t;
    info.matrix(0, 0) = t / (q * a);
    info.matrix(0, 1) = Scalar(-1) / a;
    info.matrix(1, 1) = q * ((t + u * u) / (u * u * t) + q / a);
  }
  info.matrix(1, 0) = info.matrix(0, 1);
  return info;
}

/// Information of the zero-truncated base family at theta.
template <typename Scalar>
Scalar truncated_info(Family family, Scalar theta) {
  using std::exp;
  if (family == Family::Poisson) {
    const Scalar e = exp(-theta);
    const Scalar nz = nonzero_prob(family, theta);
    return (nz - theta * e) / (theta * nz * nz);
  }
  const Scalar u = Scalar(1) - theta;
  return Scalar(1) / (theta * u * u);
}

template <typename Scalar>
struct PStarPoint {
  Scalar pstar;
  Scalar theta;
};

/// Orthogonal reparametrization p* = p + (1 - p) f(0|theta).
template <typename Scalar>
PStarPoint<Scalar> to_pstar(const Model<Scalar>& m) {
  validate(m);
  return {zero_mass(m), m.theta};
}

template <typename Scalar>
Scalar p_from_pstar(Family family, Scalar pstar, Scalar theta) {
  return (pstar - zero_prob(family, theta)) / nonzero_prob(family, theta);
}

template <typename Scalar>
Model<Scalar> from_pstar(Family family, Scalar pstar, Scalar theta) {
  check_theta(family, theta);
  if (!(pstar > Scalar(0) && pstar < Scalar(1))) {
    throw ParameterOutOfRange("p* = " + std::to_string(static_cast<double>(pstar)) + " outside (0, 1)");
  }
  Model<Scalar> m{family, p_from_pstar(family, pstar, theta), theta};
  return m;
}

/// Jacobian d(p*, theta) / d(p, theta).
template <typename Scalar>
Matrix2<Scalar> pstar_jacobian(const Model<Scalar>& m) {
  const auto d = zero_prob_derivatives(m.family, m.theta);
  Matrix2<Scalar> j;
  j << nonzero_prob(m.family, m.theta), (Scalar(1) - m.p) * d[1], Scalar(0), Scalar(1);
  return j;
}

/// Diagonal Fisher information in (p*, theta).
template <typename Scalar>
FisherInfo<Scalar> fisher_info_orthogonal(Family family, Scalar pstar, Scalar theta) {
  check_theta(family, theta);
  if (!(pstar > Scalar(0) && pstar < Scalar(1))) {
    throw ParameterOutOfRange("p* = " + std::to_string(static_cast<double>(pstar)) + " outside (0, 1)");
  }
  FisherInfo<Scalar> info;
  info.parametrization = Parametrization::PStarTheta;
  info.matrix(0, 0) = Scalar(1) / (pstar * (Scalar(1) - pstar));
  info.matrix(1, 1) = (Scalar(1) - pstar) * truncated_info(family, theta);
  return info;
}

/// Draw n IID observations. Uses the two-stage mixture for p >= 0 and
/// sequential inverse-CDF on f* for p < 0.
CountSample sample(const ModelD& model, std::int64_t n, std::uint64_t seed);

}  // namespace zips

#endif  // ZIPS_DISTRIBUTION_HPP
