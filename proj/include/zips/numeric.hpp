#ifndef ZIPS_NUMERIC_HPP
#define ZIPS_NUMERIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "zips/common.hpp"

// Special functions, quadrature and 1-D solvers used across the library.
namespace zips::numeric {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);
double normal_quantile(double prob);

/// Upper tail of chi-square with one degree of freedom.
double chi2_1_sf(double x);
/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// Chi-square survival function with k degrees of freedom.
double chi2_sf(double x, double k);

double log_beta(double a, double b);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);
double beta_inc_inv(double a, double b, double prob);

/// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};
/// One-sample KS test against Uniform[0, 1].
KsResult ks_uniform(std::span<const double> values);

/// Linear-interpolation (type 7) quantile of an already sorted range.
double quantile_sorted(std::span<const double> sorted, double prob);

double log_sum_exp(std::span<const double> values);

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

namespace detail {
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715901383975, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}
}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) quadrature over a finite [a, b].
/// The integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are tolerated.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                           double rel_tol = 1e-10, std::size_t max_segments = 2000) {
  QuadratureResult result;
  if (!(b > a)) return {0.0, 0.0, a == b, 0};
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod21(f, a, b);
  heap.push(first);
  result.evaluations = 21;
  double total = first.value;
  double error = first.error;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_segments) {
      result.value = total;
      result.abs_error = error;
      return result;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod21(f, worst.a, mid);
    const auto right = detail::gauss_kronrod21(f, mid, worst.b);
    result.evaluations += 42;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated rounding from the running updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.abs_error = error;
  result.converged = true;
  return result;
}

/// Bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-13, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw NumericalFailure("bisect: no sign change on bracket");
  for (int it = 0; it < max_iter && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol = 1e-10) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace zips::numeric

#endif  // ZIPS_NUMERIC_HPP
