#ifndef ZIPS_COMMON_HPP
#define ZIPS_COMMON_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace zips {

inline constexpr std::string_view kVersion = "0.1.0";

/// Base power-series family of a zero-inflated model.
enum class Family { Poisson, Geometric };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Raised when (p, theta) leaves the extended parameter space.
class ParameterOutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a sample does not carry enough information for the request
/// (for example no positive counts, or no zeros where an interior fit is needed).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed to reach its target accuracy.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters closer than this to an open endpoint are treated as outside.
inline constexpr double kBoundaryEps = 1e-12;

}  // namespace zips

#endif  // ZIPS_COMMON_HPP
