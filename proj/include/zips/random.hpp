#ifndef ZIPS_RANDOM_HPP
#define ZIPS_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace zips {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent seeds from a base seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed for a stream identified by (base, keys...).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(base);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Gamma(shape, rate) variate.
inline double gamma_variate(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

/// Beta(a, b) variate from a ratio of gamma variates.
inline double beta_variate(Rng& rng, double a, double b) {
  const double x = gamma_variate(rng, a, 1.0);
  const double y = gamma_variate(rng, b, 1.0);
  return x / (x + y);
}

}  // namespace zips

#endif  // ZIPS_RANDOM_HPP
