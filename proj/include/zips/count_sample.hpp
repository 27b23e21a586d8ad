#ifndef ZIPS_COUNT_SAMPLE_HPP
#define ZIPS_COUNT_SAMPLE_HPP

#include <cstdint>
#include <map>
#include <span>

namespace zips {

/// Frequency table of nonnegative counts with cached sufficient statistics.
class CountSample {
 public:
  using FrequencyTable = std::map<std::int64_t, std::int64_t>;

  CountSample() = default;
  /// Frequencies must be positive and values nonnegative; zero-frequency rows are dropped.
  explicit CountSample(FrequencyTable freq);
  static CountSample from_values(std::span<const std::int64_t> values);

  const FrequencyTable& frequencies() const { return freq_; }
  std::int64_t n() const { return n_; }
  std::int64_t n0() const { return n0_; }
  /// Number of positive observations, n - n0.
  std::int64_t n_positive() const { return n_ - n0_; }
  std::int64_t sum() const { return sum_; }
  double mean() const { return n_ > 0 ? static_cast<double>(sum_) / static_cast<double>(n_) : 0.0; }
  std::int64_t max_value() const { return freq_.empty() ? 0 : freq_.rbegin()->first; }

  bool operator==(const CountSample& other) const { return freq_ == other.freq_; }

 private:
  FrequencyTable freq_;
  std::int64_t n_ = 0;
  std::int64_t n0_ = 0;
  std::int64_t sum_ = 0;
};

}  // namespace zips

#endif  // ZIPS_COUNT_SAMPLE_HPP
