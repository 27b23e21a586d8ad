#include "zips/count_sample.hpp"

#include <stdexcept>
#include <string>

namespace zips {

CountSample::CountSample(FrequencyTable freq) {
  for (const auto& [value, count] : freq) {
    if (value < 0) throw std::invalid_argument("negative count value " + std::to_string(value));
    if (count < 0) throw std::invalid_argument("negative frequency for value " + std::to_string(value));
    if (count == 0) continue;
    freq_.emplace(value, count);
    n_ += count;
    sum_ += value * count;
  }
  if (auto it = freq_.find(0); it != freq_.end()) n0_ = it->second;
}

CountSample CountSample::from_values(std::span<const std::int64_t> values) {
  FrequencyTable freq;
  for (auto v : values) {
    if (v < 0) throw std::invalid_argument("negative count value " + std::to_string(v));
    ++freq[v];
  }
  return CountSample(std::move(freq));
}

}  // namespace zips
