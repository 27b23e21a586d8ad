#ifndef ZIPS_DATASETS_HPP
#define ZIPS_DATASETS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "zips/count_sample.hpp"

namespace zips {

struct EmbeddedDataset {
  std::string name;
  std::string description;
  CountSample sample;
  std::uint64_t pinned_hash;
};

/// FNV-1a over the canonical "value:count;" rendering of the frequency table.
std::uint64_t fingerprint(const CountSample& sample);

/// uti, terror, cholera.
std::span<const EmbeddedDataset> embedded_datasets();
/// Throws std::invalid_argument for an unknown name or a dataset whose table no longer matches its hash.
const EmbeddedDataset& embedded_dataset(std::string_view name);

}  // namespace zips

#endif  // ZIPS_DATASETS_HPP
