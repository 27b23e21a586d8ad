#include "zips/datasets.hpp"

#include <stdexcept>
#include <vector>

namespace zips {

std::uint64_t fingerprint(const CountSample& sample) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [value, count] : sample.frequencies()) {
    feed(std::to_string(value) + ":" + std::to_string(count) + ";");
  }
  return h;
}

std::span<const EmbeddedDataset> embedded_datasets() {
  static const std::vector<EmbeddedDataset> sets = {
      {"uti", "urinary tract infections per patient, 98 HIV-infected men",
       CountSample({{0, 81}, {1, 9}, {2, 7}, {3, 1}}), 0xe4bc45a2fb7aad9dULL},
      {"terror", "international terrorism incidents per month in the United States, 1968-1974",
       CountSample({{0, 38}, {1, 26}, {2, 8}, {3, 2}, {4, 1}}), 0xef536cf379e80672ULL},
      {"cholera", "cholera patients per household, village in India",
       CountSample({{0, 168}, {1, 32}, {2, 16}, {3, 6}, {4, 1}}), 0x5bca9594ae405f40ULL},
  };
  return sets;
}

const EmbeddedDataset& embedded_dataset(std::string_view name) {
  for (const auto& d : embedded_datasets()) {
    if (d.name == name) {
      if (fingerprint(d.sample) != d.pinned_hash) {
        throw std::invalid_argument("embedded dataset '" + d.name + "' does not match its pinned hash");
      }
      return d;
    }
  }
  throw std::invalid_argument("unknown dataset '" + std::string(name) + "' (expected uti, terror or cholera)");
}

}  // namespace zips
