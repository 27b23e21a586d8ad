#ifndef ZIPS_REPORT_HPP
#define ZIPS_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zips/bayes.hpp"
#include "zips/count_sample.hpp"
#include "zips/frequentist.hpp"
#include "zips/simulation.hpp"

namespace zips {

inline constexpr int kReportSchemaVersion = 1;

struct FitEntry {
  std::string label;  // "null" or "full"
  MleResult fit;
};

struct AnalysisReport {
  std::string command;
  std::string dataset_name;
  CountSample sample;
  Family family = Family::Poisson;
  std::optional<PriorKind> prior;
  std::optional<std::uint64_t> seed;
  bool seed_generated = false;
  std::size_t draws = 0;
  std::vector<FitEntry> fits;
  std::vector<TestReport> tests;
  std::optional<PosteriorProbability> posterior;
  std::optional<numeric::QuadratureResult> posterior_quadrature;
  std::optional<BayesFactorResult> bayes_factor;
  std::vector<IntervalEstimate> intervals;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

nlohmann::json to_json(const AnalysisReport& report);
/// Same numbers as the JSON, rounded to 4 decimals.
std::string to_text(const AnalysisReport& report);

nlohmann::json to_json(const PowerGrid& grid);

}  // namespace zips

#endif  // ZIPS_REPORT_HPP
