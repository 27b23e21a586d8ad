#ifndef ZIPS_SIMULATION_HPP
#define ZIPS_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zips/bayes.hpp"
#include "zips/common.hpp"

namespace zips {

enum class PowerMethod { Score1, Score2, LR1, LR2, Bayes };

std::string_view to_string(PowerMethod method);
PowerMethod power_method_from_string(std::string_view name);
inline constexpr PowerMethod kAllPowerMethods[] = {PowerMethod::Score1, PowerMethod::Score2, PowerMethod::LR1,
                                                   PowerMethod::LR2, PowerMethod::Bayes};

struct PowerGridSpec {
  Family family = Family::Poisson;
  std::vector<double> thetas;
  std::vector<double> ps;
  std::vector<std::int64_t> ns;
  std::vector<PowerMethod> methods{std::begin(kAllPowerMethods), std::end(kAllPowerMethods)};
  std::size_t reps = 2000;
  std::size_t B = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;  // 0: all hardware threads
  ThetaProposal proposal = ThetaProposal::Laplace;
  /// Bayes test rejects when T > cutoff; defaults to the Uniform upper-alpha point 1 - alpha.
  std::optional<double> bayes_cutoff;
};

/// Desk-scale version of the published ZIP grid: theta {0.5, 1, 1.5, 2}, n {20, 50, 100}, p {0, .1, .3, .4}.
PowerGridSpec published_grid_spec();

struct PowerCell {
  PowerMethod method = PowerMethod::Score1;
  double theta = 0.0;
  double p = 0.0;
  std::int64_t n = 0;
  std::size_t rejections = 0;
  std::size_t reps = 0;
  double power = 0.0;
  double mc_se = 0.0;
};

struct PowerGrid {
  PowerGridSpec spec;
  std::vector<PowerCell> cells;
  std::size_t redraws = 0;  // all-zero samples replaced
  double seconds = 0.0;

  const PowerCell* find(PowerMethod method, double theta, double p, std::int64_t n) const;
};

/// Called with (completed design points, total design points).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Every (theta, p, n) design point seeds its replications from the grid seed and
/// the point's own coordinates, so sub-grids and reordered grids reproduce the same cells.
PowerGrid run_power_study(const PowerGridSpec& spec, const ProgressFn& progress = {});

std::string power_grid_csv(const PowerGrid& grid);
/// Rows (theta, n), column blocks p, one column per method.
std::string format_power_table(const PowerGrid& grid, std::span<const PowerMethod> methods);

// ---------------------------------------------------------------------------
// Comparison against reference powers
// ---------------------------------------------------------------------------

struct ReferenceCell {
  PowerMethod method;
  double theta;
  double p;
  std::int64_t n;
  double power;
};

/// Published one-sided table: Score1, Bayes, LR1 over the published grid (144 cells).
std::span<const ReferenceCell> published_power_one_sided();
/// Published two-sided table: Score2, Bayes, LR2 over the published grid (144 cells).
std::span<const ReferenceCell> published_power_two_sided();

struct CellComparison {
  ReferenceCell reference;
  double power = 0.0;
  double mc_se = 0.0;
  double deviation = 0.0;
  bool flagged = false;  // |deviation| > max(tolerance, 4 mc_se)
};

struct TableComparison {
  std::vector<CellComparison> cells;
  double tolerance = 0.03;
  std::size_t flagged = 0;
  std::size_t within_tolerance = 0;
  double fraction_within = 0.0;
  bool level_cells_ok = true;  // every p = 0 cell in [0.035, 0.065]
  bool pass = false;           // fraction_within >= 0.9 and level_cells_ok
};

/// Throws std::invalid_argument when the grid lacks a reference cell.
TableComparison compare_tables(const PowerGrid& grid, std::span<const ReferenceCell> reference,
                               double tolerance = 0.03);
std::string format_comparison(const TableComparison& comparison);

}  // namespace zips

#endif  // ZIPS_SIMULATION_HPP
