#include "zips/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "zips/distribution.hpp"
#include "zips/frequentist.hpp"
#include "zips/parallel.hpp"
#include "zips/random.hpp"

namespace zips {

std::string_view to_string(PowerMethod method) {
  switch (method) {
    case PowerMethod::Score1: return "score1";
    case PowerMethod::Score2: return "score2";
    case PowerMethod::LR1: return "lr1";
    case PowerMethod::LR2: return "lr2";
    case PowerMethod::Bayes: return "bayes";
  }
  return "?";
}

PowerMethod power_method_from_string(std::string_view name) {
  for (auto m : kAllPowerMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown power method '" + std::string(name) + "'");
}

PowerGridSpec published_grid_spec() {
  PowerGridSpec spec;
  spec.thetas = {0.5, 1.0, 1.5, 2.0};
  spec.ps = {0.0, 0.1, 0.3, 0.4};
  spec.ns = {20, 50, 100};
  return spec;
}

namespace {

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

std::uint64_t design_key(Family family, double theta, double p, std::int64_t n) {
  return derive_seed(static_cast<std::uint64_t>(family),
                     {std::bit_cast<std::uint64_t>(theta), std::bit_cast<std::uint64_t>(p),
                      static_cast<std::uint64_t>(n)});
}

void validate_spec(const PowerGridSpec& spec) {
  if (spec.thetas.empty() || spec.ps.empty() || spec.ns.empty() || spec.methods.empty()) {
    throw std::invalid_argument("power grid is empty");
  }
  if (spec.reps < 100) throw std::invalid_argument("power study needs at least 100 replications per cell");
  if (spec.B == 0) throw std::invalid_argument("draw count must be positive");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  for (double t : spec.thetas) check_theta(spec.family, t);
  for (double p : spec.ps) {
    for (double t : spec.thetas) {
      if (!in_extended_space(ModelD{spec.family, p, t})) {
        throw ParameterOutOfRange("grid point (p, theta) lies outside the extended parameter space");
      }
    }
  }
  for (auto n : spec.ns) {
    if (n < 2) throw std::invalid_argument("sample sizes must be at least 2");
  }
}

}  // namespace

const PowerCell* PowerGrid::find(PowerMethod method, double theta, double p, std::int64_t n) const {
  for (const auto& c : cells) {
    if (c.method == method && same(c.theta, theta) && same(c.p, p) && c.n == n) return &c;
  }
  return nullptr;
}

PowerGrid run_power_study(const PowerGridSpec& spec, const ProgressFn& progress) {
  validate_spec(spec);
  const auto start = std::chrono::steady_clock::now();
  struct Design {
    double theta, p;
    std::int64_t n;
  };
  std::vector<Design> designs;
  for (double t : spec.thetas)
    for (auto n : spec.ns)
      for (double p : spec.ps) designs.push_back({t, p, n});

  const std::size_t methods = spec.methods.size();
  const double cutoff = spec.bayes_cutoff.value_or(1.0 - spec.alpha);
  const PriorSpec prior{PriorKind::ConditionalJeffreys, spec.family};
  const unsigned threads = spec.threads == 0 ? default_threads() : spec.threads;

  PowerGrid grid;
  grid.spec = spec;
  std::size_t redraws = 0;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const auto& design = designs[d];
    const ModelD truth{spec.family, design.p, design.theta};
    const std::uint64_t key = derive_seed(spec.seed, {design_key(spec.family, design.theta, design.p, design.n)});
    std::vector<unsigned char> reject(spec.reps * methods, 0);
    std::atomic<std::size_t> extra{0};
    parallel_for(spec.reps, threads, [&](std::size_t r) {
      CountSample y;
      bool ok = false;
      for (std::uint64_t attempt = 0; attempt <= 100 && !ok; ++attempt) {
        y = sample(truth, design.n, derive_seed(key, {r, attempt}));
        ok = y.sum() > 0;
        if (!ok) ++extra;
      }
      if (!ok) throw DegenerateSample("power study: 100 consecutive all-zero samples");
      for (std::size_t k = 0; k < methods; ++k) {
        bool rej = false;
        switch (spec.methods[k]) {
          case PowerMethod::Score1: rej = score_test(spec.family, y, spec.alpha, Sidedness::OneSided).reject; break;
          case PowerMethod::Score2: rej = score_test(spec.family, y, spec.alpha, Sidedness::TwoSided).reject; break;
          case PowerMethod::LR1: rej = lr_test(spec.family, y, spec.alpha, Sidedness::OneSided).reject; break;
          case PowerMethod::LR2: rej = lr_test(spec.family, y, spec.alpha, Sidedness::TwoSided).reject; break;
          case PowerMethod::Bayes: {
            const auto t = posterior_prob_positive(spec.family, y, prior, spec.B, derive_seed(key, {r, 0xba7e5}),
                                                   spec.proposal);
            rej = t.value > cutoff;
            break;
          }
        }
        reject[r * methods + k] = rej ? 1 : 0;
      }
    });
    redraws += extra.load();
    for (std::size_t k = 0; k < methods; ++k) {
      PowerCell cell;
      cell.method = spec.methods[k];
      cell.theta = design.theta;
      cell.p = design.p;
      cell.n = design.n;
      cell.reps = spec.reps;
      for (std::size_t r = 0; r < spec.reps; ++r) cell.rejections += reject[r * methods + k];
      cell.power = static_cast<double>(cell.rejections) / static_cast<double>(spec.reps);
      cell.mc_se = std::sqrt(cell.power * (1.0 - cell.power) / static_cast<double>(spec.reps));
      grid.cells.push_back(cell);
    }
    if (progress) progress(d + 1, designs.size());
  }
  grid.redraws = redraws;
  grid.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return grid;
}

std::string power_grid_csv(const PowerGrid& grid) {
  std::ostringstream out;
  out << "method,theta,p,n,power,mc_se\n";
  char line[160];
  for (const auto& c : grid.cells) {
    std::snprintf(line, sizeof line, "%s,%.10g,%.10g,%lld,%.6f,%.6f\n", std::string(to_string(c.method)).c_str(),
                  c.theta, c.p, static_cast<long long>(c.n), c.power, c.mc_se);
    out << line;
  }
  return out.str();
}

std::string format_power_table(const PowerGrid& grid, std::span<const PowerMethod> methods) {
  const auto& s = grid.spec;
  std::ostringstream out;
  char buf[64];
  out << "theta     n";
  for (double p : s.ps) {
    std::snprintf(buf, sizeof buf, " | p = %-5.2f", p);
    out << buf;
    for (std::size_t k = 1; k < methods.size(); ++k) out << "        ";
  }
  out << "\n          ";
  for (std::size_t j = 0; j < s.ps.size(); ++j) {
    out << " |";
    for (auto m : methods) {
      std::snprintf(buf, sizeof buf, " %7s", std::string(to_string(m)).c_str());
      out << buf;
    }
  }
  out << "\n";
  for (double t : s.thetas) {
    for (auto n : s.ns) {
      std::snprintf(buf, sizeof buf, "%5.2f %5lld", t, static_cast<long long>(n));
      out << buf;
      for (double p : s.ps) {
        out << " |";
        for (auto m : methods) {
          const auto* c = grid.find(m, t, p, n);
          if (c) {
            std::snprintf(buf, sizeof buf, " %7.4f", c->power);
          } else {
            std::snprintf(buf, sizeof buf, " %7s", "-");
          }
          out << buf;
        }
      }
      out << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Reference tables
// ---------------------------------------------------------------------------

namespace {

struct TableRow {
  double theta;
  std::int64_t n;
  double values[12];  // p = 0, .1, .3, .4; each Score, Bayes, LR
};

constexpr TableRow kOneSided[] = {
    {0.5, 20, {0.049, 0.045, 0.047, 0.065, 0.068, 0.064, 0.111, 0.105, 0.103, 0.144, 0.134, 0.118}},
    {0.5, 50, {0.046, 0.043, 0.042, 0.078, 0.076, 0.072, 0.180, 0.159, 0.154, 0.251, 0.212, 0.209}},
    {0.5, 100, {0.050, 0.047, 0.046, 0.096, 0.090, 0.081, 0.284, 0.262, 0.263, 0.376, 0.363, 0.345}},
    {1.0, 20, {0.040, 0.049, 0.036, 0.083, 0.094, 0.082, 0.232, 0.247, 0.228, 0.318, 0.323, 0.311}},
    {1.0, 50, {0.040, 0.049, 0.040, 0.123, 0.133, 0.126, 0.433, 0.434, 0.417, 0.585, 0.582, 0.566}},
    {1.0, 100, {0.045, 0.047, 0.048, 0.181, 0.182, 0.188, 0.670, 0.671, 0.680, 0.840, 0.841, 0.843}},
    {1.5, 20, {0.042, 0.053, 0.040, 0.123, 0.143, 0.116, 0.389, 0.420, 0.387, 0.544, 0.564, 0.537}},
    {1.5, 50, {0.040, 0.047, 0.043, 0.214, 0.225, 0.212, 0.730, 0.747, 0.739, 0.884, 0.895, 0.888}},
    {1.5, 100, {0.045, 0.046, 0.046, 0.345, 0.311, 0.351, 0.951, 0.936, 0.953, 0.992, 0.991, 0.993}},
    {2.0, 20, {0.046, 0.052, 0.035, 0.194, 0.213, 0.175, 0.615, 0.649, 0.600, 0.763, 0.801, 0.758}},
    {2.0, 50, {0.053, 0.053, 0.045, 0.345, 0.363, 0.346, 0.936, 0.930, 0.935, 0.988, 0.988, 0.986}},
    {2.0, 100, {0.044, 0.053, 0.042, 0.577, 0.484, 0.557, 0.998, 0.995, 0.998, 1.000, 1.000, 1.000}},
};

constexpr TableRow kTwoSided[] = {
    {0.5, 20, {0.045, 0.045, 0.061, 0.043, 0.068, 0.052, 0.065, 0.105, 0.057, 0.087, 0.134, 0.066}},
    {0.5, 50, {0.046, 0.043, 0.050, 0.055, 0.076, 0.056, 0.122, 0.159, 0.106, 0.181, 0.212, 0.136}},
    {0.5, 100, {0.051, 0.047, 0.051, 0.066, 0.090, 0.058, 0.185, 0.262, 0.174, 0.277, 0.363, 0.248}},
    {1.0, 20, {0.048, 0.049, 0.058, 0.057, 0.094, 0.062, 0.142, 0.247, 0.143, 0.203, 0.323, 0.198}},
    {1.0, 50, {0.049, 0.049, 0.051, 0.075, 0.133, 0.078, 0.303, 0.434, 0.296, 0.443, 0.582, 0.430}},
    {1.0, 100, {0.052, 0.047, 0.050, 0.117, 0.182, 0.115, 0.571, 0.671, 0.542, 0.767, 0.841, 0.739}},
    {1.5, 20, {0.047, 0.053, 0.057, 0.081, 0.143, 0.074, 0.280, 0.420, 0.267, 0.411, 0.564, 0.409}},
    {1.5, 50, {0.051, 0.047, 0.051, 0.140, 0.225, 0.131, 0.618, 0.747, 0.612, 0.806, 0.895, 0.809}},
    {1.5, 100, {0.049, 0.046, 0.054, 0.244, 0.311, 0.236, 0.913, 0.936, 0.908, 0.983, 0.991, 0.982}},
    {2.0, 20, {0.041, 0.052, 0.071, 0.128, 0.213, 0.113, 0.501, 0.649, 0.471, 0.670, 0.801, 0.644}},
    {2.0, 50, {0.049, 0.053, 0.057, 0.257, 0.363, 0.228, 0.890, 0.935, 0.880, 0.975, 0.988, 0.973}},
    {2.0, 100, {0.047, 0.053, 0.045, 0.451, 0.484, 0.440, 0.995, 0.995, 0.994, 1.000, 1.000, 1.000}},
};

std::vector<ReferenceCell> expand(std::span<const TableRow> rows, PowerMethod score, PowerMethod lr) {
  constexpr double ps[] = {0.0, 0.1, 0.3, 0.4};
  const PowerMethod order[] = {score, PowerMethod::Bayes, lr};
  std::vector<ReferenceCell> cells;
  for (const auto& row : rows)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 3; ++k) cells.push_back({order[k], row.theta, ps[j], row.n, row.values[3 * j + k]});
  return cells;
}

}  // namespace

std::span<const ReferenceCell> published_power_one_sided() {
  static const auto cells = expand(kOneSided, PowerMethod::Score1, PowerMethod::LR1);
  return cells;
}

std::span<const ReferenceCell> published_power_two_sided() {
  static const auto cells = expand(kTwoSided, PowerMethod::Score2, PowerMethod::LR2);
  return cells;
}

TableComparison compare_tables(const PowerGrid& grid, std::span<const ReferenceCell> reference, double tolerance) {
  TableComparison out;
  out.tolerance = tolerance;
  for (const auto& ref : reference) {
    const auto* cell = grid.find(ref.method, ref.theta, ref.p, ref.n);
    if (!cell) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "power grid has no cell for %s theta=%g p=%g n=%lld",
                    std::string(to_string(ref.method)).c_str(), ref.theta, ref.p, static_cast<long long>(ref.n));
      throw std::invalid_argument(buf);
    }
    CellComparison c;
    c.reference = ref;
    c.power = cell->power;
    c.mc_se = cell->mc_se;
    c.deviation = cell->power - ref.power;
    c.flagged = std::abs(c.deviation) > std::max(tolerance, 4.0 * cell->mc_se);
    if (c.flagged) ++out.flagged;
    if (std::abs(c.deviation) <= tolerance) ++out.within_tolerance;
    if (ref.p == 0.0 && (cell->power < 0.035 || cell->power > 0.065)) out.level_cells_ok = false;
    out.cells.push_back(c);
  }
  out.fraction_within = out.cells.empty() ? 0.0 : static_cast<double>(out.within_tolerance) / out.cells.size();
  out.pass = out.fraction_within >= 0.9 && out.level_cells_ok;
  return out;
}

std::string format_comparison(const TableComparison& cmp) {
  std::ostringstream out;
  char buf[200];
  for (const auto& c : cmp.cells) {
    if (!c.flagged) continue;
    std::snprintf(buf, sizeof buf, "  flagged %-6s theta=%.1f n=%-3lld p=%.2f  sim %.4f  ref %.4f  dev %+.4f\n",
                  std::string(to_string(c.reference.method)).c_str(), c.reference.theta,
                  static_cast<long long>(c.reference.n), c.reference.p, c.power, c.reference.power, c.deviation);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%zu/%zu cells within %.3f (%.1f%%), %zu flagged, level cells %s: %s\n",
                cmp.within_tolerance, cmp.cells.size(), cmp.tolerance, 100.0 * cmp.fraction_within, cmp.flagged,
                cmp.level_cells_ok ? "ok" : "out of [0.035, 0.065]", cmp.pass ? "PASS" : "FAIL");
  out << buf;
  return out.str();
}

}  // namespace zips
