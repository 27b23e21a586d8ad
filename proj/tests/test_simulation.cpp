#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "zips/simulation.hpp"

using namespace zips;
using doctest::Approx;

namespace {

PowerGridSpec small_spec() {
  PowerGridSpec spec;
  spec.thetas = {0.5, 1.5};
  spec.ps = {0.0, 0.3};
  spec.ns = {20, 50};
  spec.reps = 200;
  spec.B = 300;
  spec.seed = 77;
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST_CASE("power grid is reproducible across threads and sub-grids") {
  const auto spec = small_spec();
  const auto base = run_power_study(spec);
  CHECK(base.cells.size() == 2 * 2 * 2 * 5);

  auto threaded = spec;
  threaded.threads = 4;
  const auto t = run_power_study(threaded);
  REQUIRE(t.cells.size() == base.cells.size());
  for (std::size_t i = 0; i < base.cells.size(); ++i) {
    CHECK(t.cells[i].rejections == base.cells[i].rejections);
  }

  auto sub = spec;
  sub.thetas = {1.5};
  sub.ps = {0.3, 0.0};
  sub.ns = {50};
  sub.methods = {PowerMethod::Bayes, PowerMethod::LR1};
  const auto s = run_power_study(sub);
  for (const auto& c : s.cells) {
    const auto* full = base.find(c.method, c.theta, c.p, c.n);
    REQUIRE(full != nullptr);
    CHECK(c.rejections == full->rejections);
  }

  auto reseeded = spec;
  reseeded.seed = 78;
  const auto r = run_power_study(reseeded);
  int differ = 0;
  for (std::size_t i = 0; i < base.cells.size(); ++i) differ += r.cells[i].rejections != base.cells[i].rejections;
  CHECK(differ > 0);
}

TEST_CASE("power cells are consistent") {
  const auto grid = run_power_study(small_spec());
  std::size_t points_done = 0, points_total = 0;
  run_power_study(small_spec(), [&](std::size_t done, std::size_t total) {
    points_done = done;
    points_total = total;
  });
  CHECK(points_total == 8);
  CHECK(points_done == 8);
  for (const auto& c : grid.cells) {
    CHECK(c.reps == 200);
    CHECK(c.power == Approx(static_cast<double>(c.rejections) / 200.0));
    CHECK(c.mc_se == Approx(std::sqrt(c.power * (1.0 - c.power) / 200.0)));
  }
  // Power grows with p at the larger sample size.
  for (const PowerMethod m : kAllPowerMethods) {
    CHECK(grid.find(m, 1.5, 0.3, 50)->power > grid.find(m, 1.5, 0.0, 50)->power);
  }
  CHECK(grid.find(PowerMethod::Score1, 9.0, 0.3, 50) == nullptr);
}

TEST_CASE("CSV output") {
  const auto grid = run_power_study(small_spec());
  std::istringstream in(power_grid_csv(grid));
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,theta,p,n,power,mc_se");
  std::size_t rows = 0;
  std::set<std::string> methods;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    methods.insert(line.substr(0, line.find(',')));
  }
  CHECK(rows == grid.cells.size());
  CHECK(methods == std::set<std::string>{"score1", "score2", "lr1", "lr2", "bayes"});
}

TEST_CASE("method names") {
  for (const PowerMethod m : kAllPowerMethods) CHECK(power_method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(power_method_from_string("wald"), std::invalid_argument);
}

TEST_CASE("validation") {
  auto spec = small_spec();
  spec.thetas.clear();
  CHECK_THROWS_AS(run_power_study(spec), std::invalid_argument);
  spec = small_spec();
  spec.reps = 10;
  CHECK_THROWS_AS(run_power_study(spec), std::invalid_argument);
  spec = small_spec();
  spec.ps = {1.0};
  CHECK_THROWS(run_power_study(spec));
  spec = small_spec();
  spec.alpha = 0.0;
  CHECK_THROWS_AS(run_power_study(spec), std::invalid_argument);
}

TEST_CASE("published tables") {
  const auto one = published_power_one_sided();
  const auto two = published_power_two_sided();
  CHECK(one.size() == 144);
  CHECK(two.size() == 144);
  std::set<std::tuple<int, double, double, std::int64_t>> keys;
  for (const auto& c : one) {
    keys.emplace(static_cast<int>(c.method), c.theta, c.p, c.n);
    CHECK(c.power >= 0.0);
    CHECK(c.power <= 1.0);
  }
  CHECK(keys.size() == 144);
  const auto spec = published_grid_spec();
  CHECK(spec.thetas.size() * spec.ps.size() * spec.ns.size() * 3 == 144);
}

TEST_CASE("comparison against reference powers") {
  auto spec = small_spec();
  spec.methods = {PowerMethod::Score1, PowerMethod::LR1};
  const auto grid = run_power_study(spec);

  std::vector<ReferenceCell> exact;
  for (const auto& c : grid.cells) exact.push_back({c.method, c.theta, c.p, c.n, c.power});
  const auto perfect = compare_tables(grid, exact);
  CHECK(perfect.flagged == 0);
  CHECK(perfect.fraction_within == 1.0);
  CHECK(perfect.cells.size() == exact.size());
  CHECK(perfect.level_cells_ok == std::all_of(grid.cells.begin(), grid.cells.end(), [](const PowerCell& c) {
          return c.p != 0.0 || (c.power >= 0.035 && c.power <= 0.065);
        }));

  auto shifted = exact;
  shifted[0].power = std::min(1.0, shifted[0].power + 0.5);
  const auto off = compare_tables(grid, shifted);
  CHECK(off.flagged == 1);
  CHECK(off.cells[0].flagged);
  CHECK(off.within_tolerance == exact.size() - 1);

  // Half the cells off: below the 90% bar.
  auto bad = exact;
  for (std::size_t i = 0; i < bad.size(); i += 2) bad[i].power = bad[i].power > 0.5 ? 0.0 : 1.0;
  CHECK_FALSE(compare_tables(grid, bad).pass);

  auto missing = exact;
  missing.push_back({PowerMethod::Bayes, 1.5, 0.3, 50, 0.5});
  CHECK_THROWS_AS(compare_tables(grid, missing), std::invalid_argument);
  CHECK_FALSE(format_comparison(perfect).empty());
}
