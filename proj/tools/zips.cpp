// zips: command-line front end for zero-inflated power-series inference.
//
// Exit codes: 0 success, 1 internal error, 2 bad input or degenerate data.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zips/bayes.hpp"
#include "zips/datasets.hpp"
#include "zips/frequentist.hpp"
#include "zips/io.hpp"
#include "zips/report.hpp"
#include "zips/simulation.hpp"

namespace {

using namespace zips;

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DataOptions {
  std::string path;
  std::string dataset;
};

void add_data_options(CLI::App* cmd, DataOptions& data) {
  auto* path = cmd->add_option("--data", data.path, "dataset file: value,count rows or one count per line");
  auto* name = cmd->add_option("--dataset", data.dataset, "embedded dataset")
                   ->check(CLI::IsMember({"uti", "terror", "cholera"}));
  path->excludes(name);
  name->excludes(path);
}

std::pair<std::string, CountSample> load(const DataOptions& data) {
  if (!data.path.empty()) return {data.path, read_dataset(data.path)};
  if (!data.dataset.empty()) return {data.dataset, embedded_dataset(data.dataset).sample};
  throw UsageError("one of --data or --dataset is required");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given, bool& generated) {
  generated = !given.has_value();
  if (given) return *given;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

const CLI::Validator kOpenUnit =
    CLI::Validator([](std::string& s) -> std::string {
      try {
        const double v = std::stod(s);
        if (v > 0.0 && v < 1.0) return {};
      } catch (...) {
      }
      return "value must lie strictly between 0 and 1, got " + s;
    }, "(0,1)");

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void emit(const AnalysisReport& report, const std::string& format) {
  if (format == "json") {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << to_text(report);
  }
}

// ---------------------------------------------------------------------------

struct TestOptions {
  DataOptions data;
  std::string model = "poisson";
  std::string method = "all";
  std::string prior = "conditional";
  std::string proposal = "laplace";
  double alpha = 0.05;
  std::string sided = "one";
  std::size_t draws = 10000;
  std::optional<std::uint64_t> seed;
  std::string out = "text";
};

int run_test(const TestOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  auto [name, sample] = load(o.data);
  AnalysisReport r;
  r.command = "test";
  r.dataset_name = name;
  r.sample = sample;
  r.family = family_from_string(o.model);
  const auto sided = o.sided == "one" ? Sidedness::OneSided : Sidedness::TwoSided;
  const bool freq = o.method == "score" || o.method == "lr" || o.method == "all";
  const bool bayes = o.method == "bayes" || o.method == "all";

  if (freq) {
    r.fits.push_back({"null", mle_null(r.family, sample)});
    r.fits.push_back({"full", mle_full(r.family, sample)});
    if (o.method != "lr") r.tests.push_back(score_test(r.family, sample, o.alpha, sided));
    if (o.method != "score") r.tests.push_back(lr_test(r.family, sample, o.alpha, sided));
  }
  if (bayes) {
    const PriorSpec prior{prior_kind_from_string(o.prior), r.family};
    const auto proposal = o.proposal == "laplace" ? ThetaProposal::Laplace : ThetaProposal::LikelihoodGamma;
    const auto seed = resolve_seed(o.seed, r.seed_generated);
    r.prior = prior.kind;
    r.seed = seed;
    r.draws = o.draws;
    r.posterior = posterior_prob_positive(r.family, sample, prior, o.draws, seed, proposal);
    r.tests.push_back(bayes_test(*r.posterior, o.alpha));
    r.posterior_quadrature = posterior_prob_positive_quadrature(r.family, sample, prior);
    r.bayes_factor = bayes_factor_positive(r.family, sample, prior, o.draws, seed);
    if (r.posterior->low_ess) r.warnings.emplace_back("importance-sampling ESS is below 1% of the draws");
    if (sided == Sidedness::TwoSided) r.warnings.emplace_back("the Bayes test is one-sided (H1: p > 0)");
  }
  r.seconds = elapsed(start);
  emit(r, o.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct IntervalOptions {
  DataOptions data;
  std::string model = "poisson";
  std::string prior = "conditional";
  std::string kind = "both";
  double level = 0.95;
  std::size_t draws = 50000;
  std::optional<std::uint64_t> seed;
  std::string out = "text";
};

int run_interval(const IntervalOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  auto [name, sample] = load(o.data);
  AnalysisReport r;
  r.command = "interval";
  r.dataset_name = name;
  r.sample = sample;
  r.family = family_from_string(o.model);
  r.prior = prior_kind_from_string(o.prior);
  r.seed = resolve_seed(o.seed, r.seed_generated);
  r.draws = o.draws;
  const auto draws = draw_posterior(r.family, sample, o.draws, *r.seed, *r.prior);
  if (o.kind == "equal" || o.kind == "both") r.intervals.push_back(credible_interval(draws, o.level));
  if (o.kind == "hpd" || o.kind == "both") r.intervals.push_back(hpd_interval(draws, sample, o.level));
  r.seconds = elapsed(start);
  emit(r, o.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct PosteriorOptions {
  DataOptions data;
  std::string model = "poisson";
  std::string prior = "conditional";
  std::size_t grid_points = 512;
  std::size_t draws = 20000;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_posterior(const PosteriorOptions& o) {
  auto [name, sample] = load(o.data);
  const auto family = family_from_string(o.model);
  bool generated = false;
  const auto seed = resolve_seed(o.seed, generated);
  const auto draws = draw_posterior(family, sample, o.draws, seed, prior_kind_from_string(o.prior));
  const auto curve = posterior_density_curve(draws, sample, o.grid_points);
  write_text_file(o.out, density_csv(curve.p, curve.density));
  std::printf("wrote %zu points to %s  dataset=%s  seed=%llu%s  draws=%zu  p in [%.4f, %.4f]  trapezoid mass=%.4f\n",
              curve.p.size(), o.out.c_str(), name.c_str(), static_cast<unsigned long long>(seed),
              generated ? " (auto-generated)" : "", o.draws, curve.p.front(), curve.p.back(), curve.trapezoid_mass);
  return 0;
}

// ---------------------------------------------------------------------------

struct PowerOptions {
  std::string config;
  std::string model;
  std::vector<double> thetas, ps;
  std::vector<std::int64_t> ns;
  std::vector<std::string> methods;
  std::optional<std::size_t> reps, draws;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
  bool compare = false;
  bool quiet = false;
};

PowerGridSpec power_spec(const PowerOptions& o, CLI::App* cmd) {
  PowerGridSpec spec = published_grid_spec();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw UsageError("cannot open power config '" + o.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("power config '" + o.config + "': " + e.what());
    }
    try {
      if (j.contains("model")) spec.family = family_from_string(j["model"].get<std::string>());
      if (j.contains("thetas")) spec.thetas = j["thetas"].get<std::vector<double>>();
      if (j.contains("ps")) spec.ps = j["ps"].get<std::vector<double>>();
      if (j.contains("ns")) spec.ns = j["ns"].get<std::vector<std::int64_t>>();
      if (j.contains("methods")) {
        spec.methods.clear();
        for (const auto& m : j["methods"]) spec.methods.push_back(power_method_from_string(m.get<std::string>()));
      }
      if (j.contains("reps")) spec.reps = j["reps"].get<std::size_t>();
      if (j.contains("draws")) spec.B = j["draws"].get<std::size_t>();
      if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
      if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("power config '" + o.config + "': " + e.what());
    }
  }
  if (!o.model.empty()) spec.family = family_from_string(o.model);
  if (cmd->count("--thetas")) spec.thetas = o.thetas;
  if (cmd->count("--ps")) spec.ps = o.ps;
  if (cmd->count("--ns")) spec.ns = o.ns;
  if (cmd->count("--methods")) {
    spec.methods.clear();
    for (const auto& m : o.methods) spec.methods.push_back(power_method_from_string(m));
  }
  if (o.reps) spec.reps = *o.reps;
  if (o.draws) spec.B = *o.draws;
  if (o.alpha) spec.alpha = *o.alpha;
  if (o.seed) spec.seed = *o.seed;
  spec.threads = o.threads;
  return spec;
}

int run_power(const PowerOptions& o, CLI::App* cmd) {
  const auto spec = power_spec(o, cmd);
  ProgressFn progress;
  if (!o.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\r  design points %zu/%zu", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  std::printf("power study: model=%s reps=%zu draws=%zu alpha=%.3f seed=%llu\n",
              std::string(to_string(spec.family)).c_str(), spec.reps, spec.B, spec.alpha,
              static_cast<unsigned long long>(spec.seed));
  const auto grid = run_power_study(spec, progress);
  const auto has = [&](PowerMethod m) {
    return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end();
  };
  // One-sided block, then the two-sided block when a two-sided method was run.
  for (const auto& block : {std::vector{PowerMethod::Score1, PowerMethod::Bayes, PowerMethod::LR1},
                            std::vector{PowerMethod::Score2, PowerMethod::Bayes, PowerMethod::LR2}}) {
    if (block[0] == PowerMethod::Score2 && !has(PowerMethod::Score2) && !has(PowerMethod::LR2)) continue;
    std::vector<PowerMethod> shown;
    for (auto m : block)
      if (has(m)) shown.push_back(m);
    if (!shown.empty()) std::printf("\n%s", format_power_table(grid, shown).c_str());
  }
  std::printf("\n%zu all-zero samples redrawn; %.1f s\n", grid.redraws, grid.seconds);
  if (!o.out.empty()) write_text_file(o.out, power_grid_csv(grid));
  if (o.compare) {
    std::printf("\none-sided reference table:\n%s",
                format_comparison(compare_tables(grid, published_power_one_sided())).c_str());
    std::printf("\ntwo-sided reference table:\n%s",
                format_comparison(compare_tables(grid, published_power_two_sided())).c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

int run_datasets_show(const std::string& name) {
  for (const auto& d : embedded_datasets()) {
    if (!name.empty() && d.name != name) continue;
    const auto& checked = embedded_dataset(d.name);
    std::printf("%s: %s\n  fingerprint %016llx\n  value  count\n", checked.name.c_str(),
                checked.description.c_str(), static_cast<unsigned long long>(checked.pinned_hash));
    for (const auto& [v, c] : checked.sample.frequencies()) {
      std::printf("  %5lld  %5lld\n", static_cast<long long>(v), static_cast<long long>(c));
    }
    std::printf("  n=%lld n0=%lld S=%lld\n", static_cast<long long>(checked.sample.n()),
                static_cast<long long>(checked.sample.n0()), static_cast<long long>(checked.sample.sum()));
  }
  if (!name.empty()) embedded_dataset(name);
  return 0;
}

int run_datasets_export(const std::string& name, const std::string& out) {
  const auto csv = to_frequency_csv(embedded_dataset(name).sample);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score, likelihood-ratio and Bayesian tests for zero inflation in power-series count models"};
  app.set_version_flag("--version", std::string(zips::kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> models = {"poisson", "geometric"};
  const std::vector<std::string> priors = {"conditional", "joint"};

  TestOptions test;
  auto* cmd_test = app.add_subcommand("test", "test H0: p = 0 against zero inflation");
  add_data_options(cmd_test, test.data);
  cmd_test->add_option("--model", test.model)->check(CLI::IsMember(models))->capture_default_str();
  cmd_test->add_option("--method", test.method)
      ->check(CLI::IsMember({"score", "lr", "bayes", "all"}))
      ->capture_default_str();
  cmd_test->add_option("--prior", test.prior)->check(CLI::IsMember(priors))->capture_default_str();
  cmd_test->add_option("--proposal", test.proposal, "theta proposal for importance sampling")
      ->check(CLI::IsMember({"laplace", "gamma-likelihood"}))
      ->capture_default_str();
  cmd_test->add_option("--alpha", test.alpha)->check(kOpenUnit)->capture_default_str();
  cmd_test->add_option("--sided", test.sided)->check(CLI::IsMember({"one", "two"}))->capture_default_str();
  cmd_test->add_option("--draws", test.draws)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_test->add_option("--seed", test.seed, "RNG seed; generated and reported when omitted");
  cmd_test->add_option("--out", test.out)->check(CLI::IsMember({"json", "text"}))->capture_default_str();

  IntervalOptions interval;
  auto* cmd_interval = app.add_subcommand("interval", "equal-tail and HPD credible intervals for p");
  add_data_options(cmd_interval, interval.data);
  cmd_interval->add_option("--model", interval.model)->check(CLI::IsMember(models))->capture_default_str();
  cmd_interval->add_option("--prior", interval.prior)->check(CLI::IsMember(priors))->capture_default_str();
  cmd_interval->add_option("--kind", interval.kind)
      ->check(CLI::IsMember({"equal", "hpd", "both"}))
      ->capture_default_str();
  cmd_interval->add_option("--level", interval.level)->check(kOpenUnit)->capture_default_str();
  cmd_interval->add_option("--draws", interval.draws)->check(CLI::Range(2, 100000000))->capture_default_str();
  cmd_interval->add_option("--seed", interval.seed, "RNG seed; generated and reported when omitted");
  cmd_interval->add_option("--out", interval.out)->check(CLI::IsMember({"json", "text"}))->capture_default_str();

  PosteriorOptions posterior;
  auto* cmd_posterior = app.add_subcommand("posterior", "export the marginal posterior density of p as CSV");
  add_data_options(cmd_posterior, posterior.data);
  cmd_posterior->add_option("--model", posterior.model)->check(CLI::IsMember(models))->capture_default_str();
  cmd_posterior->add_option("--prior", posterior.prior)->check(CLI::IsMember(priors))->capture_default_str();
  cmd_posterior->add_option("--grid-points", posterior.grid_points)
      ->check(CLI::Range(16, 1000000))
      ->capture_default_str();
  cmd_posterior->add_option("--draws", posterior.draws)->check(CLI::Range(2, 100000000))->capture_default_str();
  cmd_posterior->add_option("--seed", posterior.seed, "RNG seed; generated and reported when omitted");
  cmd_posterior->add_option("--out", posterior.out, "output CSV path (p,density)")->required();

  PowerOptions power;
  auto* cmd_power = app.add_subcommand("power", "Monte Carlo power study over a (theta, p, n) grid");
  cmd_power->add_option("--config", power.config, "JSON grid description")->check(CLI::ExistingFile);
  cmd_power->add_option("--model", power.model)->check(CLI::IsMember(models));
  cmd_power->add_option("--thetas", power.thetas)->delimiter(',');
  cmd_power->add_option("--ps", power.ps)->delimiter(',');
  cmd_power->add_option("--ns", power.ns)->delimiter(',');
  cmd_power->add_option("--methods", power.methods, "score1, score2, lr1, lr2, bayes")->delimiter(',');
  cmd_power->add_option("--reps", power.reps);
  cmd_power->add_option("--draws", power.draws);
  cmd_power->add_option("--alpha", power.alpha)->check(kOpenUnit);
  cmd_power->add_option("--seed", power.seed);
  cmd_power->add_option("--threads", power.threads, "worker threads (0: all cores)");
  cmd_power->add_option("--out", power.out, "CSV path (method,theta,p,n,power,mc_se)");
  cmd_power->add_flag("--compare-published", power.compare, "compare against the embedded published power tables");
  cmd_power->add_flag("--quiet", power.quiet, "no progress output");

  auto* cmd_datasets = app.add_subcommand("datasets", "embedded datasets");
  cmd_datasets->require_subcommand(1);
  std::string show_name, export_name, export_out;
  auto* cmd_show = cmd_datasets->add_subcommand("show", "print embedded frequency tables");
  cmd_show->add_option("name", show_name)->check(CLI::IsMember({"uti", "terror", "cholera"}));
  auto* cmd_export = cmd_datasets->add_subcommand("export", "write an embedded dataset as value,count CSV");
  cmd_export->add_option("name", export_name)->required()->check(CLI::IsMember({"uti", "terror", "cholera"}));
  cmd_export->add_option("--out", export_out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (cmd_test->parsed()) return run_test(test);
    if (cmd_interval->parsed()) return run_interval(interval);
    if (cmd_posterior->parsed()) return run_posterior(posterior);
    if (cmd_power->parsed()) return run_power(power, cmd_power);
    if (cmd_show->parsed()) return run_datasets_show(show_name);
    if (cmd_export->parsed()) return run_datasets_export(export_name, export_out);
  } catch (const DegenerateSample& e) {
    std::cerr << "degenerate data: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParameterOutOfRange& e) {
    std::cerr << "parameter out of range: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
