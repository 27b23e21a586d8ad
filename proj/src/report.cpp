#include "zips/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace zips {

namespace {

using nlohmann::json;

// JSON has no infinities; boundary estimates such as p_hat = -inf become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string_view boundary_name(MleBoundary b) {
  switch (b) {
    case MleBoundary::None: return "interior";
    case MleBoundary::NoZeros: return "no-zeros";
    case MleBoundary::ThetaAtZero: return "theta-at-zero";
  }
  return "?";
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

json test_json(const TestReport& t) {
  json j = {{"method", to_string(t.method)},
            {"sidedness", to_string(t.sidedness)},
            {"statistic", number(t.statistic)},
            {"signed_root", number(t.signed_root)},
            {"alpha", t.alpha},
            {"reject", t.reject},
            {"notes", t.notes}};
  j["p_value"] = t.p_value ? number(*t.p_value) : json(nullptr);
  j["posterior_prob"] = t.posterior_prob ? number(*t.posterior_prob) : json(nullptr);
  return j;
}

json interval_json(const IntervalEstimate& e) {
  json j = {{"kind", to_string(e.kind)}, {"level", e.level},        {"lower", e.lower},
            {"upper", e.upper},          {"multimodal", e.multimodal}, {"warnings", e.warnings}};
  j["density_threshold"] = e.density_threshold ? json(*e.density_threshold) : json(nullptr);
  return j;
}

json posterior_json(const PosteriorProbability& p) {
  return {{"value", p.value},       {"mc_se", p.mc_se},         {"ess", p.ess}, {"draws", p.draws},
          {"seed", p.seed},         {"proposal", to_string(p.proposal)}, {"low_ess", p.low_ess}};
}

}  // namespace

nlohmann::json to_json(const AnalysisReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", "zips"}, {"version", kVersion}};
  j["command"] = r.command;
  j["model"] = to_string(r.family);
  j["prior"] = r.prior ? json(to_string(*r.prior)) : json(nullptr);
  json freq = json::array();
  for (const auto& [v, c] : r.sample.frequencies()) freq.push_back({v, c});
  j["dataset"] = {{"name", r.dataset_name}, {"n", r.sample.n()},       {"n0", r.sample.n0()},
                  {"S", r.sample.sum()},    {"mean", r.sample.mean()}, {"frequencies", freq}};
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["seed_generated"] = r.seed_generated;
  j["draws"] = r.draws;
  j["fits"] = json::array();
  for (const auto& f : r.fits) {
    j["fits"].push_back({{"label", f.label},
                         {"p_hat", number(f.fit.p_hat)},
                         {"theta_hat", number(f.fit.theta_hat)},
                         {"loglik", number(f.fit.loglik)},
                         {"converged", f.fit.converged},
                         {"iterations", f.fit.iterations},
                         {"boundary", boundary_name(f.fit.boundary)}});
  }
  j["tests"] = json::array();
  for (const auto& t : r.tests) j["tests"].push_back(test_json(t));
  j["posterior"] = r.posterior ? posterior_json(*r.posterior) : json(nullptr);
  if (r.posterior_quadrature) {
    j["posterior_quadrature"] = {{"value", r.posterior_quadrature->value},
                                 {"abs_error", r.posterior_quadrature->abs_error},
                                 {"converged", r.posterior_quadrature->converged}};
  } else {
    j["posterior_quadrature"] = nullptr;
  }
  if (r.bayes_factor) {
    const auto& bf = *r.bayes_factor;
    j["bayes_factor"] = {{"value", number(bf.value)},
                         {"lower_bound", bf.lower_bound},
                         {"prior_prob_positive", bf.prior_prob},
                         {"theta_window", {bf.window.lower, bf.window.upper}},
                         {"authoritative", false},
                         {"note", "posterior odds over prior odds with theta truncated to the window"}};
  } else {
    j["bayes_factor"] = nullptr;
  }
  j["intervals"] = json::array();
  for (const auto& e : r.intervals) j["intervals"].push_back(interval_json(e));
  j["warnings"] = r.warnings;
  j["timing_seconds"] = r.seconds;
  return j;
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream out;
  out << "zips " << kVersion << "  " << r.command << "  model=" << to_string(r.family);
  if (r.prior) out << "  prior=" << to_string(*r.prior);
  out << "\n";
  if (r.seed) {
    out << "seed: " << *r.seed << (r.seed_generated ? " (auto-generated)" : "") << "  draws: " << r.draws << "\n";
  }
  out << "dataset: " << r.dataset_name << "  n=" << r.sample.n() << " n0=" << r.sample.n0()
      << " S=" << r.sample.sum() << " mean=" << fmt(r.sample.mean()) << "\n";
  for (const auto& f : r.fits) {
    out << "  mle " << f.label << ": p_hat=" << fmt(f.fit.p_hat) << " theta_hat=" << fmt(f.fit.theta_hat)
        << " loglik=" << fmt(f.fit.loglik);
    if (f.fit.boundary != MleBoundary::None) out << " [" << boundary_name(f.fit.boundary) << "]";
    out << "\n";
  }
  for (const auto& t : r.tests) {
    out << "  " << to_string(t.method) << " (" << to_string(t.sidedness) << "): statistic=" << fmt(t.statistic)
        << " signed_root=" << fmt(t.signed_root);
    if (t.p_value) out << " p_value=" << fmt(*t.p_value);
    if (t.posterior_prob) out << " P(p>0|y)=" << fmt(*t.posterior_prob);
    out << " alpha=" << fmt(t.alpha) << " -> " << (t.reject ? "reject H0" : "do not reject H0") << "\n";
    for (const auto& note : t.notes) out << "    note: " << note << "\n";
  }
  if (r.posterior) {
    const auto& p = *r.posterior;
    out << "  posterior: P(p>0|y)=" << fmt(p.value) << " mc_se=" << fmt(p.mc_se) << " ess=" << fmt(p.ess)
        << " draws=" << p.draws << " seed=" << p.seed << " proposal=" << to_string(p.proposal) << "\n";
  }
  if (r.posterior_quadrature) {
    out << "  quadrature: P(p>0|y)=" << fmt(r.posterior_quadrature->value) << "\n";
  }
  if (r.bayes_factor) {
    const auto& bf = *r.bayes_factor;
    out << "  bayes factor (non-authoritative): " << (bf.lower_bound ? ">= " : "") << fmt(bf.value)
        << "  prior P(p>0)=" << fmt(bf.prior_prob) << " theta window (" << fmt(bf.window.lower) << ", "
        << fmt(bf.window.upper) << ")\n";
  }
  for (const auto& e : r.intervals) {
    out << "  " << to_string(e.kind) << " " << fmt(100.0 * e.level) << "% interval: (" << fmt(e.lower) << ", "
        << fmt(e.upper) << ")";
    if (e.density_threshold) out << " pi_alpha=" << fmt(*e.density_threshold);
    out << "\n";
    for (const auto& w : e.warnings) out << "    warning: " << w << "\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << "time: " << fmt(r.seconds) << " s\n";
  return out.str();
}

nlohmann::json to_json(const PowerGrid& grid) {
  const auto& s = grid.spec;
  json methods = json::array();
  for (auto m : s.methods) methods.push_back(to_string(m));
  json j = {{"model", to_string(s.family)},
            {"thetas", s.thetas},
            {"ps", s.ps},
            {"ns", s.ns},
            {"methods", methods},
            {"reps", s.reps},
            {"draws", s.B},
            {"alpha", s.alpha},
            {"seed", s.seed},
            {"redraws", grid.redraws},
            {"timing_seconds", grid.seconds}};
  j["cells"] = json::array();
  for (const auto& c : grid.cells) {
    j["cells"].push_back({{"method", to_string(c.method)},
                          {"theta", c.theta},
                          {"p", c.p},
                          {"n", c.n},
                          {"power", c.power},
                          {"mc_se", c.mc_se}});
  }
  return j;
}

}  // namespace zips
