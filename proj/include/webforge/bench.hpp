#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "webforge/core.hpp"
#include "webforge/planner.hpp"
#include "webforge/providers.hpp"
#include "webforge/util.hpp"

// Benchmark construction: sample scenario dimensions from token catalogs,
// expand each scenario into a full design brief, filter briefs through the
// plan-format validator, and summarize the surviving dataset. Everything is
// deterministic under a fixed seed and mock providers.

namespace webforge::bench {

inline const std::vector<std::string>& modality_names() {
  static const std::vector<std::string> v{"text", "images", "videos", "charts"};
  return v;
}

// Token catalogs for the three categorical dimensions plus the per-modality
// inclusion probabilities (indexed like modality_names). Users extend these
// through configuration; the defaults seed the documented starter vocabulary.
struct Catalogs {
  std::vector<std::string> layout_complexity;
  std::vector<std::string> visual_styles;
  std::vector<std::string> semantic_intents;
  std::array<double, 4> modality_probability{0.6, 0.6, 0.6, 0.6};
};

inline Catalogs default_catalogs() {
  Catalogs c;
  c.layout_complexity = {"single-column", "multi-column grid", "hierarchical"};
  c.visual_styles = {"minimal", "editorial", "playful", "swiss-style", "brutalist", "cinematic"};
  c.semantic_intents = {"landing page", "dashboard",  "portfolio", "informational",
                        "analytical",   "commercial", "creative"};
  return c;
}

inline void validate_catalogs(const Catalogs& c) {
  if (c.layout_complexity.empty()) throw ConfigError("empty catalog: layout_complexity");
  if (c.visual_styles.empty()) throw ConfigError("empty catalog: visual_styles");
  if (c.semantic_intents.empty()) throw ConfigError("empty catalog: semantic_intents");
  bool any_positive = false;
  for (double p : c.modality_probability) {
    if (p < 0.0 || p > 1.0)
      throw ConfigError("modality probability out of [0, 1]: " + format_compact(p));
    if (p > 0.0) any_positive = true;
  }
  if (!any_positive) throw ConfigError("modality probabilities are all zero");
}

inline ordered_json catalogs_to_json(const Catalogs& c) {
  ordered_json j;
  j["layout_complexity"] = c.layout_complexity;
  j["visual_styles"] = c.visual_styles;
  j["semantic_intents"] = c.semantic_intents;
  ordered_json probs;
  for (size_t i = 0; i < modality_names().size(); ++i)
    probs[modality_names()[i]] = c.modality_probability[i];
  j["modality_probability"] = probs;
  return j;
}

// Missing keys keep their defaults, so a config file may override one catalog.
inline Catalogs catalogs_from_json(const nlohmann::json& j) {
  Catalogs c = default_catalogs();
  auto read_tokens = [&](const char* key, std::vector<std::string>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw SchemaError(std::string(key) + " must be an array", key);
    out.clear();
    for (const auto& t : j[key]) {
      if (!t.is_string()) throw SchemaError(std::string(key) + " tokens must be strings", key);
      out.push_back(t.get<std::string>());
    }
  };
  read_tokens("layout_complexity", c.layout_complexity);
  read_tokens("visual_styles", c.visual_styles);
  read_tokens("semantic_intents", c.semantic_intents);
  if (j.contains("modality_probability")) {
    const auto& probs = j["modality_probability"];
    if (!probs.is_object())
      throw SchemaError("modality_probability must be an object", "modality_probability");
    for (size_t i = 0; i < modality_names().size(); ++i)
      if (probs.contains(modality_names()[i]))
        c.modality_probability[i] = probs[modality_names()[i]].get<double>();
  }
  return c;
}

// One sampled scenario: three categorical tokens plus a non-empty modality
// subset kept in canonical order.
struct ScenarioSpec {
  std::string layout_complexity;
  std::string visual_style;
  std::vector<std::string> multimodal_elements;
  std::string semantic_intent;
};

inline void validate_scenario(const ScenarioSpec& spec) {
  if (spec.layout_complexity.empty() || spec.visual_style.empty() ||
      spec.semantic_intent.empty())
    throw std::invalid_argument("scenario has an empty dimension");
  if (spec.multimodal_elements.empty())
    throw std::invalid_argument("scenario has no multimodal elements");
  const auto& known = modality_names();
  for (const auto& e : spec.multimodal_elements)
    if (std::find(known.begin(), known.end(), e) == known.end())
      throw std::invalid_argument("unknown multimodal element: " + e);
}

namespace detail {

// Unbiased bounded draw straight off the 64-bit stream, so sampling stays
// reproducible across standard-library implementations.
inline size_t uniform_index(std::mt19937_64& rng, size_t n) {
  uint64_t nn = n;
  uint64_t min = (0 - nn) % nn;
  uint64_t v = rng();
  while (v < min) v = rng();
  return size_t(v % nn);
}

inline double uniform_unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& tokens) {
  return tokens[uniform_index(rng, tokens.size())];
}

}  // namespace detail

inline ScenarioSpec sample_scenario(std::mt19937_64& rng, const Catalogs& catalogs) {
  validate_catalogs(catalogs);
  ScenarioSpec spec;
  spec.layout_complexity = detail::pick(rng, catalogs.layout_complexity);
  spec.visual_style = detail::pick(rng, catalogs.visual_styles);
  spec.semantic_intent = detail::pick(rng, catalogs.semantic_intents);
  while (spec.multimodal_elements.empty()) {
    for (size_t i = 0; i < modality_names().size(); ++i)
      if (detail::uniform_unit(rng) < catalogs.modality_probability[i])
        spec.multimodal_elements.push_back(modality_names()[i]);
  }
  return spec;
}

// Scenario-to-brief expansion prompt. This instruction text is original to
// this implementation; only its placeholder grammar is shared with the
// planner so the resulting briefs stay machine-checkable.
inline constexpr const char* kScenarioExpansionSystem =
    "You expand a structured webpage scenario into a complete natural-language design "
    "brief. Describe the page content, structure, and visual direction so a layout "
    "planner can work from the text alone. Reference every multimodal element inline "
    "using the form (path: assets/<name>.<ext>, width: <W>px, height: <H>px) with .png "
    "for images, .mp4 for videos, and .html for charts. When charts are requested, "
    "include the underlying dataset as a markdown table. Mention only the element "
    "types listed in the scenario, and keep the brief under 400 words.";

inline providers::ToolRequest build_expansion_request(const ScenarioSpec& spec) {
  validate_scenario(spec);
  providers::ToolRequest req;
  req.tag = "scenario_expansion";
  req.system = kScenarioExpansionSystem;
  req.user = "Layout complexity: " + spec.layout_complexity +
             "\nVisual style: " + spec.visual_style +
             "\nSemantic intent: " + spec.semantic_intent +
             "\nMultimodal elements: " + join(spec.multimodal_elements, ", ") + "\n";
  req.extra["layout_complexity"] = spec.layout_complexity;
  req.extra["visual_style"] = spec.visual_style;
  req.extra["semantic_intent"] = spec.semantic_intent;
  req.extra["elements"] = join(spec.multimodal_elements, ", ");
  return req;
}

inline std::string expand_scenario(const providers::ToolProvider& judge,
                                   const ScenarioSpec& spec) {
  auto resp = providers::call_provider(judge, build_expansion_request(spec));
  if (trim(resp.text).empty())
    throw GenerationError("scenario expansion returned an empty brief");
  return resp.text;
}

enum class CaseStatus { draft, validated, rejected };

inline std::string case_status_name(CaseStatus s) {
  switch (s) {
    case CaseStatus::draft: return "draft";
    case CaseStatus::validated: return "validated";
    case CaseStatus::rejected: return "rejected";
  }
  throw std::invalid_argument("unknown case status");
}

inline CaseStatus parse_case_status(const std::string& s) {
  if (s == "draft") return CaseStatus::draft;
  if (s == "validated") return CaseStatus::validated;
  if (s == "rejected") return CaseStatus::rejected;
  throw SchemaError("unknown case status: " + s, "status");
}

// A benchmark case. The format filter attaches the parsed plan on success and
// the violation list on rejection; manual curation later flips status fields
// without re-running the filter.
struct BenchCase {
  std::string id;
  ScenarioSpec scenario;
  std::string design_prompt;
  CaseStatus status = CaseStatus::draft;
  std::vector<planner::PlanViolation> violations;
  std::optional<planner::GenerationPlan> plan;
};

inline BenchCase filter_case(const BenchCase& c, const providers::ToolProvider& planner_provider) {
  BenchCase out = c;
  if (c.status != CaseStatus::draft) return out;
  try {
    auto [system, user] = planner::build_planner_request(c.design_prompt);
    providers::ToolRequest req;
    req.tag = "plan";
    req.system = system;
    req.user = user;
    auto resp = providers::call_provider(planner_provider, req);
    auto plan = planner::parse_plan(resp.text);
    auto violations = planner::validate_plan(plan);
    auto cross = planner::cross_check(plan);
    violations.insert(violations.end(), cross.begin(), cross.end());
    if (violations.empty()) {
      out.status = CaseStatus::validated;
      out.violations.clear();
      out.plan = std::move(plan);
    } else {
      out.status = CaseStatus::rejected;
      out.violations = std::move(violations);
      out.plan.reset();
    }
  } catch (const std::exception& e) {
    out.status = CaseStatus::rejected;
    out.violations = {{"planner failure", "", e.what()}};
    out.plan.reset();
  }
  return out;
}

inline BenchCase filter_case(const BenchCase& c, const providers::ProviderSet& providers) {
  return filter_case(c, providers.get("planner"));
}

// Dataset summary: status partition plus distributions over the categorical
// dimensions, modality membership, and per-element type tokens read from the
// attached plans (image and video types use the planned visual style; chart
// types use the planned chart type).
struct BenchStats {
  int total = 0;
  int draft = 0;
  int validated = 0;
  int rejected = 0;
  std::map<std::string, int> by_semantic_intent;
  std::map<std::string, int> by_visual_style;
  std::map<std::string, int> by_layout_complexity;
  std::map<std::string, int> by_modality;
  std::map<std::string, int> image_types;
  std::map<std::string, int> video_types;
  std::map<std::string, int> chart_types;
};

inline BenchStats compute_stats(const std::vector<BenchCase>& cases) {
  BenchStats s;
  s.total = int(cases.size());
  for (const auto& c : cases) {
    switch (c.status) {
      case CaseStatus::draft: ++s.draft; break;
      case CaseStatus::validated: ++s.validated; break;
      case CaseStatus::rejected: ++s.rejected; break;
    }
    ++s.by_semantic_intent[c.scenario.semantic_intent];
    ++s.by_visual_style[c.scenario.visual_style];
    ++s.by_layout_complexity[c.scenario.layout_complexity];
    for (const auto& m : c.scenario.multimodal_elements) ++s.by_modality[m];
    if (!c.plan) continue;
    for (const auto& p : c.plan->image_generation)
      ++s.image_types[p.compiled_attributes.visual_style];
    for (const auto& p : c.plan->video_generation)
      ++s.video_types[p.compiled_attributes.visual_style];
    for (const auto& p : c.plan->data_visualization)
      ++s.chart_types[p.compiled_attributes.chart_type];
  }
  return s;
}

inline ordered_json stats_to_json(const BenchStats& s) {
  auto counts = [](const std::map<std::string, int>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
  };
  ordered_json j;
  j["total"] = s.total;
  j["by_status"] = {{"draft", s.draft}, {"validated", s.validated}, {"rejected", s.rejected}};
  j["by_semantic_intent"] = counts(s.by_semantic_intent);
  j["by_visual_style"] = counts(s.by_visual_style);
  j["by_layout_complexity"] = counts(s.by_layout_complexity);
  j["by_modality"] = counts(s.by_modality);
  j["image_types"] = counts(s.image_types);
  j["video_types"] = counts(s.video_types);
  j["chart_types"] = counts(s.chart_types);
  return j;
}

inline ordered_json scenario_to_json(const ScenarioSpec& spec) {
  ordered_json j;
  j["layout_complexity"] = spec.layout_complexity;
  j["visual_style"] = spec.visual_style;
  j["multimodal_elements"] = spec.multimodal_elements;
  j["semantic_intent"] = spec.semantic_intent;
  return j;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  spec.layout_complexity = j.at("layout_complexity").get<std::string>();
  spec.visual_style = j.at("visual_style").get<std::string>();
  for (const auto& e : j.at("multimodal_elements"))
    spec.multimodal_elements.push_back(e.get<std::string>());
  spec.semantic_intent = j.at("semantic_intent").get<std::string>();
  validate_scenario(spec);
  return spec;
}

inline ordered_json case_to_json(const BenchCase& c) {
  ordered_json j;
  j["id"] = c.id;
  j["scenario"] = scenario_to_json(c.scenario);
  j["design_prompt"] = c.design_prompt;
  j["status"] = case_status_name(c.status);
  if (!c.violations.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : c.violations)
      arr.push_back({{"code", v.code}, {"path", v.path}, {"message", v.message}});
    j["violations"] = arr;
  }
  if (c.plan) j["plan"] = planner::serialize_plan(*c.plan);
  return j;
}

inline BenchCase case_from_json(const nlohmann::json& j) {
  BenchCase c;
  c.id = j.at("id").get<std::string>();
  c.scenario = scenario_from_json(j.at("scenario"));
  c.design_prompt = j.at("design_prompt").get<std::string>();
  c.status = parse_case_status(j.at("status").get<std::string>());
  if (j.contains("violations"))
    for (const auto& v : j["violations"])
      c.violations.push_back({v.at("code").get<std::string>(), v.at("path").get<std::string>(),
                              v.at("message").get<std::string>()});
  if (j.contains("plan")) c.plan = planner::parse_plan(j["plan"].dump());
  return c;
}

inline std::filesystem::path case_file(const std::filesystem::path& dir, const BenchCase& c) {
  if (c.id.empty()) throw std::invalid_argument("case has no id");
  return dir / (c.id + ".json");
}

inline void save_case(const std::filesystem::path& dir, const BenchCase& c) {
  write_file(case_file(dir, c), case_to_json(c).dump(2) + "\n");
}

inline BenchCase load_case(const std::filesystem::path& file) {
  return case_from_json(nlohmann::json::parse(read_file(file)));
}

// Benchmark directory layout: cases/<id>.json per case plus stats.json.
inline void save_benchmark(const std::filesystem::path& dir,
                           const std::vector<BenchCase>& cases) {
  auto cases_dir = dir / "cases";
  std::filesystem::create_directories(cases_dir);
  for (const auto& c : cases) save_case(cases_dir, c);
  write_file(dir / "stats.json", stats_to_json(compute_stats(cases)).dump(2) + "\n");
}

inline std::vector<BenchCase> load_benchmark(const std::filesystem::path& dir) {
  auto cases_dir = dir / "cases";
  if (!std::filesystem::exists(cases_dir))
    throw ConfigError("benchmark directory has no cases/: " + dir.string());
  std::vector<BenchCase> out;
  for (const auto& name : list_dir_sorted(cases_dir))
    if (name.size() > 5 && name.ends_with(".json")) out.push_back(load_case(cases_dir / name));
  return out;
}

inline std::string case_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case-%04d", index);
  return buf;
}

struct BuildOptions {
  int n = 120;
  uint64_t seed = 0;
  int jobs = 1;
  Catalogs catalogs = default_catalogs();
};

// Sampling draws from one sequential stream; expansion and filtering are
// independent per case, so they fan out across jobs without changing output.
inline std::vector<BenchCase> build_benchmark(const providers::ProviderSet& providers,
                                              const BuildOptions& opts) {
  if (opts.n < 0) throw std::invalid_argument("case count must be non-negative");
  validate_catalogs(opts.catalogs);
  std::mt19937_64 rng(opts.seed);
  std::vector<ScenarioSpec> specs;
  specs.reserve(size_t(opts.n));
  for (int i = 0; i < opts.n; ++i) specs.push_back(sample_scenario(rng, opts.catalogs));

  const auto& judge = providers.get("judge");
  const auto& planner_provider = providers.get("planner");
  std::vector<BenchCase> cases(specs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < specs.size();) {
      BenchCase c;
      c.id = case_id(int(i) + 1);
      c.scenario = specs[i];
      c.design_prompt = expand_scenario(judge, specs[i]);
      cases[i] = filter_case(c, planner_provider);
    }
  };
  if (opts.jobs <= 1 || specs.size() < 2) {
    worker();
  } else {
    size_t fanout = std::min(size_t(opts.jobs), specs.size());
    std::vector<std::future<void>> futures;
    futures.reserve(fanout);
    for (size_t k = 0; k < fanout; ++k)
      futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
  }
  return cases;
}

// Chi-square goodness of fit against the uniform distribution, with the
// p-value computed from the regularized upper incomplete gamma function.
namespace detail {

inline double lower_gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double upper_gamma_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

inline double regularized_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma argument must be non-negative");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::lower_gamma_series(a, x);
  return detail::upper_gamma_fraction(a, x);
}

inline double chi_square_statistic(const std::vector<int>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("need at least two categories");
  long long total = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("no observations");
  double expected = double(total) / double(counts.size());
  double stat = 0.0;
  for (int c : counts) {
    double diff = double(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

inline double chi_square_p_value(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("degrees of freedom must be positive");
  return regularized_gamma_q(double(dof) / 2.0, statistic / 2.0);
}

inline double chi_square_uniform_p(const std::vector<int>& counts) {
  return chi_square_p_value(chi_square_statistic(counts), int(counts.size()) - 1);
}

}  // namespace webforge::bench
