#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "webforge/assembler.hpp"
#include "webforge/bench.hpp"
#include "webforge/core.hpp"
#include "webforge/evaluator.hpp"
#include "webforge/generators.hpp"
#include "webforge/planner.hpp"
#include "webforge/providers.hpp"
#include "webforge/reflector.hpp"
#include "webforge/renderer.hpp"
#include "webforge/util.hpp"

// Operator entry points behind the CLI: resolve configuration (flags over
// environment over file), run the full generation pipeline with per-stage
// cost accounting, evaluate existing sites, and drive benchmark construction
// and batch runs. Every command returns a stable exit code and leaves a
// machine-readable error report on fatal failure.

namespace webforge::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEnvironment = 3;
inline constexpr int kExitProvider = 4;

// Missing inputs, unreachable browsers, unwritable directories.
struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageTiming {
  std::string stage;
  double wall_s = 0;
  double cost_estimate = 0;
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> v{"planner", "global",     "image",
                                          "video",   "chart", "reflection"};
  return v;
}

// Everything the commands need beyond the engine RunConfig.
struct AppConfig {
  RunConfig run;
  bench::Catalogs catalogs = bench::default_catalogs();
  std::string browser_endpoint;  // WEBFORGE_BROWSER_ENDPOINT wins over this
  bool reflect = true;
  int jobs = 1;
  uint64_t seed = 0;
  int bench_n = 120;
};

inline Rational alpha_from_double(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  return Rational(int64_t(std::llround(v * 1000000.0)), 1000000);
}

inline Viewport parse_viewport(const std::string& spec) {
  try {
    auto [w, h] = parse_dims(spec);
    return {w, h};
  } catch (const SchemaError&) {
    throw std::invalid_argument("viewport must look like 1280x800, got: " + spec);
  }
}

inline AppConfig app_config_from_json(const nlohmann::json& j) {
  AppConfig app;
  try {
    if (j.contains("alpha")) app.run.alpha = alpha_from_double(j["alpha"].get<double>());
    if (j.contains("max_reflection_iterations")) {
      app.run.max_reflection_iterations = j["max_reflection_iterations"].get<int>();
      if (app.run.max_reflection_iterations < 0)
        throw ConfigError("max_reflection_iterations must be >= 0");
    }
    if (j.contains("viewport")) {
      app.run.viewport.width_px = j["viewport"].at("width_px").get<int>();
      app.run.viewport.height_px = j["viewport"].at("height_px").get<int>();
    }
    if (j.contains("default_chart_iframe_height_px"))
      app.run.default_chart_iframe_height_px = j["default_chart_iframe_height_px"].get<int>();
    if (j.contains("parallel_fanout")) app.run.parallel_fanout = j["parallel_fanout"].get<bool>();
    if (j.contains("providers")) {
      for (const auto& [kind, pj] : j["providers"].items()) {
        ProviderConfig pc;
        pc.mode = pj.value("mode", pc.mode);
        pc.endpoint = pj.value("endpoint", pc.endpoint);
        pc.api_key = pj.value("api_key", pc.api_key);
        pc.model = pj.value("model", pc.model);
        pc.simulated_latency_s = pj.value("simulated_latency_s", pc.simulated_latency_s);
        app.run.providers[kind] = pc;
      }
    }
    if (j.contains("catalogs")) app.catalogs = bench::catalogs_from_json(j["catalogs"]);
    if (j.contains("browser_endpoint"))
      app.browser_endpoint = j["browser_endpoint"].get<std::string>();
    if (j.contains("reflect")) app.reflect = j["reflect"].get<bool>();
    if (j.contains("jobs")) app.jobs = j["jobs"].get<int>();
    if (j.contains("seed")) app.seed = j["seed"].get<uint64_t>();
    if (j.contains("bench_n")) app.bench_n = j["bench_n"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return app;
}

inline AppConfig load_app_config(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file))
    throw ConfigError("config file not found: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  return app_config_from_json(j);
}

// Command-line values; set fields override whatever the config file said.
struct FlagOverrides {
  std::optional<double> alpha;
  std::optional<int> max_iters;
  std::optional<std::string> viewport;
  std::optional<bool> no_reflect;
  std::optional<int> jobs;
  std::optional<uint64_t> seed;
  std::optional<std::string> providers_mode;  // mock | mock:<profile> | live
  std::optional<int> bench_n;
};

inline AppConfig resolve_app_config(const std::optional<std::filesystem::path>& config_file,
                                    const FlagOverrides& flags) {
  AppConfig app = config_file ? load_app_config(*config_file) : AppConfig{};
  if (flags.alpha) app.run.alpha = alpha_from_double(*flags.alpha);
  if (flags.max_iters) {
    if (*flags.max_iters < 0) throw std::invalid_argument("--max-iters must be >= 0");
    app.run.max_reflection_iterations = *flags.max_iters;
  }
  if (flags.viewport) app.run.viewport = parse_viewport(*flags.viewport);
  if (flags.no_reflect) app.reflect = !*flags.no_reflect;
  if (flags.jobs) {
    if (*flags.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
    app.jobs = *flags.jobs;
  }
  if (flags.seed) app.seed = *flags.seed;
  if (flags.providers_mode) {
    for (const auto& kind : providers::provider_kinds())
      app.run.providers[kind].mode = *flags.providers_mode;
  }
  if (flags.bench_n) {
    if (*flags.bench_n < 0) throw std::invalid_argument("--n must be >= 0");
    app.bench_n = *flags.bench_n;
  }
  return app;
}

// Environment API keys win over config-file keys; live providers must end up
// with one so failures surface before any work starts.
inline providers::ProviderSet build_providers(const AppConfig& app) {
  RunConfig cfg = app.run;
  for (const auto& kind : providers::provider_kinds()) {
    auto& pc = cfg.providers[kind];
    if (pc.mode != "live") continue;
    std::string env_key = providers::env_api_key(kind);
    if (!env_key.empty()) pc.api_key = env_key;
    if (pc.api_key.empty()) {
      std::string var = "WEBFORGE_";
      for (char c : kind) var += char(std::toupper(static_cast<unsigned char>(c)));
      var += "_KEY";
      throw ConfigError("live provider " + kind + " has no API key: set " + var);
    }
  }
  return providers::make_providers(cfg);
}

inline std::unique_ptr<renderer::BrowserSession> make_session(const AppConfig& app) {
  const char* env = std::getenv("WEBFORGE_BROWSER_ENDPOINT");
  std::string endpoint = env && *env ? env : app.browser_endpoint;
  if (endpoint.empty()) return renderer::make_stub_session();
  return renderer::make_cdp_session(endpoint);
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Stage seconds are reported at one-decimal precision, the same granularity
// the timing table uses; this also keeps mock workspaces byte-identical.
inline double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

inline double round_cost(double v) { return std::round(v * 10000.0) / 10000.0; }

}  // namespace detail

inline std::vector<StageTiming> stage_timings(
    double planner_s, const std::vector<generators::GenerationRecord>& records,
    double reflection_s) {
  std::map<std::string, StageTiming> by;
  for (const auto& name : stage_names()) by[name] = {name, 0, 0};
  by["planner"].wall_s = planner_s;
  for (const auto& r : records) {
    std::string stage = r.tool == "layout" ? "global" : r.tool;
    auto it = by.find(stage);
    if (it == by.end()) continue;
    it->second.wall_s += r.latency_s;
    it->second.cost_estimate += r.cost_estimate;
  }
  by["reflection"].wall_s = reflection_s;
  std::vector<StageTiming> out;
  for (const auto& name : stage_names()) {
    auto t = by[name];
    t.wall_s = detail::round_tenth(t.wall_s);
    t.cost_estimate = detail::round_cost(t.cost_estimate);
    out.push_back(std::move(t));
  }
  return out;
}

inline ordered_json timings_to_json(const std::vector<StageTiming>& timings) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : timings) {
    ordered_json j;
    j["stage"] = t.stage;
    j["wall_s"] = t.wall_s;
    j["cost_estimate"] = t.cost_estimate;
    arr.push_back(std::move(j));
  }
  return arr;
}

struct GenerateResult {
  WorkspaceManifest manifest;
  evaluator::SampleEvalReport report;
  std::vector<StageTiming> timings;
  std::vector<reflector::IterationRecord> iteration_records;
};

// The full pipeline for one page: plan, generate assets and layout in
// parallel, embed charts, verify references, evaluate, reflect, and account
// for per-stage time. Throws on any fatal step; the cmd_ wrappers translate.
inline GenerateResult generate_workspace(const std::string& design_prompt,
                                         const std::filesystem::path& out_dir,
                                         const AppConfig& app,
                                         const providers::ProviderSet& set,
                                         renderer::BrowserSession& session) {
  const RunConfig& cfg = app.run;
  auto manifest = new_workspace(out_dir, design_prompt, cfg);

  auto [system, user] = planner::build_planner_request(design_prompt);
  providers::ToolRequest plan_req;
  plan_req.tag = "plan";
  plan_req.system = system;
  plan_req.user = user;
  auto plan_start = std::chrono::steady_clock::now();
  auto plan_resp = providers::call_provider(set.get("planner"), plan_req);
  double planner_s = plan_resp.simulated_latency_s ? *plan_resp.simulated_latency_s
                                                   : detail::seconds_since(plan_start);
  auto plan = planner::parse_plan(plan_resp.text);
  if (auto v = planner::validate_plan(plan); !v.empty())
    throw GenerationError("plan failed validation: " + v.front().code + " (" +
                          v.front().message + ")");
  if (auto v = planner::cross_check(plan); !v.empty())
    throw GenerationError("plan failed cross-check: " + v.front().code + " (" +
                          v.front().message + ")");
  planner::save_plan(plan, manifest.root);

  auto [executed, records] = generators::execute_plan(plan, set, cfg, std::move(manifest));
  manifest = std::move(executed);
  for (const auto& r : records)
    if (r.outcome != "ok")
      throw GenerationError("generation failed for " + r.asset_path + ": " + r.error);
  write_file(manifest.root / "reports" / "generation.json",
             generators::records_to_json(records).dump(2) + "\n");
  manifest.reports.push_back("reports/generation.json");

  std::string doc = read_file(manifest.root / manifest.page_document_path);
  std::vector<AssetRef> charts;
  for (const auto& [path, ref] : manifest.assets)
    if (ref.kind == AssetKind::chart) charts.push_back(ref);
  doc = assembler::embed_charts(doc, charts, cfg.default_chart_iframe_height_px);
  // the embedded document is still iteration zero, so no archive here
  write_file(manifest.root / manifest.page_document_path, doc);
  manifest = assembler::write_site(std::move(manifest), doc);
  auto recon = assembler::reconcile_references(doc, manifest);
  if (!recon.missing_assets.empty())
    throw ContractError("page references missing assets: " +
                        join(recon.missing_assets, ", "));
  if (!recon.orphan_assets.empty())
    std::cerr << "warning: generated assets not referenced by the page: "
              << join(recon.orphan_assets, ", ") << "\n";

  auto planned = evaluator::planned_elements(plan);
  auto [evaluated, report] =
      evaluator::evaluate_sample(set.get("judge"), std::move(manifest), planned, session, cfg);
  manifest = std::move(evaluated);

  double reflection_s = 0;
  std::vector<reflector::IterationRecord> iteration_records;
  if (app.reflect) {
    auto reflect_start = std::chrono::steady_clock::now();
    auto outcome = reflector::run_reflection_loop(std::move(manifest), set, cfg, planned,
                                                  session, report);
    reflection_s = detail::seconds_since(reflect_start);
    manifest = std::move(outcome.manifest);
    report = std::move(outcome.final_report);
    iteration_records = std::move(outcome.records);
  }

  auto timings = stage_timings(planner_s, records, reflection_s);
  write_file(manifest.root / "reports" / "cost.json", timings_to_json(timings).dump(2) + "\n");
  manifest.reports.push_back("reports/cost.json");
  save_manifest(manifest);
  return {std::move(manifest), std::move(report), std::move(timings),
          std::move(iteration_records)};
}

namespace detail {

inline int classify_error(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const EnvironmentError*>(&e)) return kExitEnvironment;
  if (dynamic_cast<const RendererError*>(&e)) return kExitEnvironment;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitEnvironment;
  if (dynamic_cast<const GenerationError*>(&e)) return kExitProvider;
  if (dynamic_cast<const ContractError*>(&e)) return kExitProvider;
  if (dynamic_cast<const SchemaError*>(&e)) return kExitProvider;
  if (dynamic_cast<const ParseError*>(&e)) return kExitProvider;
  if (dynamic_cast<const EvalError*>(&e)) return kExitProvider;
  return kExitUsage;
}

inline const char* exit_label(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitUsage: return "usage";
    case kExitConfig: return "config";
    case kExitEnvironment: return "environment";
    case kExitProvider: return "provider";
  }
  return "unknown";
}

// Best-effort failure report beside the workspace the command was building.
inline int fail(const std::filesystem::path& report_dir, const std::exception& e) {
  int code = classify_error(e);
  std::cerr << "error (" << exit_label(code) << "): " << e.what() << "\n";
  if (!report_dir.empty()) {
    try {
      std::filesystem::create_directories(report_dir);
      ordered_json j;
      j["error"] = exit_label(code);
      j["message"] = e.what();
      j["exit_code"] = code;
      write_file(report_dir / "error.json", j.dump(2) + "\n");
    } catch (const std::exception&) {
      // the report is advisory; the exit code still carries the failure
    }
  }
  return code;
}

inline std::string score_cell(const std::optional<Rational>& v) {
  return v ? format_double(v->to_double(), 2) : std::string("n/a");
}

inline void print_report_summary(const evaluator::SampleEvalReport& report) {
  std::vector<DimensionScore> dims;
  for (int d = 0; d < 6; ++d) {
    DimensionScore ds;
    ds.dimension = Dimension(d);
    auto v = evaluator::sample_dimension_score(report, ds.dimension);
    std::cout << "  " << dimension_name(Dimension(d)) << ": " << score_cell(v) << "\n";
    if (v) {
      ds.value = *v;
      ds.sample_count = 1;
    }
    dims.push_back(ds);
  }
  std::cout << "  overall: " << format_double(aggregate_overall(dims).to_double(), 2) << "\n";
}

}  // namespace detail

inline int cmd_generate(const std::filesystem::path& prompt_file,
                        const std::filesystem::path& out_dir, const AppConfig& app) {
  try {
    if (!std::filesystem::exists(prompt_file))
      throw EnvironmentError("prompt file not found: " + prompt_file.string());
    std::string prompt = trim(read_file(prompt_file));
    if (prompt.empty()) throw std::invalid_argument("prompt file is empty");
    auto set = build_providers(app);
    auto session = make_session(app);
    auto result = generate_workspace(prompt, out_dir, app, set, *session);
    std::cout << "workspace: " << out_dir.string() << "\n"
              << "reflection iterations: " << result.iteration_records.size() << "\n";
    detail::print_report_summary(result.report);
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::fail(out_dir, e);
  }
}

namespace detail {

inline AssetKind kind_from_extension(const std::string& path) {
  auto ext = lower(std::filesystem::path(path).extension().string());
  if (ext == ".mp4" || ext == ".webm" || ext == ".mov") return AssetKind::video;
  if (ext == ".html" || ext == ".htm") return AssetKind::chart;
  return AssetKind::image;
}

// A site without a manifest still evaluates: every referenced asset that
// exists on disk counts as both present and planned.
inline WorkspaceManifest synthesize_manifest(const std::filesystem::path& site_dir,
                                             const std::string& prompt) {
  WorkspaceManifest m;
  m.root = site_dir;
  m.design_prompt = prompt;
  std::string doc = read_file(site_dir / m.page_document_path);
  for (const auto& path : assembler::extract_references(doc)) {
    if (!std::filesystem::exists(site_dir / path)) continue;
    AssetRef ref;
    ref.path = path;
    ref.kind = kind_from_extension(path);
    ref.status = AssetStatus::inserted;
    m.assets[path] = ref;
  }
  return m;
}

inline evaluator::PlannedElements planned_from_manifest(const WorkspaceManifest& m) {
  evaluator::PlannedElements out;
  for (const auto& [path, ref] : m.assets) {
    std::string desc = std::filesystem::path(path).stem().string();
    for (char& c : desc)
      if (c == '_' || c == '-') c = ' ';
    switch (ref.kind) {
      case AssetKind::image: out.images.push_back({path, desc}); break;
      case AssetKind::video: out.videos.push_back({path, desc}); break;
      case AssetKind::chart: out.charts.push_back({path, desc}); break;
    }
  }
  return out;
}

}  // namespace detail

inline int cmd_evaluate(const std::filesystem::path& site_dir,
                        const std::filesystem::path& prompt_file, const AppConfig& app) {
  try {
    if (!std::filesystem::exists(site_dir / "index.html"))
      throw EnvironmentError("site has no index.html: " + site_dir.string());
    if (!std::filesystem::exists(prompt_file))
      throw EnvironmentError("prompt file not found: " + prompt_file.string());
    std::string prompt = trim(read_file(prompt_file));
    if (prompt.empty()) throw std::invalid_argument("prompt file is empty");

    WorkspaceManifest manifest =
        std::filesystem::exists(site_dir / "manifest.json")
            ? load_manifest(site_dir)
            : detail::synthesize_manifest(site_dir, prompt);
    evaluator::PlannedElements planned =
        std::filesystem::exists(site_dir / "plan.json")
            ? evaluator::planned_elements(planner::load_plan(site_dir))
            : detail::planned_from_manifest(manifest);

    auto set = build_providers(app);
    auto session = make_session(app);
    auto [updated, report] = evaluator::evaluate_sample(set.get("judge"), std::move(manifest),
                                                        planned, *session, app.run);
    std::cout << "site: " << site_dir.string() << "\n"
              << "report: " << updated.reports.back() << "\n";
    detail::print_report_summary(report);
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::fail(std::filesystem::exists(site_dir) ? site_dir : std::filesystem::path(),
                        e);
  }
}

inline int cmd_bench_build(const std::filesystem::path& out_dir, const AppConfig& app) {
  try {
    auto set = build_providers(app);
    bench::BuildOptions opts;
    opts.n = app.bench_n;
    opts.seed = app.seed;
    opts.jobs = app.jobs;
    opts.catalogs = app.catalogs;
    auto cases = bench::build_benchmark(set, opts);
    bench::save_benchmark(out_dir, cases);
    auto stats = bench::compute_stats(cases);
    std::cout << "benchmark: " << out_dir.string() << "\n"
              << "cases: " << stats.total << " (validated " << stats.validated << ", rejected "
              << stats.rejected << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::fail(out_dir, e);
  }
}

inline int cmd_bench_run(const std::filesystem::path& bench_dir,
                         const std::filesystem::path& out_dir, const AppConfig& app) {
  try {
    auto cases = bench::load_benchmark(bench_dir);
    std::vector<bench::BenchCase> validated;
    for (auto& c : cases)
      if (c.status == bench::CaseStatus::validated) validated.push_back(std::move(c));
    if (validated.empty())
      throw ConfigError("benchmark has no validated cases: " + bench_dir.string());

    auto set = build_providers(app);
    std::vector<evaluator::SampleEvalReport> reports(validated.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (size_t i; (i = next.fetch_add(1)) < validated.size();) {
        if (failed.load()) return;
        try {
          auto session = make_session(app);
          auto result = generate_workspace(validated[i].design_prompt,
                                           out_dir / validated[i].id, app, set, *session);
          reports[i] = std::move(result.report);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    };
    if (app.jobs <= 1 || validated.size() < 2) {
      worker();
    } else {
      size_t fanout = std::min(size_t(app.jobs), validated.size());
      std::vector<std::future<void>> futures;
      futures.reserve(fanout);
      for (size_t k = 0; k < fanout; ++k)
        futures.push_back(std::async(std::launch::async, worker));
      for (auto& f : futures) f.get();
    }
    if (first_error) std::rethrow_exception(first_error);

    auto [dims, overall] = evaluator::aggregate_benchmark(reports);
    ordered_json j;
    j["cases"] = int(validated.size());
    ordered_json dim_json;
    for (const auto& d : dims) {
      ordered_json row;
      row["score"] = d.value.to_double();
      row["samples"] = d.sample_count;
      dim_json[dimension_name(d.dimension)] = std::move(row);
    }
    j["dimensions"] = std::move(dim_json);
    j["overall"] = overall.to_double();
    ordered_json per_case = ordered_json::array();
    for (size_t i = 0; i < validated.size(); ++i) {
      ordered_json row;
      row["id"] = validated[i].id;
      for (int d = 0; d < 6; ++d) {
        auto v = evaluator::sample_dimension_score(reports[i], Dimension(d));
        row[dimension_name(Dimension(d))] = v ? ordered_json(v->to_double()) : ordered_json(nullptr);
      }
      per_case.push_back(std::move(row));
    }
    j["per_case"] = std::move(per_case);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "aggregate.json", j.dump(2) + "\n");

    std::cout << "benchmark run: " << validated.size() << " cases\n";
    for (const auto& d : dims)
      std::cout << "  " << dimension_name(d.dimension) << ": "
                << format_double(d.value.to_double(), 2) << " (" << d.sample_count
                << " samples)\n";
    std::cout << "  overall: " << format_double(overall.to_double(), 2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::fail(out_dir, e);
  }
}

inline int cmd_bench_stats(const std::filesystem::path& bench_dir) {
  try {
    std::vector<bench::BenchCase> cases;
    if (std::filesystem::exists(bench_dir / "cases")) cases = bench::load_benchmark(bench_dir);
    std::cout << bench::stats_to_json(bench::compute_stats(cases)).dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::fail({}, e);
  }
}

}  // namespace webforge::pipeline
