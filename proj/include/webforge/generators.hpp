#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "webforge/core.hpp"
#include "webforge/media.hpp"
#include "webforge/planner.hpp"
#include "webforge/prompts.hpp"
#include "webforge/providers.hpp"
#include "webforge/util.hpp"

namespace webforge::generators {

struct GenerationRecord {
  std::string asset_path;  // page document path for the layout task
  std::string tool;        // provider kind
  std::string prompt_sent;
  double latency_s = 0;
  double cost_estimate = 0;
  std::string outcome;  // ok | failed
  std::string error;    // reason when failed
};

struct ChartDocViolation {
  std::string code;
  std::string message;
};

namespace detail {

inline providers::ToolResponse timed_call(const providers::ToolProvider& p,
                                          const providers::ToolRequest& req,
                                          double& latency_acc) {
  auto t0 = std::chrono::steady_clock::now();
  auto res = providers::call_provider(p, req);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  latency_acc += res.simulated_latency_s ? *res.simulated_latency_s : wall;
  return res;
}

inline std::string maybe_unfence(const std::string& text) {
  return trim(text).rfind("```", 0) == 0 ? planner::strip_code_fences(text) : text;
}

inline bool tag_present(const std::string& low_doc, const std::string& tag) {
  std::string needle = "<" + tag;
  size_t pos = 0;
  while ((pos = low_doc.find(needle, pos)) != std::string::npos) {
    size_t after = pos + needle.size();
    char c = after < low_doc.size() ? low_doc[after] : '>';
    if (c == '>' || c == ' ' || c == '\t' || c == '\n' || c == '/') return true;
    pos = after;
  }
  return false;
}

}  // namespace detail

inline std::vector<ChartDocViolation> validate_chart_doc(const std::string& doc) {
  std::vector<ChartDocViolation> out;
  std::string low = lower(doc);
  size_t first_html = low.find("<html");
  bool single = first_html != std::string::npos &&
                low.find("</html>") != std::string::npos &&
                low.find("<html", first_html + 1) == std::string::npos;
  if (!single)
    out.push_back({"not_single_document", "expected exactly one complete html document"});
  bool transparent = low.find("background: transparent") != std::string::npos ||
                     low.find("background:transparent") != std::string::npos ||
                     low.find("background-color: transparent") != std::string::npos ||
                     low.find("background-color:transparent") != std::string::npos;
  if (!transparent)
    out.push_back({"opaque_background", "document background must be transparent"});
  bool full_height = low.find("100vh") != std::string::npos ||
                     low.find("height: 100%") != std::string::npos ||
                     low.find("height:100%") != std::string::npos;
  bool full_width = low.find("width: 100%") != std::string::npos ||
                    low.find("width:100%") != std::string::npos;
  if (!full_height || !full_width)
    out.push_back({"no_fullsize_container", "chart container must fill the viewport"});
  if (low.find("<script") == std::string::npos || low.find("echarts") == std::string::npos)
    out.push_back({"no_chart_script", "missing charting script include"});
  for (const char* t :
       {"header", "footer", "nav", "aside", "section", "article", "figcaption", "caption"})
    if (detail::tag_present(low, t))
      out.push_back({"layout_element_present",
                     std::string("layout element present: <") + t + ">"});
  return out;
}

inline std::string generate_layout(const providers::ToolProvider& provider,
                                   const planner::LayoutPlan& layout,
                                   const std::vector<AssetRef>& refs,
                                   double* latency_s = nullptr) {
  providers::ToolRequest req;
  req.tag = "layout";
  req.system = prompts::kLayoutSystem;
  req.user = layout.prompt;
  std::vector<std::string> required;
  for (const auto& r : refs)
    if (layout.prompt.find(r.path) != std::string::npos) required.push_back(r.path);

  double latency = 0;
  for (int attempt = 0;; ++attempt) {
    auto res = detail::timed_call(provider, req, latency);
    if (latency_s) *latency_s = latency;
    std::string doc = detail::maybe_unfence(res.text);
    if (doc.empty()) throw GenerationError("layout provider returned an empty document");
    std::vector<std::string> missing;
    for (const auto& p : required)
      if (doc.find(p) == std::string::npos) missing.push_back(p);
    if (missing.empty()) return doc;
    if (attempt >= 1)
      throw ContractError("layout dropped asset references: " + join(missing, ", "),
                          missing);
  }
}

inline std::string generate_asset(const providers::ToolProvider& provider,
                                  const planner::ImagePlan& plan,
                                  double* latency_s = nullptr) {
  providers::ToolRequest req;
  req.tag = "image";
  req.system = prompts::kImageSystem;
  req.user = planner::compile_element_prompt(plan);
  req.extra["size"] = plan.size;
  auto [want_w, want_h] = parse_dims(plan.size);

  double latency = 0;
  for (int attempt = 0;; ++attempt) {
    auto res = detail::timed_call(provider, req, latency);
    if (latency_s) *latency_s = latency;
    if (res.data.empty()) throw GenerationError("image provider returned no payload");
    std::string problem;
    try {
      auto [w, h] = media::png_dimensions(res.data);
      if (w != want_w || h != want_h)
        problem = "image is " + std::to_string(w) + "x" + std::to_string(h) +
                  ", requested " + plan.size;
    } catch (const ParseError& e) {
      problem = e.what();
    }
    if (problem.empty()) return res.data;
    if (attempt >= 1) throw ContractError(problem, {plan.save_path});
  }
}

inline std::string generate_asset(const providers::ToolProvider& provider,
                                  const planner::VideoPlan& plan,
                                  double* latency_s = nullptr) {
  providers::ToolRequest req;
  req.tag = "video";
  req.user = planner::compile_element_prompt(plan);
  req.extra["size"] = plan.size;
  req.extra["seconds"] = std::to_string(plan.seconds);
  auto [want_w, want_h] = parse_dims(plan.size);

  double latency = 0;
  for (int attempt = 0;; ++attempt) {
    auto res = detail::timed_call(provider, req, latency);
    if (latency_s) *latency_s = latency;
    if (res.data.empty()) throw GenerationError("video provider returned no payload");
    // container probing needs a file on disk
    static std::atomic<uint64_t> counter{0};
    auto tmp = std::filesystem::temp_directory_path() /
               ("webforge-probe-" + std::to_string(counter.fetch_add(1)) + "-" +
                short_hash(plan.save_path) + ".mp4");
    write_file(tmp, res.data);
    std::string problem;
    try {
      auto info = media::probe_video(tmp);
      if (info.width != want_w || info.height != want_h)
        problem = "video is " + std::to_string(info.width) + "x" +
                  std::to_string(info.height) + ", requested " + plan.size;
      else if (std::abs(info.duration_s - plan.seconds) > 0.5)
        problem = "video runs " + format_compact(info.duration_s) + "s, requested " +
                  std::to_string(plan.seconds) + "s";
    } catch (const RendererError& e) {
      problem = e.what();
    }
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    if (problem.empty()) return res.data;
    if (attempt >= 1) throw ContractError(problem, {plan.save_path});
  }
}

inline std::string generate_asset(const providers::ToolProvider& provider,
                                  const planner::ChartPlan& plan,
                                  double* latency_s = nullptr) {
  providers::ToolRequest req;
  req.tag = "chart";
  req.system = prompts::kChartSystem;
  req.user = planner::compile_element_prompt(plan) + "\n\nSource data:\n" + plan.source_data;
  req.extra["save_path"] = plan.save_path;

  double latency = 0;
  for (int attempt = 0;; ++attempt) {
    auto res = detail::timed_call(provider, req, latency);
    if (latency_s) *latency_s = latency;
    std::string doc = detail::maybe_unfence(res.text);
    if (doc.empty()) throw GenerationError("chart provider returned an empty document");
    auto violations = validate_chart_doc(doc);
    if (violations.empty()) return doc;
    if (attempt >= 1) {
      std::vector<std::string> codes;
      std::string msg = "chart document failed validation:";
      for (const auto& v : violations) {
        codes.push_back(v.code);
        msg += " " + v.message + ";";
      }
      throw ContractError(msg, codes);
    }
  }
}

inline std::string edit_image(const providers::ToolProvider& provider,
                              const std::string& original,
                              const std::vector<std::string>& instructions,
                              double* latency_s = nullptr) {
  if (instructions.empty()) throw std::invalid_argument("no edit instructions");
  auto [w, h] = media::png_dimensions(original);
  providers::ToolRequest req;
  req.tag = "image_edit";
  req.user = "Apply the following adjustments to the image:\n- " + join(instructions, "\n- ");
  req.images.push_back(original);

  double latency = 0;
  for (int attempt = 0;; ++attempt) {
    auto res = detail::timed_call(provider, req, latency);
    if (latency_s) *latency_s = latency;
    if (res.data.empty()) throw GenerationError("image edit returned no payload");
    auto [w2, h2] = media::png_dimensions(res.data);
    if (w2 == w && h2 == h) return res.data;
    if (attempt >= 1)
      throw ContractError("image edit changed dimensions from " + std::to_string(w) + "x" +
                          std::to_string(h) + " to " + std::to_string(w2) + "x" +
                          std::to_string(h2));
  }
}

namespace detail {

struct TaskResult {
  GenerationRecord record;
  std::string payload;
  bool is_page = false;
  bool ok = false;
};

}  // namespace detail

inline std::pair<WorkspaceManifest, std::vector<GenerationRecord>> execute_plan(
    const planner::GenerationPlan& plan, const providers::ProviderSet& provider_set,
    const RunConfig& config, WorkspaceManifest manifest) {
  if (auto violations = planner::validate_plan(plan); !violations.empty())
    throw std::invalid_argument("plan failed validation: " + violations.front().code + " " +
                                violations.front().message);
  if (auto gaps = planner::cross_check(plan); !gaps.empty())
    throw std::invalid_argument("plan failed cross-check: " + gaps.front().code + " " +
                                gaps.front().message);

  auto refs = planner::planned_asset_refs(plan);
  for (const auto& ref : refs) manifest = register_asset(std::move(manifest), ref);

  using Task = std::function<detail::TaskResult()>;
  std::vector<Task> tasks;
  auto guarded = [](std::string asset_path, std::string tool, std::string prompt,
                    bool is_page,
                    std::function<std::string(double&)> run) -> detail::TaskResult {
    GenerationRecord record;
    record.asset_path = std::move(asset_path);
    record.tool = std::move(tool);
    record.prompt_sent = std::move(prompt);
    double latency = 0;
    try {
      std::string payload = run(latency);
      record.latency_s = latency;
      record.outcome = "ok";
      return {std::move(record), std::move(payload), is_page, true};
    } catch (const std::exception& e) {
      record.latency_s = latency;
      record.outcome = "failed";
      record.error = e.what();
      return {std::move(record), {}, is_page, false};
    }
  };

  for (const auto& p : plan.image_generation)
    tasks.push_back([&, p] {
      return guarded(p.save_path, "image", planner::compile_element_prompt(p), false,
                     [&](double& lat) {
                       return generate_asset(provider_set.get("image"), p, &lat);
                     });
    });
  for (const auto& p : plan.video_generation)
    tasks.push_back([&, p] {
      return guarded(p.save_path, "video", planner::compile_element_prompt(p), false,
                     [&](double& lat) {
                       return generate_asset(provider_set.get("video"), p, &lat);
                     });
    });
  for (const auto& p : plan.data_visualization)
    tasks.push_back([&, p] {
      return guarded(p.save_path, "chart", planner::compile_element_prompt(p), false,
                     [&](double& lat) {
                       return generate_asset(provider_set.get("chart"), p, &lat);
                     });
    });
  tasks.push_back([&] {
    return guarded(manifest.page_document_path, "layout", plan.code_generation.prompt, true,
                   [&](double& lat) {
                     return generate_layout(provider_set.get("layout"), plan.code_generation,
                                            refs, &lat);
                   });
  });

  std::vector<detail::TaskResult> results;
  if (config.parallel_fanout && tasks.size() >= 2) {
    std::vector<std::future<detail::TaskResult>> futures;
    futures.reserve(tasks.size());
    for (auto& t : tasks) futures.push_back(std::async(std::launch::async, t));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (auto& t : tasks) results.push_back(t());
  }

  std::vector<GenerationRecord> records;
  for (auto& r : results) {
    if (r.ok) {
      write_file(manifest.root / r.record.asset_path, r.payload);
      if (!r.is_page) manifest.assets.at(r.record.asset_path).status =
          AssetStatus::generated;
    }
    records.push_back(std::move(r.record));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.asset_path, a.tool) < std::tie(b.asset_path, b.tool);
  });
  return {std::move(manifest), std::move(records)};
}

inline nlohmann::json records_to_json(const std::vector<GenerationRecord>& records) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"asset_path", r.asset_path},
                     {"tool", r.tool},
                     {"prompt_sent", r.prompt_sent},
                     {"latency_s", r.latency_s},
                     {"cost_estimate", r.cost_estimate},
                     {"outcome", r.outcome}};
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::vector<GenerationRecord> records_from_json(const nlohmann::json& arr) {
  std::vector<GenerationRecord> out;
  for (const auto& j : arr) {
    GenerationRecord r;
    r.asset_path = j.at("asset_path").get<std::string>();
    r.tool = j.at("tool").get<std::string>();
    r.prompt_sent = j.at("prompt_sent").get<std::string>();
    r.latency_s = j.at("latency_s").get<double>();
    r.cost_estimate = j.at("cost_estimate").get<double>();
    r.outcome = j.at("outcome").get<std::string>();
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace webforge::generators
