#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "webforge/core.hpp"
#include "webforge/media.hpp"
#include "webforge/planner.hpp"
#include "webforge/util.hpp"

// Every model call goes through a ToolProvider. Offline runs and tests use
// deterministic in-process mocks; live runs use a generic JSON-over-HTTP
// adapter. Mock judges read structured context from ToolRequest.extra; the
// rendered user text is what a live judge would see.

namespace webforge::providers {

struct ToolRequest {
  std::string tag;  // routes mock behavior: layout, image, layout_eval, ...
  std::string system;
  std::string user;
  std::vector<std::string> images;           // binary payloads
  std::map<std::string, std::string> extra;  // structured side-channel
};

struct ToolResponse {
  std::string text;
  std::string data;  // binary payload when the tool returns media
  std::optional<double> simulated_latency_s;  // set by mocks; live runs are timed
};

using ToolFn = std::function<ToolResponse(const ToolRequest&)>;

// Retryable failure class: network trouble, 5xx. Anything else propagates.
struct TransportError : GenerationError {
  using GenerationError::GenerationError;
};

struct ToolProvider {
  std::string kind;  // planner | layout | image | image_edit | video | chart | judge
  std::string endpoint;
  std::string model_name;
  double timeout_s = 120;
  int retry_budget = 2;
  double backoff_base_s = 0.05;
  ToolFn fn;
};

inline ToolResponse call_provider(const ToolProvider& p, const ToolRequest& req) {
  if (!p.fn) throw ConfigError("provider has no implementation: " + p.kind);
  for (int attempt = 0;; ++attempt) {
    try {
      return p.fn(req);
    } catch (const TransportError& e) {
      if (attempt >= p.retry_budget)
        throw GenerationError(p.kind + " transport failure after " +
                              std::to_string(attempt + 1) + " attempts: " + e.what());
      auto delay = std::chrono::duration<double>(p.backoff_base_s * double(1 << attempt));
      std::this_thread::sleep_for(delay);
    }
  }
}

namespace mock {

inline ToolResponse finish(ToolResponse r, double latency_s) {
  if (latency_s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(latency_s));
  r.simulated_latency_s = latency_s;
  return r;
}

inline std::string extra_value(const ToolRequest& req, const std::string& key) {
  auto it = req.extra.find(key);
  return it == req.extra.end() ? std::string() : it->second;
}

inline std::string stem_words(const std::string& path) {
  std::string s = std::filesystem::path(path).stem().string();
  for (char& c : s)
    if (c == '_' || c == '-') c = ' ';
  return s;
}

// The sentence containing [begin, end): bounded by newlines or ". " so the
// dots inside asset filenames do not split it.
inline std::string sentence_around(const std::string& text, size_t begin, size_t end) {
  size_t start = 0;
  for (size_t i = begin; i > 0; --i) {
    char c = text[i - 1];
    if (c == '\n') {
      start = i;
      break;
    }
    if (c == '.' && i < text.size() && (text[i] == ' ' || text[i] == '\n')) {
      start = i + 1;
      break;
    }
  }
  size_t stop = text.size();
  for (size_t j = end; j < text.size(); ++j) {
    if (text[j] == '\n') {
      stop = j;
      break;
    }
    if (text[j] == '.' &&
        (j + 1 == text.size() || text[j + 1] == ' ' || text[j + 1] == '\n')) {
      stop = j + 1;
      break;
    }
  }
  return trim(text.substr(start, stop - start));
}

inline std::string strip_path_groups(std::string s) {
  size_t pos;
  while ((pos = s.find("(path:")) != std::string::npos) {
    size_t close = s.find(')', pos);
    if (close == std::string::npos) break;
    size_t from = pos > 0 && s[pos - 1] == ' ' ? pos - 1 : pos;
    s.erase(from, close + 1 - from);
  }
  return trim(s);
}

inline std::string first_markdown_table(const std::string& text) {
  std::vector<std::string> run;
  for (const auto& line : split_lines(text)) {
    std::string t = trim(line);
    if (!t.empty() && t.front() == '|') {
      run.push_back(t);
      continue;
    }
    if (run.size() >= 2) break;
    run.clear();
  }
  if (run.size() < 2)
    return "| Label | Value |\n| --- | --- |\n| A | 3 |\n| B | 5 |\n| C | 8 |";
  return join(run, "\n");
}

inline std::string pick_page_style(const std::string& prompt) {
  static const std::vector<std::string> tokens{
      "minimalist", "minimal", "editorial", "playful", "brutalist",
      "cinematic",  "vintage", "corporate", "swiss",   "pastel"};
  std::string low = lower(prompt);
  for (const auto& t : tokens)
    if (low.find(t) != std::string::npos) return t + " design language";
  return "modern minimal design language";
}

inline std::string ref_text(const planner::Placeholder& ph) {
  std::string s = "(path: " + ph.path;
  if (ph.width_px) s += ", width: " + std::to_string(*ph.width_px) + "px";
  if (ph.height_px) s += ", height: " + std::to_string(*ph.height_px) + "px";
  return s + ")";
}

inline std::vector<planner::Placeholder> unique_placeholders(const std::string& text) {
  std::vector<planner::Placeholder> out;
  std::set<std::string> seen;
  for (auto& ph : planner::extract_placeholders(text))
    if (seen.insert(ph.path).second) out.push_back(ph);
  return out;
}

// Derives a full generation plan from the placeholder references and style
// vocabulary found in the design prompt itself.
inline std::string plan_from_prompt(const std::string& design_prompt) {
  auto phs = unique_placeholders(design_prompt);
  bool invented = phs.empty();
  if (invented) {
    planner::Placeholder p;
    p.path = "assets/hero.png";
    p.width_px = 1200;
    p.height_px = 600;
    phs.push_back(p);
  }
  const std::string page_style = pick_page_style(design_prompt);
  const std::string table = first_markdown_table(design_prompt);

  planner::GenerationPlan plan;
  std::vector<std::string> layout_lines;
  for (const auto& ph : phs) {
    std::string section = stem_words(ph.path);
    std::string prompt =
        invented ? std::string("Hero visual that captures the theme of the page.")
                 : strip_path_groups(sentence_around(design_prompt, ph.begin, ph.end));
    if (prompt.empty()) prompt = "Visual focus for the " + section + " area.";

    std::string line = prompt;
    while (!line.empty() && line.back() == '.') line.pop_back();
    layout_lines.push_back("The " + section + " section features " + line + " " +
                           ref_text(ph) + ".");

    planner::ElementContext ctx;
    ctx.section = section;
    ctx.page_style = page_style;
    int w = ph.width_px.value_or(0);
    int h = ph.height_px.value_or(0);
    if (ph.path.ends_with(".png")) {
      ctx.role = section.find("hero") != std::string::npos ||
                         section.find("banner") != std::string::npos
                     ? "hero visual"
                     : "supporting feature";
      planner::ImagePlan p;
      p.save_path = ph.path;
      p.context = ctx;
      p.compiled_attributes = {"clean photographic", "warm neutral", "centered subject",
                               "soft natural"};
      p.prompt = prompt;
      p.size = w > h ? "1536x1024" : (w < h ? "1024x1536" : "1024x1024");
      plan.image_generation.push_back(std::move(p));
    } else if (ph.path.ends_with(".mp4")) {
      ctx.role = "ambient background loop";
      planner::VideoPlan p;
      p.save_path = ph.path;
      p.context = ctx;
      p.compiled_attributes = {"smooth cinematic", "gentle", "static locked-off",
                               "seamless loop"};
      p.prompt = prompt;
      p.seconds = 8;
      p.size = w >= h ? "1280x720" : "720x1280";
      plan.video_generation.push_back(std::move(p));
    } else {
      ctx.role = "analytical summary";
      planner::ChartPlan p;
      p.save_path = ph.path;
      p.context = ctx;
      p.compiled_attributes = {"bar chart", "flat minimal", "muted brand palette",
                               "compare values at a glance"};
      p.prompt = prompt;
      p.source_data = table;
      plan.data_visualization.push_back(std::move(p));
    }
  }
  plan.code_generation.prompt =
      "Create a single-page layout in a " + page_style + ". " + join(layout_lines, " ") +
      " Keep the typographic hierarchy consistent and the spacing generous.";
  return planner::serialize_plan(plan).dump(2) + "\n";
}

inline std::string mock_page(const std::string& layout_prompt) {
  std::string title = "Showcase " + short_hash(layout_prompt);
  std::string body;
  for (const auto& ph : unique_placeholders(layout_prompt)) {
    std::string s = stem_words(ph.path);
    if (ph.path.ends_with(".png")) {
      body += "  <section class=\"asset-image\">\n    <h2>" + s + "</h2>\n    <img src=\"" +
              ph.path + "\" alt=\"" + s + "\">\n  </section>\n";
    } else if (ph.path.ends_with(".mp4")) {
      body += "  <section class=\"asset-video\">\n    <video src=\"" + ph.path +
              "\" autoplay loop muted playsinline></video>\n  </section>\n";
    } else {
      body += "  <section class=\"asset-chart\">\n    <iframe src=\"" + ph.path +
              "\"></iframe>\n  </section>\n";
    }
  }
  return "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
         title +
         "</title>\n<style>\n"
         "  body { font-family: Georgia, serif; margin: 0; color: #1f2430; background: #fdfcfa; }\n"
         "  header, footer { text-align: center; padding: 2rem; }\n"
         "  section { padding: 1.5rem 2rem; }\n"
         "  img, video, iframe { max-width: 100%; }\n"
         "</style>\n</head>\n<body>\n<header>\n  <h1>" +
         title + "</h1>\n</header>\n" + body +
         "<footer>\n  <p>Crafted for the brief.</p>\n</footer>\n</body>\n</html>\n";
}

// Deterministic scenario expansion: the brief's placeholders and dataset
// table drive plan_from_prompt to a valid plan for the same scenario.
inline std::string expand_scenario_text(const std::string& layout_complexity,
                                        const std::string& visual_style,
                                        const std::string& semantic_intent,
                                        const std::string& elements_csv) {
  std::set<std::string> elements;
  for (const auto& e : split(elements_csv, ','))
    if (!trim(e).empty()) elements.insert(trim(e));
  std::string out = "Design a webpage for the " + semantic_intent +
                    " use case, structured as a " + layout_complexity + " layout in a " +
                    visual_style + " visual style.\n";
  if (elements.count("text"))
    out +=
        "\nThe page opens with a concise written introduction and closes with a short "
        "summary, keeping the copy focused and scannable.\n";
  if (elements.count("images"))
    out +=
        "\nThe hero section features a wide photographic banner that anchors the identity "
        "of the page (path: assets/hero.png, width: 1536px, height: 1024px).\n";
  if (elements.count("videos"))
    out +=
        "\nThe showcase section features an ambient looping video that adds gentle motion "
        "behind the content (path: assets/showcase.mp4, width: 1280px, height: 720px).\n";
  if (elements.count("charts"))
    out +=
        "\nThe insight section features an interactive chart that summarizes the dataset "
        "below (path: assets/insight.html, width: 960px, height: 480px).\n"
        "\n| Label | Value |\n| --- | --- |\n| Reach | 34 |\n| Engagement | 58 |\n"
        "| Retention | 72 |\n";
  out += "\nKeep the typography, spacing, and palette consistent with the " + visual_style +
         " direction throughout.\n";
  return out;
}

inline std::string mark_reflected(std::string doc) {
  if (doc.find("data-reflected") != std::string::npos) return doc;
  size_t pos = doc.find("<html");
  if (pos != std::string::npos)
    doc.insert(pos + 5, " data-reflected=\"1\"");
  else
    doc = "<html data-reflected=\"1\">\n" + doc + "\n</html>\n";
  return doc;
}

inline std::string fix_visibility(std::string doc) {
  doc = replace_all(doc, "opacity: 0;", "opacity: 1;");
  doc = replace_all(doc, "opacity:0;", "opacity: 1;");
  doc = replace_all(doc, "opacity: 0\"", "opacity: 1\"");
  doc = replace_all(doc, "visibility: hidden", "visibility: visible");
  doc = replace_all(doc, "visibility:hidden", "visibility: visible");
  doc = replace_all(doc, "display: none", "display: block");
  doc = replace_all(doc, "display:none", "display: block");
  return doc;
}

inline std::string mock_chart_doc(const std::string& seed, const std::string& title) {
  uint64_t h = fnv1a64(seed);
  static const char* palette[] = {"#5470c6", "#91cc75", "#fac858",
                                  "#ee6666", "#73c0de", "#3ba272"};
  std::string bars;
  for (int i = 0; i < 5; ++i) {
    int height = 25 + int((h >> (8 * i)) & 0x3f);
    const char* color = palette[(h >> (8 * i + 4)) % 6];
    bars += "    <div class=\"bar\" style=\"height: " + std::to_string(height) +
            "%; background: " + color + ";\"></div>\n";
  }
  return "<!DOCTYPE html>\n<html>\n<head>\n  <meta charset=\"UTF-8\" />\n  <title>" + title +
         "</title>\n"
         "  <script src=\"https://cdn.jsdelivr.net/npm/echarts@5.5.0/dist/echarts.min.js\"></script>\n"
         "  <style>\n"
         "    html, body {\n"
         "      width: 100%;\n"
         "      height: 100%;\n"
         "      margin: 0;\n"
         "      padding: 0;\n"
         "      background: transparent;\n"
         "    }\n"
         "    #chart {\n"
         "      width: 100%;\n"
         "      height: 100vh;\n"
         "      display: flex;\n"
         "      align-items: flex-end;\n"
         "      gap: 4%;\n"
         "      box-sizing: border-box;\n"
         "      padding: 0 6%;\n"
         "    }\n"
         "    .bar {\n"
         "      flex: 1;\n"
         "      border-radius: 3px 3px 0 0;\n"
         "    }\n"
         "  </style>\n</head>\n<body>\n  <div id=\"chart\">\n" +
         bars + "  </div>\n</body>\n</html>\n";
}

inline std::string revise_chart(std::string doc) {
  if (doc.find("<!-- revised -->") != std::string::npos) return doc;
  size_t pos = doc.rfind("</body>");
  if (pos != std::string::npos)
    doc.insert(pos, "  <!-- revised -->\n");
  else
    doc += "\n<!-- revised -->\n";
  return doc;
}

inline std::string mock_video_bytes(int w, int h, int seconds, media::Rgb color) {
  static std::atomic<uint64_t> counter{0};
  auto path = std::filesystem::temp_directory_path() /
              ("webforge-mock-" + std::to_string(uint64_t(::getpid())) + "-" +
               std::to_string(counter.fetch_add(1)) + ".mp4");
  media::write_solid_mp4(path, w, h, seconds, color);
  std::string bytes = read_file(path);
  std::error_code ec;
  std::filesystem::remove(path, ec);
  return bytes;
}

inline ToolFn make_judge_fn(const std::string& profile, double latency_s) {
  if (profile != "clean" && profile != "strict" && profile != "adversarial")
    throw ConfigError("unknown judge profile: " + profile);
  bool strict = profile == "strict";
  bool adversarial = profile == "adversarial";
  return [=](const ToolRequest& req) -> ToolResponse {
    using nlohmann::json;
    const std::string& tag = req.tag;
    bool reflected =
        extra_value(req, "document").find("data-reflected") != std::string::npos;
    bool dirty_global = adversarial || (strict && !reflected);

    if (tag == "layout_eval") {
      std::string out =
          dirty_global
              ? "Layout Penalties:\n- Hero section crowds the navigation: Penalty--0.1\n"
                "Total Penalty: 0.1\n"
              : "Layout Penalties:\nTotal Penalty: 0\n";
      return finish({out, {}, {}}, latency_s);
    }
    if (tag == "style_eval") {
      std::string out =
          dirty_global
              ? "Style Consistency Penalties:\n- Accent color drifts from the stated "
                "palette: Penalty--0.1\nTotal Penalty: 0.1\n"
              : "Style Consistency Penalties:\nTotal Penalty: 0\n";
      return finish({out, {}, {}}, latency_s);
    }
    if (tag == "aesthetics_eval") {
      const char* v = dirty_global ? "0.8" : "1.0";
      std::string out;
      for (const char* aspect : {"Layout", "Typography", "Color", "Clarity", "Professional"})
        out += std::string(aspect) + ": " + v + "\n";
      return finish({out, {}, {}}, latency_s);
    }
    if (tag == "extraction") {
      std::string design_prompt = extra_value(req, "design_prompt");
      json j{{"image", json::array()}, {"video", json::array()}, {"chart", json::array()}};
      std::string table = first_markdown_table(design_prompt);
      for (const auto& ph : unique_placeholders(design_prompt)) {
        std::string desc =
            strip_path_groups(sentence_around(design_prompt, ph.begin, ph.end));
        if (desc.empty()) desc = "Visual element " + stem_words(ph.path) + ".";
        if (ph.path.ends_with(".png"))
          j["image"].push_back(desc);
        else if (ph.path.ends_with(".mp4"))
          j["video"].push_back(desc);
        else
          j["chart"].push_back(desc + "\n ```markdown\n" + table + "\n```");
      }
      return finish({j.dump(), {}, {}}, latency_s);
    }
    if (tag == "completeness") {
      json extracted = json::parse(extra_value(req, "extracted"));
      json existing = json::parse(extra_value(req, "existing"));
      json j;
      for (const char* kind : {"image", "video", "chart"}) {
        size_t have = existing.contains(kind) ? existing[kind].size() : 0;
        json misses = json::object();
        const json& ext = extracted.contains(kind) ? extracted[kind] : json::array();
        for (size_t i = have; i < ext.size(); ++i)
          misses["missing-" + std::to_string(i + 1)] = ext[i];
        j[kind] = misses.empty() ? json::array() : misses;
      }
      return finish({j.dump(), {}, {}}, latency_s);
    }
    if (tag == "image_eval") {
      std::string path = extra_value(req, "asset_path");
      bool patched = extra_value(req, "excerpt").find("object-fit") != std::string::npos;
      bool dirty = adversarial || (strict && !patched);
      json j;
      j["description"] = dirty ? "Solid placeholder image cropped by its container."
                               : "Solid placeholder image embedded cleanly.";
      j["user_prompt"] = "Image request for " + path;
      j["image_issues"] = json::array();
      j["image_solutions"] = json::array();
      j["webpage_issues"] =
          dirty ? json::array({"Image is cropped awkwardly by its container"})
                : json::array();
      j["webpage_solutions"] =
          dirty ? json::array({"img[src*=\"" + path + "\"] { object-fit: contain; }"})
                : json::array();
      j["score"] = dirty ? 0.8 : 1.0;
      return finish({j.dump(), {}, {}}, latency_s);
    }
    if (tag == "video_eval") {
      bool dirty = strict || adversarial;
      json j;
      j["description"] = "Single-tone ambient loop embedded in the page.";
      j["user_prompt"] = "Video request for " + extra_value(req, "asset_path");
      j["reasoning"] = dirty ? "One minor detail is missing from the frames."
                             : "All described details appear across the frames.";
      j["score"] = dirty ? 0.8 : 1.0;
      return finish({j.dump(), {}, {}}, latency_s);
    }
    if (tag == "chart_eval" || tag == "inline_chart_eval") {
      std::string path = extra_value(req, "asset_path");
      bool revised =
          extra_value(req, "chart_html").find("<!-- revised -->") != std::string::npos;
      std::string diag = extra_value(req, "diagnostics");
      bool hidden = diag.find("\"opacity\":\"0\"") != std::string::npos ||
                    diag.find("opacity: 0") != std::string::npos;
      bool dirty = adversarial || (strict && !revised);
      json j;
      j["description"] = dirty ? "Bar chart whose legend collides with the plot area."
                               : "Bar chart rendered cleanly inside its frame.";
      j["user_prompt"] = "Chart request for " + path;
      j["chart_issues"] =
          dirty ? json::array({"Legend overlaps the plot area"}) : json::array();
      j["chart_solutions"] =
          dirty ? json::array({"Disable the legend and reserve 15% top grid margin"})
                : json::array();
      j["webpage_issues"] =
          hidden ? json::array({"Container has opacity: 0 making chart invisible"})
                 : json::array();
      j["webpage_solutions"] =
          hidden
              ? json::array({"Change the chart container default state to opacity: 1;"})
              : json::array();
      int issues = int(j["chart_issues"].size() + j["webpage_issues"].size());
      j["score"] = std::max(0.0, 1.0 - 0.2 * issues);
      return finish({j.dump(), {}, {}}, latency_s);
    }
    if (tag == "scenario_expansion")
      return finish({expand_scenario_text(extra_value(req, "layout_complexity"),
                                          extra_value(req, "visual_style"),
                                          extra_value(req, "semantic_intent"),
                                          extra_value(req, "elements")),
                     {},
                     {}},
                    latency_s);
    throw GenerationError("mock judge cannot handle tag: " + tag);
  };
}

}  // namespace mock

inline ToolProvider make_mock_provider(const std::string& kind, double latency_s = 0,
                                       const std::string& judge_profile = "clean") {
  ToolProvider p;
  p.kind = kind;
  p.endpoint = "mock:deterministic";
  p.model_name = "mock-" + kind;
  if (kind == "planner") {
    p.fn = [=](const ToolRequest& req) {
      return mock::finish({mock::plan_from_prompt(req.user), {}, {}}, latency_s);
    };
  } else if (kind == "layout") {
    p.fn = [=](const ToolRequest& req) -> ToolResponse {
      if (req.tag == "layout")
        return mock::finish({mock::mock_page(req.user), {}, {}}, latency_s);
      if (req.tag == "global_reflection")
        return mock::finish({mock::mark_reflected(mock::extra_value(req, "document")), {}, {}},
                            latency_s);
      if (req.tag == "chart_container_reflection")
        return mock::finish({mock::fix_visibility(mock::extra_value(req, "document")), {}, {}},
                            latency_s);
      throw GenerationError("mock layout cannot handle tag: " + req.tag);
    };
  } else if (kind == "image") {
    p.fn = [=](const ToolRequest& req) -> ToolResponse {
      auto [w, h] = parse_dims(mock::extra_value(req, "size"));
      auto png = media::make_solid_png(w, h, media::color_from_hash(fnv1a64(req.user)),
                                       short_hash(req.user));
      return mock::finish({{}, png, {}}, latency_s);
    };
  } else if (kind == "image_edit") {
    p.fn = [=](const ToolRequest& req) -> ToolResponse {
      if (req.images.empty()) throw GenerationError("image edit requires an original image");
      auto png = media::overlay_label(req.images.front(), short_hash(req.user));
      return mock::finish({{}, png, {}}, latency_s);
    };
  } else if (kind == "video") {
    p.fn = [=](const ToolRequest& req) -> ToolResponse {
      auto [w, h] = parse_dims(mock::extra_value(req, "size"));
      int seconds = std::atoi(mock::extra_value(req, "seconds").c_str());
      if (seconds <= 0) throw SchemaError("bad seconds", "seconds");
      auto bytes =
          mock::mock_video_bytes(w, h, seconds, media::color_from_hash(fnv1a64(req.user)));
      return mock::finish({{}, bytes, {}}, latency_s);
    };
  } else if (kind == "chart") {
    p.fn = [=](const ToolRequest& req) -> ToolResponse {
      if (req.tag == "chart") {
        std::string save_path = mock::extra_value(req, "save_path");
        std::string title =
            save_path.empty() ? std::string("Data View") : mock::stem_words(save_path);
        return mock::finish({mock::mock_chart_doc(req.user, title), {}, {}}, latency_s);
      }
      if (req.tag == "chart_local_reflection")
        return mock::finish({mock::revise_chart(mock::extra_value(req, "document")), {}, {}},
                            latency_s);
      throw GenerationError("mock chart cannot handle tag: " + req.tag);
    };
  } else if (kind == "judge") {
    p.fn = mock::make_judge_fn(judge_profile, latency_s);
  } else {
    throw ConfigError("unknown provider kind: " + kind);
  }
  return p;
}

inline const std::vector<std::string>& provider_kinds() {
  static const std::vector<std::string> v{"planner", "layout",    "image", "image_edit",
                                          "video",   "chart", "judge"};
  return v;
}

struct ProviderSet {
  std::map<std::string, ToolProvider> by_kind;

  const ToolProvider& get(const std::string& kind) const {
    auto it = by_kind.find(kind);
    if (it == by_kind.end()) throw ConfigError("no provider configured for kind: " + kind);
    return it->second;
  }
};

inline ProviderSet make_mock_providers(const std::string& judge_profile = "clean",
                                       const std::map<std::string, double>& latencies = {}) {
  ProviderSet set;
  for (const auto& kind : provider_kinds()) {
    auto it = latencies.find(kind);
    set.by_kind[kind] =
        make_mock_provider(kind, it == latencies.end() ? 0.0 : it->second, judge_profile);
  }
  return set;
}

inline std::string env_api_key(const std::string& kind) {
  std::string var = "WEBFORGE_";
  for (char c : kind) var += char(std::toupper(static_cast<unsigned char>(c)));
  var += "_KEY";
  const char* v = std::getenv(var.c_str());
  return v ? v : "";
}

struct ParsedUrl {
  bool https = false;
  std::string host;
  int port = 80;
  std::string path = "/";
};

inline ParsedUrl parse_endpoint(const std::string& url) {
  ParsedUrl u;
  std::string rest;
  if (url.rfind("https://", 0) == 0) {
    u.https = true;
    u.port = 443;
    rest = url.substr(8);
  } else if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
  } else {
    throw ConfigError("endpoint must be http(s): " + url);
  }
  size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  if (slash != std::string::npos) u.path = rest.substr(slash);
  size_t colon = authority.find(':');
  if (colon != std::string::npos) {
    u.host = authority.substr(0, colon);
    u.port = std::atoi(authority.substr(colon + 1).c_str());
    if (u.port <= 0) throw ConfigError("bad endpoint port: " + url);
  } else {
    u.host = authority;
  }
  if (u.host.empty()) throw ConfigError("endpoint has no host: " + url);
  return u;
}

// Generic adapter: POST {model, tag, system, user, images[], extra{}} as JSON,
// expect {text, data_b64} back. 5xx and connection failures are retryable.
inline ToolFn make_live_fn(const std::string& endpoint, const std::string& api_key,
                           const std::string& model, double timeout_s) {
  return [=](const ToolRequest& req) -> ToolResponse {
    ParsedUrl u = parse_endpoint(endpoint);
    nlohmann::json body{{"model", model},
                        {"tag", req.tag},
                        {"system", req.system},
                        {"user", req.user}};
    auto imgs = nlohmann::json::array();
    for (const auto& i : req.images) imgs.push_back(base64_encode(i));
    body["images"] = std::move(imgs);
    body["extra"] = req.extra;
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    auto do_post = [&](auto& cli) {
      cli.set_connection_timeout(time_t(timeout_s), 0);
      cli.set_read_timeout(time_t(timeout_s), 0);
      cli.set_write_timeout(time_t(timeout_s), 0);
      return cli.Post(u.path, headers, body.dump(), "application/json");
    };
    httplib::Result res = [&] {
      if (u.https) {
        httplib::SSLClient cli(u.host, u.port);
        return do_post(cli);
      }
      httplib::Client cli(u.host, u.port);
      return do_post(cli);
    }();

    if (!res)
      throw TransportError("no response from " + endpoint + ": " +
                           httplib::to_string(res.error()));
    if (res->status >= 500)
      throw TransportError("server error " + std::to_string(res->status) + " from " +
                           endpoint);
    if (res->status != 200)
      throw GenerationError("request rejected (" + std::to_string(res->status) +
                            "): " + res->body.substr(0, 200));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw GenerationError("provider returned a non-JSON payload");
    }
    ToolResponse out;
    out.text = j.value("text", "");
    if (j.contains("data_b64") && j["data_b64"].is_string())
      out.data = base64_decode(j["data_b64"].get<std::string>());
    return out;
  };
}

inline ProviderSet make_providers(const RunConfig& cfg) {
  ProviderSet set;
  for (const auto& kind : provider_kinds()) {
    ProviderConfig pc;
    if (auto it = cfg.providers.find(kind); it != cfg.providers.end()) pc = it->second;
    if (pc.mode == "live") {
      if (pc.endpoint.empty()) throw ConfigError("live provider " + kind + " needs an endpoint");
      ToolProvider p;
      p.kind = kind;
      p.endpoint = pc.endpoint;
      p.model_name = pc.model;
      std::string key = pc.api_key.empty() ? env_api_key(kind) : pc.api_key;
      p.fn = make_live_fn(pc.endpoint, key, pc.model, p.timeout_s);
      set.by_kind[kind] = std::move(p);
    } else if (pc.mode == "mock" || pc.mode.rfind("mock:", 0) == 0) {
      std::string profile = pc.mode == "mock" ? "clean" : pc.mode.substr(5);
      set.by_kind[kind] = make_mock_provider(kind, pc.simulated_latency_s, profile);
    } else {
      throw ConfigError("unknown provider mode for " + kind + ": " + pc.mode);
    }
  }
  return set;
}

}  // namespace webforge::providers
