#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "webforge/core.hpp"
#include "webforge/media.hpp"
#include "webforge/planner.hpp"
#include "webforge/prompt_text.hpp"
#include "webforge/prompts.hpp"
#include "webforge/providers.hpp"
#include "webforge/renderer.hpp"
#include "webforge/util.hpp"

// Multi-level page evaluation: element extraction and completeness against the
// design prompt, page-global penalty and aesthetics judgments, per-element
// image/video/chart judgments, and benchmark aggregation. Judge replies are
// parsed strictly; one fixed format reprompt is spent before giving up.

namespace webforge::evaluator {

namespace fs = std::filesystem;
using nlohmann::json;

enum class PenaltyRubric { layout, style };

inline const char* rubric_header(PenaltyRubric r) {
  return r == PenaltyRubric::layout ? "Layout Penalties:" : "Style Consistency Penalties:";
}

inline const std::vector<Rational>& rubric_magnitudes(PenaltyRubric r) {
  return r == PenaltyRubric::layout ? layout_penalty_magnitudes() : style_penalty_magnitudes();
}

struct ExtractedElements {
  std::vector<std::string> image;
  std::vector<std::string> video;
  std::vector<std::string> chart;

  bool empty() const { return image.empty() && video.empty() && chart.empty(); }
};

inline ordered_json extracted_to_json(const ExtractedElements& e) {
  ordered_json j;
  j["image"] = e.image;
  j["video"] = e.video;
  j["chart"] = e.chart;
  return j;
}

struct MissingReport {
  std::map<int, std::string> image;
  std::map<int, std::string> video;
  std::map<int, std::string> chart;

  size_t total() const { return image.size() + video.size() + chart.size(); }
};

struct AestheticsScores {
  GradedScore layout;
  GradedScore typography;
  GradedScore color;
  GradedScore clarity;
  GradedScore professional;
};

inline Rational aesthetics_mean(const AestheticsScores& s) {
  return graded_mean({s.layout, s.typography, s.color, s.clarity, s.professional});
}

struct ElementEvalResult {
  std::string asset_path;
  std::string description;
  std::string user_prompt_excerpt;
  std::string reasoning;  // video rubric justification; empty for other kinds
  std::vector<std::string> element_issues;
  std::vector<std::string> element_solutions;
  std::vector<std::string> webpage_issues;
  std::vector<std::string> webpage_solutions;
  std::vector<std::string> notes;  // discarded-solution annotations
  GradedScore score;
};

struct PenaltyEval {
  PenaltyReport report;
  std::vector<std::string> repair_notes;
  Rational score;
  std::string raw_text;  // judge's penalty text, kept verbatim for audit
};

struct AestheticsEval {
  AestheticsScores scores;
  Rational mean;
  std::string raw_text;
};

struct SampleEvalReport {
  PenaltyEval layout;
  PenaltyEval style;
  AestheticsEval aesthetics;
  std::vector<ElementEvalResult> images;
  std::vector<ElementEvalResult> videos;
  std::vector<ElementEvalResult> charts;
  MissingReport missing;
};

// Issue counting is the scoring authority for images and charts: judges are
// asked to subtract 0.2 per issue but miscount, so the score is recomputed.
inline Rational normalized_issue_score(size_t issue_count) {
  Rational s = Rational(1) - Rational(1, 5) * Rational(int64_t(issue_count));
  return s < Rational(0) ? Rational(0) : s;
}

inline const char* const kAllowedCssNote = "Allowed CSS properties (keep to these)";

inline const std::set<std::string>& allowed_patch_properties() {
  static const std::set<std::string> props{
      "object-fit",          "object-position",   "transform",        "transform-origin",
      "background-position", "background-size",   "background-repeat"};
  return props;
}

// A patch rule qualifies only when it has a declaration block and every
// declared property is on the whitelist.
inline bool style_rule_allowed(const std::string& rule) {
  size_t open = rule.find('{');
  size_t close = rule.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close <= open) return false;
  bool any = false;
  for (const auto& decl : split(rule.substr(open + 1, close - open - 1), ';')) {
    std::string d = trim(decl);
    if (d.empty()) continue;
    size_t colon = d.find(':');
    if (colon == std::string::npos) return false;
    if (!allowed_patch_properties().count(lower(trim(d.substr(0, colon))))) return false;
    any = true;
  }
  return any;
}

inline std::string render_penalty_report(const PenaltyReport& report, PenaltyRubric rubric) {
  std::string out = rubric_header(rubric);
  out += "\n";
  for (const auto& item : report.items)
    out += "- " + item.issue + ": Penalty--" + item.value.to_string() + "\n";
  out += "Total Penalty: " + report.reported_total.to_string() + "\n";
  return out;
}

// Recovers a penalty report from judge text. The computed sum always wins over
// the judge's total, and off-rubric magnitudes snap to the nearest allowed
// value; every such correction lands in repair_notes.
inline PenaltyReport parse_penalty_report(const std::string& raw, PenaltyRubric rubric,
                                          std::vector<std::string>* repair_notes = nullptr) {
  auto note = [&](std::string n) {
    if (repair_notes) repair_notes->push_back(std::move(n));
  };
  PenaltyReport report;
  std::optional<Rational> claimed;
  bool saw_total_line = false;
  for (const auto& line : split_lines(raw)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("Total Penalty:", 0) == 0) {
      saw_total_line = true;
      try {
        claimed = Rational::from_string(trim(t.substr(14)));
      } catch (const ParseError&) {
        note("unreadable total dropped: " + t);
      }
      continue;
    }
    if (t.rfind("- ", 0) != 0) continue;
    size_t mark = t.rfind(": Penalty--");
    if (mark == std::string::npos) continue;
    std::string issue = trim(t.substr(2, mark - 2));
    Rational value;
    try {
      value = Rational::from_string(trim(t.substr(mark + 11)));
    } catch (const ParseError&) {
      note("unreadable penalty dropped: " + t);
      continue;
    }
    const auto& mags = rubric_magnitudes(rubric);
    if (std::find(mags.begin(), mags.end(), value) == mags.end()) {
      Rational best = mags.front();
      for (const auto& m : mags) {
        Rational da = value > m ? value - m : m - value;
        Rational db = value > best ? value - best : best - value;
        if (da < db) best = m;
      }
      note("penalty " + value.to_string() + " off the rubric; clamped to " + best.to_string() +
           " for: " + issue);
      value = best;
    }
    report.items.push_back({issue, value});
  }
  if (report.items.empty() && !saw_total_line)
    throw EvalError("penalty report has no items and no total: " + raw.substr(0, 120));
  Rational computed;
  for (const auto& item : report.items) computed = computed + item.value;
  if (claimed && *claimed != computed)
    note("reported total " + claimed->to_string() + " replaced by computed " +
         computed.to_string());
  report.reported_total = computed;
  return report;
}

inline AestheticsScores parse_aesthetics(const std::string& raw) {
  std::map<std::string, Rational> seen;
  for (const auto& line : split_lines(raw)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw EvalError("aesthetics line is not an aspect score: " + t);
    std::string name = lower(trim(t.substr(0, colon)));
    Rational v;
    try {
      v = Rational::from_string(trim(t.substr(colon + 1)));
    } catch (const ParseError&) {
      throw EvalError("aesthetics score unreadable in: " + t);
    }
    bool on_scale = false;
    for (const auto& g : graded_scale())
      if (g != Rational(0) && g == v) on_scale = true;
    if (!on_scale) throw EvalError("aesthetics score off the allowed scale in: " + t);
    if (!seen.emplace(name, v).second) throw EvalError("duplicate aesthetics aspect: " + name);
  }
  if (seen.size() != 5) throw EvalError("aesthetics must be exactly five aspect lines");
  AestheticsScores s;
  const std::pair<const char*, GradedScore*> slots[] = {{"layout", &s.layout},
                                                        {"typography", &s.typography},
                                                        {"color", &s.color},
                                                        {"clarity", &s.clarity},
                                                        {"professional", &s.professional}};
  for (const auto& [name, slot] : slots) {
    auto it = seen.find(name);
    if (it == seen.end()) throw EvalError(std::string("aesthetics aspect missing: ") + name);
    slot->value = it->second;
  }
  return s;
}

namespace detail {

template <typename T>
struct Judged {
  T value;
  std::string raw_text;
};

inline void require_judge(const providers::ToolProvider& judge) {
  if (judge.kind != "judge")
    throw ConfigError("evaluation needs a judge provider, got: " + judge.kind);
}

// One strict parse attempt, then one fixed reprompt appended as a follow-up
// user turn; a second format violation propagates.
template <typename ParseFn>
auto judged_call(const providers::ToolProvider& judge, providers::ToolRequest req, ParseFn parse)
    -> Judged<decltype(parse(std::string()))> {
  require_judge(judge);
  auto first = providers::call_provider(judge, req);
  try {
    return {parse(first.text), first.text};
  } catch (const EvalError&) {
    req.user += "\n\n";
    req.user += prompts::kFormatReprompt;
    auto second = providers::call_provider(judge, req);
    return {parse(second.text), second.text};
  }
}

inline json parse_judge_json(const std::string& text) {
  std::string body = trim(text);
  if (body.rfind("```", 0) == 0) body = planner::strip_code_fences(body);
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw EvalError(std::string("judge reply is not valid JSON: ") + e.what());
  }
}

inline std::string string_field(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string())
    throw EvalError("judge reply missing text field: " + key);
  return j[key].get<std::string>();
}

inline std::vector<std::string> string_list(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw EvalError("judge reply missing list field: " + key);
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw EvalError("judge reply has a non-text entry in: " + key);
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline Rational graded_from_json(const json& j, const std::string& key, bool allow_zero) {
  if (!j.contains(key) || !j[key].is_number())
    throw EvalError("judge reply missing numeric field: " + key);
  double v = j[key].get<double>();
  for (const auto& g : graded_scale()) {
    if (!allow_zero && g == Rational(0)) continue;
    if (std::abs(g.to_double() - v) < 1e-9) return g;
  }
  throw EvalError("judge score off the graded scale: " + std::to_string(v));
}

inline std::string embed_info(const renderer::ElementCrop& crop) {
  std::vector<std::string> parts;
  parts.push_back("bbox " + std::to_string(crop.bbox.x) + "," + std::to_string(crop.bbox.y) +
                  " " + std::to_string(crop.bbox.w) + "x" + std::to_string(crop.bbox.h));
  for (const auto& [k, v] : crop.diagnostics) parts.push_back(k + ": " + v);
  return join(parts, "; ");
}

}  // namespace detail

inline ExtractedElements extract_elements(const providers::ToolProvider& judge,
                                          const std::string& design_prompt) {
  providers::ToolRequest req;
  req.tag = "extraction";
  req.system = prompts::kExtractionSystem;
  req.user = prompts::extraction_user(design_prompt);
  req.extra["design_prompt"] = design_prompt;
  auto out = detail::judged_call(judge, req, [](const std::string& text) {
    json j = detail::parse_judge_json(text);
    if (!j.is_object()) throw EvalError("extraction reply is not a JSON object");
    ExtractedElements e;
    e.image = detail::string_list(j, "image");
    e.video = detail::string_list(j, "video");
    e.chart = detail::string_list(j, "chart");
    return e;
  });
  return out.value;
}

// Nothing extracted means nothing can be missing, so the judge is skipped.
inline MissingReport check_completeness(const providers::ToolProvider& judge,
                                        const std::string& design_prompt,
                                        const ExtractedElements& extracted,
                                        const ExtractedElements& existing) {
  if (extracted.empty()) return {};
  providers::ToolRequest req;
  req.tag = "completeness";
  req.system = prompts::kCompletenessSystem;
  req.user = prompts::completeness_user(design_prompt, extracted_to_json(extracted).dump(2),
                                        extracted_to_json(existing).dump(2));
  req.extra["extracted"] = extracted_to_json(extracted).dump();
  req.extra["existing"] = extracted_to_json(existing).dump();
  auto parse_kind = [](const json& j, const char* kind) {
    std::map<int, std::string> out;
    if (!j.contains(kind)) throw EvalError(std::string("completeness reply missing: ") + kind);
    const json& v = j[kind];
    if (v.is_array()) {
      if (!v.empty()) throw EvalError("completeness arrays must be empty when nothing is missing");
      return out;
    }
    if (!v.is_object()) throw EvalError("completeness kinds must be maps or empty arrays");
    for (const auto& [key, desc] : v.items()) {
      if (key.rfind("missing-", 0) != 0)
        throw EvalError("completeness keys must look like missing-<n>: " + key);
      std::string digits = key.substr(8);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw EvalError("bad missing index: " + key);
      if (!desc.is_string()) throw EvalError("missing description must be text: " + key);
      out[std::atoi(digits.c_str())] = desc.get<std::string>();
    }
    return out;
  };
  auto out = detail::judged_call(judge, req, [&](const std::string& text) {
    json j = detail::parse_judge_json(text);
    MissingReport m;
    m.image = parse_kind(j, "image");
    m.video = parse_kind(j, "video");
    m.chart = parse_kind(j, "chart");
    return m;
  });
  return out.value;
}

inline PenaltyEval eval_penalties(const providers::ToolProvider& judge, PenaltyRubric rubric,
                                  const std::string& design_prompt, const std::string& doc,
                                  const std::string& screenshot, Rational alpha) {
  providers::ToolRequest req;
  bool layout = rubric == PenaltyRubric::layout;
  req.tag = layout ? "layout_eval" : "style_eval";
  req.system = layout ? prompts::kLayoutEvalSystem : prompts::kStyleEvalSystem;
  req.user = layout ? prompts::layout_eval_user(design_prompt, doc)
                    : prompts::style_eval_user(design_prompt, doc);
  req.images.push_back(screenshot);
  req.extra["document"] = doc;
  using Parsed = std::pair<PenaltyReport, std::vector<std::string>>;
  auto out = detail::judged_call(judge, req, [&](const std::string& text) {
    std::vector<std::string> notes;
    PenaltyReport r = parse_penalty_report(text, rubric, &notes);
    return Parsed(std::move(r), std::move(notes));
  });
  PenaltyEval eval;
  eval.report = std::move(out.value.first);
  eval.repair_notes = std::move(out.value.second);
  eval.raw_text = std::move(out.raw_text);
  eval.score = score_from_penalties(eval.report, alpha);
  return eval;
}

inline PenaltyEval eval_layout(const providers::ToolProvider& judge,
                               const std::string& design_prompt, const std::string& doc,
                               const std::string& screenshot, Rational alpha = Rational(1, 5)) {
  return eval_penalties(judge, PenaltyRubric::layout, design_prompt, doc, screenshot, alpha);
}

inline PenaltyEval eval_style(const providers::ToolProvider& judge,
                              const std::string& design_prompt, const std::string& doc,
                              const std::string& screenshot, Rational alpha = Rational(1, 5)) {
  return eval_penalties(judge, PenaltyRubric::style, design_prompt, doc, screenshot, alpha);
}

// doc_context is a structured side-channel for deterministic judges; the
// rendered request carries only the prompt and screenshot.
inline AestheticsEval eval_aesthetics(const providers::ToolProvider& judge,
                                      const std::string& design_prompt,
                                      const std::string& screenshot,
                                      const std::string& doc_context = {}) {
  providers::ToolRequest req;
  req.tag = "aesthetics_eval";
  req.system = prompts::kAestheticsEvalSystem;
  req.user = prompts::aesthetics_eval_user(design_prompt);
  req.images.push_back(screenshot);
  if (!doc_context.empty()) req.extra["document"] = doc_context;
  auto out = detail::judged_call(
      judge, req, [](const std::string& text) { return parse_aesthetics(text); });
  return {out.value, aesthetics_mean(out.value), out.raw_text};
}

inline ElementEvalResult eval_image(const providers::ToolProvider& judge,
                                    const std::string& design_prompt,
                                    const std::string& full_screenshot,
                                    const renderer::ElementCrop& crop,
                                    const std::string& original_asset,
                                    const std::string& doc_excerpt) {
  providers::ToolRequest req;
  req.tag = "image_eval";
  req.system = prompts::kImageEvalSystem;
  req.user = prompts::image_eval_user(crop.asset_path, detail::embed_info(crop), doc_excerpt,
                                      design_prompt);
  req.images = {full_screenshot, crop.crop, original_asset};
  req.extra["asset_path"] = crop.asset_path;
  req.extra["excerpt"] = doc_excerpt;
  auto out = detail::judged_call(judge, req, [&](const std::string& text) {
    json j = detail::parse_judge_json(text);
    ElementEvalResult r;
    r.asset_path = crop.asset_path;
    r.description = detail::string_field(j, "description");
    r.user_prompt_excerpt = detail::string_field(j, "user_prompt");
    r.element_issues = detail::string_list(j, "image_issues");
    r.element_solutions = detail::string_list(j, "image_solutions");
    r.webpage_issues = detail::string_list(j, "webpage_issues");
    r.webpage_solutions = detail::string_list(j, "webpage_solutions");
    if (!j.contains("score") || !j["score"].is_number())
      throw EvalError("judge reply missing numeric field: score");
    return r;
  });
  ElementEvalResult r = std::move(out.value);
  r.score.value = normalized_issue_score(r.element_issues.size() + r.webpage_issues.size());
  std::vector<std::string> kept;
  for (const auto& rule : r.webpage_solutions) {
    if (style_rule_allowed(rule))
      kept.push_back(rule);
    else
      r.notes.push_back("discarded webpage solution (" + rule + "): " +
                        std::string(kAllowedCssNote));
  }
  r.webpage_solutions = std::move(kept);
  return r;
}

inline ElementEvalResult eval_video(const providers::ToolProvider& judge,
                                    const std::string& design_prompt,
                                    const renderer::FrameSample& frames,
                                    const std::string& doc_excerpt) {
  if (frames.frames.empty())
    throw std::invalid_argument("video evaluation needs at least one sampled frame");
  providers::ToolRequest req;
  req.tag = "video_eval";
  req.system = prompts::kVideoEvalSystem;
  req.user = prompts::video_eval_user(frames.asset_path, doc_excerpt, design_prompt);
  req.images = frames.frames;
  req.extra["asset_path"] = frames.asset_path;
  auto out = detail::judged_call(judge, req, [&](const std::string& text) {
    json j = detail::parse_judge_json(text);
    ElementEvalResult r;
    r.asset_path = frames.asset_path;
    r.description = detail::string_field(j, "description");
    r.user_prompt_excerpt = detail::string_field(j, "user_prompt");
    r.reasoning = detail::string_field(j, "reasoning");
    r.score.value = detail::graded_from_json(j, "score", true);
    return r;
  });
  return out.value;
}

inline ElementEvalResult eval_chart(const providers::ToolProvider& judge,
                                    const std::string& design_prompt,
                                    const std::string& full_screenshot,
                                    const renderer::ElementCrop& crop,
                                    const std::string& chart_doc,
                                    const std::string& page_doc_excerpt, int iframe_height_px,
                                    bool frame_embedded = true) {
  ElementEvalResult blank;
  blank.asset_path = crop.asset_path;
  if (crop.crop.empty() || media::is_uniform_png(crop.crop)) {
    blank.description = "Chart region renders blank.";
    blank.element_issues = {"render failure"};
    blank.score.value = Rational(0);
    return blank;
  }
  providers::ToolRequest req;
  if (frame_embedded) {
    req.tag = "chart_eval";
    req.system = prompts::kChartEvalSystem;
    req.user = prompts::chart_eval_user(crop.asset_path, iframe_height_px, chart_doc,
                                        page_doc_excerpt, design_prompt);
  } else {
    req.tag = "inline_chart_eval";
    req.system = prompts::kInlineChartEvalSystem;
    req.user = prompts::inline_chart_eval_user(crop.asset_path, detail::embed_info(crop),
                                               page_doc_excerpt, design_prompt);
  }
  req.images = {full_screenshot, crop.crop};
  req.extra["asset_path"] = crop.asset_path;
  req.extra["chart_html"] = chart_doc;
  req.extra["diagnostics"] = json(crop.diagnostics).dump();
  req.extra["excerpt"] = page_doc_excerpt;
  auto out = detail::judged_call(judge, req, [&](const std::string& text) {
    json j = detail::parse_judge_json(text);
    ElementEvalResult r;
    r.asset_path = crop.asset_path;
    r.description = detail::string_field(j, "description");
    r.user_prompt_excerpt = detail::string_field(j, "user_prompt");
    r.element_issues = detail::string_list(j, "chart_issues");
    r.element_solutions = detail::string_list(j, "chart_solutions");
    r.webpage_issues = detail::string_list(j, "webpage_issues");
    r.webpage_solutions = detail::string_list(j, "webpage_solutions");
    if (!j.contains("score") || !j["score"].is_number())
      throw EvalError("judge reply missing numeric field: score");
    return r;
  });
  ElementEvalResult r = std::move(out.value);
  r.score.value = normalized_issue_score(r.element_issues.size() + r.webpage_issues.size());
  return r;
}

inline std::optional<Rational> local_dimension_score(
    const std::vector<ElementEvalResult>& elements, size_t missing_count) {
  size_t n = elements.size() + missing_count;
  if (n == 0) return std::nullopt;
  Rational sum;
  for (const auto& e : elements) sum = sum + e.score.value;
  return sum * Rational(1, int64_t(n));
}

inline std::optional<Rational> sample_dimension_score(const SampleEvalReport& r, Dimension d) {
  switch (d) {
    case Dimension::layout: return r.layout.score;
    case Dimension::style: return r.style.score;
    case Dimension::aesthetics: return r.aesthetics.mean;
    case Dimension::image: return local_dimension_score(r.images, r.missing.image.size());
    case Dimension::video: return local_dimension_score(r.videos, r.missing.video.size());
    case Dimension::chart: return local_dimension_score(r.charts, r.missing.chart.size());
  }
  return std::nullopt;
}

// Samples that planned no elements of a kind stay out of that dimension's
// denominator; a dimension nobody covers reports 0 with a zero sample count.
inline std::pair<std::vector<DimensionScore>, Rational> aggregate_benchmark(
    const std::vector<SampleEvalReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("benchmark aggregation needs at least one sample");
  std::vector<DimensionScore> dims;
  for (int d = 0; d < 6; ++d) {
    DimensionScore ds;
    ds.dimension = Dimension(d);
    Rational sum;
    for (const auto& r : reports) {
      if (auto v = sample_dimension_score(r, ds.dimension)) {
        sum = sum + *v;
        ++ds.sample_count;
      }
    }
    if (ds.sample_count > 0) ds.value = sum * Rational(1, ds.sample_count);
    dims.push_back(ds);
  }
  Rational overall = aggregate_overall(dims);
  return {std::move(dims), overall};
}

struct PlannedElement {
  std::string path;
  std::string description;
};

struct PlannedElements {
  std::vector<PlannedElement> images;
  std::vector<PlannedElement> videos;
  std::vector<PlannedElement> charts;
};

inline PlannedElements planned_elements(const planner::GenerationPlan& plan) {
  PlannedElements out;
  for (const auto& p : plan.image_generation) out.images.push_back({p.save_path, p.prompt});
  for (const auto& p : plan.video_generation) out.videos.push_back({p.save_path, p.prompt});
  for (const auto& p : plan.data_visualization) out.charts.push_back({p.save_path, p.prompt});
  return out;
}

// Windows around every occurrence of the path, so the excerpt carries both the
// embedding markup and any style rules that target the asset.
inline std::string doc_excerpt_for(const std::string& doc, const std::string& path,
                                   size_t radius = 300) {
  std::vector<std::pair<size_t, size_t>> spans;
  for (size_t pos = doc.find(path); pos != std::string::npos; pos = doc.find(path, pos + 1)) {
    size_t begin = pos > radius ? pos - radius : 0;
    size_t end = std::min(doc.size(), pos + path.size() + radius);
    if (!spans.empty() && begin <= spans.back().second)
      spans.back().second = end;
    else
      spans.emplace_back(begin, end);
  }
  if (spans.empty()) return doc.substr(0, std::min(doc.size(), 2 * radius));
  std::vector<std::string> parts;
  for (const auto& [b, e] : spans) parts.push_back(doc.substr(b, e - b));
  return join(parts, "\n...\n");
}

inline constexpr int kVideoSampleFrames = 4;

inline ordered_json penalty_eval_to_json(const PenaltyEval& p) {
  ordered_json j;
  j["penalty_text"] = p.raw_text;
  ordered_json items = ordered_json::array();
  for (const auto& it : p.report.items) {
    ordered_json i;
    i["issue"] = it.issue;
    i["value"] = it.value.to_double();
    items.push_back(std::move(i));
  }
  j["items"] = std::move(items);
  j["total"] = p.report.reported_total.to_double();
  j["repair_notes"] = p.repair_notes;
  j["score"] = p.score.to_double();
  return j;
}

inline ordered_json element_to_json(const ElementEvalResult& e, AssetKind kind) {
  ordered_json j;
  j["asset_path"] = e.asset_path;
  j["description"] = e.description;
  j["user_prompt"] = e.user_prompt_excerpt;
  if (kind == AssetKind::video) {
    j["reasoning"] = e.reasoning;
  } else {
    bool img = kind == AssetKind::image;
    j[img ? "image_issues" : "chart_issues"] = e.element_issues;
    j[img ? "image_solutions" : "chart_solutions"] = e.element_solutions;
    j["webpage_issues"] = e.webpage_issues;
    j["webpage_solutions"] = e.webpage_solutions;
  }
  j["score"] = e.score.value.to_double();
  if (!e.notes.empty()) j["notes"] = e.notes;
  return j;
}

inline ordered_json missing_to_json(const MissingReport& m) {
  auto kind = [](const std::map<int, std::string>& entries) -> ordered_json {
    if (entries.empty()) return ordered_json::array();
    ordered_json o = ordered_json::object();
    for (const auto& [idx, desc] : entries) o["missing-" + std::to_string(idx)] = desc;
    return o;
  };
  ordered_json j;
  j["image"] = kind(m.image);
  j["video"] = kind(m.video);
  j["chart"] = kind(m.chart);
  return j;
}

inline ordered_json report_to_json(const SampleEvalReport& r) {
  ordered_json j;
  j["layout"] = penalty_eval_to_json(r.layout);
  j["style"] = penalty_eval_to_json(r.style);
  ordered_json a;
  a["text"] = r.aesthetics.raw_text;
  a["layout"] = r.aesthetics.scores.layout.value.to_double();
  a["typography"] = r.aesthetics.scores.typography.value.to_double();
  a["color"] = r.aesthetics.scores.color.value.to_double();
  a["clarity"] = r.aesthetics.scores.clarity.value.to_double();
  a["professional"] = r.aesthetics.scores.professional.value.to_double();
  a["mean"] = r.aesthetics.mean.to_double();
  j["aesthetics"] = std::move(a);
  auto list = [](const std::vector<ElementEvalResult>& es, AssetKind k) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : es) arr.push_back(element_to_json(e, k));
    return arr;
  };
  j["images"] = list(r.images, AssetKind::image);
  j["videos"] = list(r.videos, AssetKind::video);
  j["charts"] = list(r.charts, AssetKind::chart);
  j["missing"] = missing_to_json(r.missing);
  ordered_json dims;
  for (int d = 0; d < 6; ++d) {
    auto v = sample_dimension_score(r, Dimension(d));
    dims[dimension_name(Dimension(d))] = v ? ordered_json(v->to_double()) : ordered_json(nullptr);
  }
  j["dimensions"] = std::move(dims);
  return j;
}

// Full single-page evaluation: render once, gather crops and frames serially
// (the browser session is single-threaded), then fan judge calls out. Elements
// that cannot be located flow into the completeness check as absent. Persists
// reports/eval-iterN.json and registers it in the manifest.
inline std::pair<WorkspaceManifest, SampleEvalReport> evaluate_sample(
    const providers::ToolProvider& judge, WorkspaceManifest manifest,
    const PlannedElements& planned, renderer::BrowserSession& session, const RunConfig& cfg) {
  detail::require_judge(judge);
  std::string doc = read_file(manifest.root / manifest.page_document_path);
  session.navigate(manifest.root, cfg.viewport);
  renderer::RenderResult rendered = session.render();

  struct ImageInput {
    PlannedElement plan;
    renderer::ElementCrop crop;
    std::string original;
    std::string excerpt;
  };
  struct VideoInput {
    PlannedElement plan;
    renderer::FrameSample frames;
    std::string excerpt;
  };
  struct ChartInput {
    PlannedElement plan;
    renderer::ElementCrop crop;
    std::string chart_doc;
    std::string excerpt;
    int height_px = 0;
  };

  ExtractedElements existing;
  std::vector<ImageInput> image_in;
  for (const auto& p : planned.images) {
    if (!fs::exists(manifest.root / p.path)) continue;
    try {
      image_in.push_back({p, session.crop_element(p.path), read_file(manifest.root / p.path),
                          doc_excerpt_for(doc, p.path)});
      existing.image.push_back(p.description);
    } catch (const renderer::NotEmbedded&) {
    }
  }
  std::vector<VideoInput> video_in;
  for (const auto& p : planned.videos) {
    if (!fs::exists(manifest.root / p.path)) continue;
    try {
      VideoInput in{p, renderer::sample_frames(manifest.root / p.path, kVideoSampleFrames),
                    doc_excerpt_for(doc, p.path)};
      in.frames.asset_path = p.path;  // keep reports workspace-relative
      video_in.push_back(std::move(in));
      existing.video.push_back(p.description);
    } catch (const RendererError&) {
    }
  }
  std::vector<ChartInput> chart_in;
  for (const auto& p : planned.charts) {
    if (!fs::exists(manifest.root / p.path)) continue;
    try {
      ChartInput in{p, session.crop_element(p.path), read_file(manifest.root / p.path),
                    doc_excerpt_for(doc, p.path), cfg.default_chart_iframe_height_px};
      if (auto it = manifest.assets.find(p.path);
          it != manifest.assets.end() && it->second.declared_height_px)
        in.height_px = *it->second.declared_height_px;
      chart_in.push_back(std::move(in));
      existing.chart.push_back(p.description);
    } catch (const renderer::NotEmbedded&) {
    }
  }

  const std::string& prompt = manifest.design_prompt;
  auto layout_task = [&] {
    return eval_layout(judge, prompt, doc, rendered.screenshot, cfg.alpha);
  };
  auto style_task = [&] {
    return eval_style(judge, prompt, doc, rendered.screenshot, cfg.alpha);
  };
  auto aesthetics_task = [&] { return eval_aesthetics(judge, prompt, rendered.screenshot, doc); };
  auto missing_task = [&] {
    ExtractedElements extracted = extract_elements(judge, prompt);
    return check_completeness(judge, prompt, extracted, existing);
  };
  auto image_task = [&](size_t i) {
    const auto& in = image_in[i];
    return eval_image(judge, prompt, rendered.screenshot, in.crop, in.original, in.excerpt);
  };
  auto video_task = [&](size_t i) {
    const auto& in = video_in[i];
    return eval_video(judge, prompt, in.frames, in.excerpt);
  };
  auto chart_task = [&](size_t i) {
    const auto& in = chart_in[i];
    return eval_chart(judge, prompt, rendered.screenshot, in.crop, in.chart_doc, in.excerpt,
                      in.height_px);
  };

  SampleEvalReport report;
  if (cfg.parallel_fanout) {
    auto f_layout = std::async(std::launch::async, layout_task);
    auto f_style = std::async(std::launch::async, style_task);
    auto f_aesthetics = std::async(std::launch::async, aesthetics_task);
    auto f_missing = std::async(std::launch::async, missing_task);
    std::vector<std::future<ElementEvalResult>> f_images, f_videos, f_charts;
    for (size_t i = 0; i < image_in.size(); ++i)
      f_images.push_back(std::async(std::launch::async, image_task, i));
    for (size_t i = 0; i < video_in.size(); ++i)
      f_videos.push_back(std::async(std::launch::async, video_task, i));
    for (size_t i = 0; i < chart_in.size(); ++i)
      f_charts.push_back(std::async(std::launch::async, chart_task, i));
    report.layout = f_layout.get();
    report.style = f_style.get();
    report.aesthetics = f_aesthetics.get();
    report.missing = f_missing.get();
    for (auto& f : f_images) report.images.push_back(f.get());
    for (auto& f : f_videos) report.videos.push_back(f.get());
    for (auto& f : f_charts) report.charts.push_back(f.get());
  } else {
    report.layout = layout_task();
    report.style = style_task();
    report.aesthetics = aesthetics_task();
    report.missing = missing_task();
    for (size_t i = 0; i < image_in.size(); ++i) report.images.push_back(image_task(i));
    for (size_t i = 0; i < video_in.size(); ++i) report.videos.push_back(video_task(i));
    for (size_t i = 0; i < chart_in.size(); ++i) report.charts.push_back(chart_task(i));
  }

  int n = 1;
  for (const auto& rel : manifest.reports)
    if (rel.rfind("reports/eval-iter", 0) == 0) ++n;
  std::string rel = "reports/eval-iter" + std::to_string(n) + ".json";
  write_file(manifest.root / rel, report_to_json(report).dump(2) + "\n");
  manifest.reports.push_back(rel);
  save_manifest(manifest);
  return {std::move(manifest), std::move(report)};
}

}  // namespace webforge::evaluator
