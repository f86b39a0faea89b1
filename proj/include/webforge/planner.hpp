#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "webforge/core.hpp"
#include "webforge/prompts.hpp"
#include "webforge/util.hpp"

namespace webforge::planner {

struct ElementContext {
  std::string section;
  std::string role;
  std::string page_style;
};

struct ImageAttributes {
  std::string visual_style;
  std::string color_tone;
  std::string composition;
  std::string lighting;
};

struct VideoAttributes {
  std::string visual_style;
  std::string motion_intensity;
  std::string camera_behavior;
  std::string loopability;
};

struct ChartAttributes {
  std::string chart_type;
  std::string chart_style;
  std::string color_palette;
  std::string visual_emphasis;
};

struct LayoutPlan {
  std::string prompt;
};

struct ImagePlan {
  std::string save_path;
  ElementContext context;
  ImageAttributes compiled_attributes;
  std::string prompt;
  std::string size;
};

struct VideoPlan {
  std::string save_path;
  ElementContext context;
  VideoAttributes compiled_attributes;
  std::string prompt;
  int seconds = 8;
  std::string size;
};

struct ChartPlan {
  std::string save_path;
  ElementContext context;
  ChartAttributes compiled_attributes;
  std::string prompt;
  std::string source_data;
};

struct GenerationPlan {
  LayoutPlan code_generation;
  std::vector<ImagePlan> image_generation;
  std::vector<VideoPlan> video_generation;
  std::vector<ChartPlan> data_visualization;
};

struct Placeholder {
  std::string path;
  std::optional<int> width_px;
  std::optional<int> height_px;
  size_t begin = 0;
  size_t end = 0;
};

struct PlanViolation {
  std::string code;
  std::string path;
  std::string message;
};

inline const std::vector<std::string>& default_image_sizes() {
  static const std::vector<std::string> v{"1024x1024", "1024x1536", "1536x1024"};
  return v;
}

inline const std::vector<std::string>& allowed_video_sizes() {
  static const std::vector<std::string> v{"720x1280", "1280x720", "1024x1792", "1792x1024"};
  return v;
}

inline const std::vector<int>& allowed_video_seconds() {
  static const std::vector<int> v{4, 8, 12};
  return v;
}

inline std::pair<std::string, std::string> build_planner_request(
    const std::string& design_prompt) {
  if (design_prompt.empty()) throw std::invalid_argument("design prompt is empty");
  return {prompts::kPlannerSystem, design_prompt};
}

inline std::string strip_code_fences(std::string_view raw) {
  std::string s = trim(raw);
  if (s.rfind("```", 0) == 0) {
    size_t nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
    size_t tail = s.rfind("```");
    if (tail != std::string::npos && trim(s.substr(tail + 3)).empty()) s = s.substr(0, tail);
    s = trim(s);
  }
  return s;
}

// Drops commas that directly precede a closing brace/bracket; the planning
// model (and the instruction text's own example) emits them.
inline std::string strip_trailing_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < s.size()) {
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    if (c == ',') {
      size_t j = i + 1;
      while (j < s.size() && std::isspace(uint8_t(s[j]))) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

namespace detail {

inline const ordered_json& require_field(const ordered_json& obj, const std::string& field,
                                         const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end()) throw SchemaError("missing field " + where + "." + field, field);
  return *it;
}

inline std::string require_string(const ordered_json& obj, const std::string& field,
                                  const std::string& where) {
  const auto& v = require_field(obj, field, where);
  if (!v.is_string()) throw SchemaError(where + "." + field + " must be a string", field);
  return v.get<std::string>();
}

inline void reject_unknown(const ordered_json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw SchemaError("unknown field " + where + "." + key, key);
}

inline ElementContext parse_context(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ".context must be an object", "context");
  reject_unknown(j, {"section", "role", "page_style", "global_style"}, where + ".context");
  ElementContext ctx;
  ctx.section = require_string(j, "section", where + ".context");
  ctx.role = require_string(j, "role", where + ".context");
  bool has_page = j.contains("page_style");
  bool has_global = j.contains("global_style");
  if (has_page && has_global)
    throw SchemaError(where + ".context has both page_style and global_style", "page_style");
  if (!has_page && !has_global)
    throw SchemaError("missing field " + where + ".context.page_style", "page_style");
  ctx.page_style = require_string(j, has_page ? "page_style" : "global_style", where + ".context");
  return ctx;
}

inline int parse_seconds(const ordered_json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      size_t used = 0;
      std::string s = v.get<std::string>();
      int n = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return n;
    } catch (const std::exception&) {
      throw SchemaError(where + ".seconds is not an integer", "seconds");
    }
  }
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == int(d)) return int(d);
  }
  throw SchemaError(where + ".seconds is not an integer", "seconds");
}

}  // namespace detail

inline GenerationPlan parse_plan(const std::string& raw) {
  std::string body = strip_trailing_commas(strip_code_fences(raw));
  ordered_json j;
  try {
    j = ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("plan is not valid JSON: ") + e.what(), size_t(e.byte));
  }
  if (!j.is_object()) throw SchemaError("plan must be a JSON object", "");
  detail::reject_unknown(
      j, {"code_generation", "image_generation", "video_generation", "data_visualization"},
      "plan");
  for (auto key : {"code_generation", "image_generation", "video_generation",
                   "data_visualization"}) {
    const auto& v = detail::require_field(j, key, "plan");
    if (!v.is_array()) throw SchemaError(std::string("plan.") + key + " must be a list", key);
  }

  GenerationPlan plan;
  const auto& code = j["code_generation"];
  if (code.size() != 1)
    throw SchemaError("plan.code_generation must contain exactly one entry", "code_generation");
  detail::reject_unknown(code[0], {"prompt"}, "plan.code_generation[0]");
  plan.code_generation.prompt = detail::require_string(code[0], "prompt", "plan.code_generation[0]");
  if (plan.code_generation.prompt.empty())
    throw SchemaError("plan.code_generation[0].prompt is empty", "prompt");

  std::set<std::string> seen_paths;
  auto claim_path = [&](const std::string& path) {
    if (!seen_paths.insert(path).second)
      throw SchemaError("duplicate save_path: " + path, "save_path");
  };

  size_t idx = 0;
  for (const auto& e : j["image_generation"]) {
    std::string where = "plan.image_generation[" + std::to_string(idx++) + "]";
    detail::reject_unknown(e, {"save_path", "context", "compiled_attributes", "prompt", "size"},
                           where);
    ImagePlan p;
    p.save_path = detail::require_string(e, "save_path", where);
    claim_path(p.save_path);
    p.context = detail::parse_context(detail::require_field(e, "context", where), where);
    const auto& attrs = detail::require_field(e, "compiled_attributes", where);
    detail::reject_unknown(attrs, {"visual_style", "color_tone", "composition", "lighting"},
                           where + ".compiled_attributes");
    p.compiled_attributes.visual_style =
        detail::require_string(attrs, "visual_style", where + ".compiled_attributes");
    p.compiled_attributes.color_tone =
        detail::require_string(attrs, "color_tone", where + ".compiled_attributes");
    p.compiled_attributes.composition =
        detail::require_string(attrs, "composition", where + ".compiled_attributes");
    p.compiled_attributes.lighting =
        detail::require_string(attrs, "lighting", where + ".compiled_attributes");
    p.prompt = detail::require_string(e, "prompt", where);
    p.size = detail::require_string(e, "size", where);
    plan.image_generation.push_back(std::move(p));
  }

  idx = 0;
  for (const auto& e : j["video_generation"]) {
    std::string where = "plan.video_generation[" + std::to_string(idx++) + "]";
    detail::reject_unknown(
        e, {"save_path", "context", "compiled_attributes", "prompt", "seconds", "size"}, where);
    VideoPlan p;
    p.save_path = detail::require_string(e, "save_path", where);
    claim_path(p.save_path);
    p.context = detail::parse_context(detail::require_field(e, "context", where), where);
    const auto& attrs = detail::require_field(e, "compiled_attributes", where);
    detail::reject_unknown(attrs,
                           {"visual_style", "motion_intensity", "camera_behavior", "loopability"},
                           where + ".compiled_attributes");
    p.compiled_attributes.visual_style =
        detail::require_string(attrs, "visual_style", where + ".compiled_attributes");
    p.compiled_attributes.motion_intensity =
        detail::require_string(attrs, "motion_intensity", where + ".compiled_attributes");
    p.compiled_attributes.camera_behavior =
        detail::require_string(attrs, "camera_behavior", where + ".compiled_attributes");
    p.compiled_attributes.loopability =
        detail::require_string(attrs, "loopability", where + ".compiled_attributes");
    p.prompt = detail::require_string(e, "prompt", where);
    p.seconds = detail::parse_seconds(detail::require_field(e, "seconds", where), where);
    p.size = detail::require_string(e, "size", where);
    plan.video_generation.push_back(std::move(p));
  }

  idx = 0;
  for (const auto& e : j["data_visualization"]) {
    std::string where = "plan.data_visualization[" + std::to_string(idx++) + "]";
    detail::reject_unknown(
        e, {"save_path", "context", "compiled_attributes", "prompt", "source_data"}, where);
    ChartPlan p;
    p.save_path = detail::require_string(e, "save_path", where);
    claim_path(p.save_path);
    p.context = detail::parse_context(detail::require_field(e, "context", where), where);
    const auto& attrs = detail::require_field(e, "compiled_attributes", where);
    detail::reject_unknown(attrs, {"chart_type", "chart_style", "color_palette", "visual_emphasis"},
                           where + ".compiled_attributes");
    p.compiled_attributes.chart_type =
        detail::require_string(attrs, "chart_type", where + ".compiled_attributes");
    p.compiled_attributes.chart_style =
        detail::require_string(attrs, "chart_style", where + ".compiled_attributes");
    p.compiled_attributes.color_palette =
        detail::require_string(attrs, "color_palette", where + ".compiled_attributes");
    p.compiled_attributes.visual_emphasis =
        detail::require_string(attrs, "visual_emphasis", where + ".compiled_attributes");
    p.prompt = detail::require_string(e, "prompt", where);
    p.source_data = detail::require_string(e, "source_data", where);
    plan.data_visualization.push_back(std::move(p));
  }
  return plan;
}

namespace detail {

inline void check_path(std::vector<PlanViolation>& out, const std::string& path, AssetKind kind) {
  AssetRef ref{path, kind, {}, {}, AssetStatus::planned};
  try {
    validate_asset_ref(ref);
  } catch (const SchemaError& e) {
    out.push_back({"bad_asset_path", path, e.what()});
  }
}

inline void check_context(std::vector<PlanViolation>& out, const std::string& path,
                          const ElementContext& ctx) {
  if (ctx.section.empty() || ctx.role.empty() || ctx.page_style.empty())
    out.push_back({"empty_context_field", path, "context fields must be non-empty"});
}

}  // namespace detail

inline std::vector<PlanViolation> validate_plan(
    const GenerationPlan& plan,
    const std::vector<std::string>& allowed_image_sizes = default_image_sizes()) {
  std::vector<PlanViolation> out;
  if (trim(plan.code_generation.prompt).empty())
    out.push_back({"empty_layout_prompt", "", "layout prompt must be non-empty"});

  std::set<std::string> seen;
  auto claim = [&](const std::string& path) {
    if (!seen.insert(path).second)
      out.push_back({"duplicate_save_path", path, "save_path used more than once"});
  };

  for (const auto& p : plan.image_generation) {
    claim(p.save_path);
    detail::check_path(out, p.save_path, AssetKind::image);
    detail::check_context(out, p.save_path, p.context);
    if (p.prompt.empty()) out.push_back({"empty_prompt", p.save_path, "element prompt is empty"});
    if (std::find(allowed_image_sizes.begin(), allowed_image_sizes.end(), p.size) ==
        allowed_image_sizes.end())
      out.push_back({"image_size_not_allowed", p.save_path,
                     "size " + p.size + " not in {" + join(allowed_image_sizes, ", ") + "}"});
  }
  for (const auto& p : plan.video_generation) {
    claim(p.save_path);
    detail::check_path(out, p.save_path, AssetKind::video);
    detail::check_context(out, p.save_path, p.context);
    if (p.prompt.empty()) out.push_back({"empty_prompt", p.save_path, "element prompt is empty"});
    const auto& secs = allowed_video_seconds();
    if (std::find(secs.begin(), secs.end(), p.seconds) == secs.end())
      out.push_back({"video_seconds_not_allowed", p.save_path,
                     "seconds " + std::to_string(p.seconds) + " not in {4, 8, 12}"});
    const auto& sizes = allowed_video_sizes();
    if (std::find(sizes.begin(), sizes.end(), p.size) == sizes.end())
      out.push_back({"video_size_not_allowed", p.save_path,
                     "size " + p.size + " not in {" + join(sizes, ", ") + "}"});
  }
  for (const auto& p : plan.data_visualization) {
    claim(p.save_path);
    detail::check_path(out, p.save_path, AssetKind::chart);
    detail::check_context(out, p.save_path, p.context);
    if (p.prompt.empty()) out.push_back({"empty_prompt", p.save_path, "element prompt is empty"});
    if (trim(p.source_data).empty())
      out.push_back({"empty_source_data", p.save_path, "chart needs its dataset inline"});
  }
  return out;
}

inline std::vector<Placeholder> extract_placeholders(const std::string& layout_prompt) {
  std::vector<Placeholder> out;
  size_t pos = 0;
  while ((pos = layout_prompt.find("(path:", pos)) != std::string::npos) {
    size_t close = layout_prompt.find(')', pos);
    if (close == std::string::npos) break;
    std::string body = layout_prompt.substr(pos + 1, close - pos - 1);

    Placeholder ph;
    ph.begin = pos;
    ph.end = close + 1;
    bool ok = true;
    size_t start = 0;
    bool first = true;
    while (start <= body.size()) {
      size_t comma = body.find(',', start);
      std::string field =
          trim(comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start));
      start = comma == std::string::npos ? body.size() + 1 : comma + 1;
      if (field.empty()) continue;
      size_t colon = field.find(':');
      if (colon == std::string::npos) continue;
      std::string key = trim(field.substr(0, colon));
      std::string value = trim(field.substr(colon + 1));
      if (first) {
        if (key != "path") {
          ok = false;
          break;
        }
        ph.path = value;
        first = false;
        continue;
      }
      if (key == "width" || key == "height") {
        std::string digits = value;
        if (digits.size() > 2 && digits.compare(digits.size() - 2, 2, "px") == 0)
          digits = digits.substr(0, digits.size() - 2);
        digits = trim(digits);
        if (!digits.empty() &&
            digits.find_first_not_of("0123456789") == std::string::npos) {
          int n = std::stoi(digits);
          if (key == "width")
            ph.width_px = n;
          else
            ph.height_px = n;
        }
      }
    }
    bool recognized = ph.path.rfind("assets/", 0) == 0;
    if (recognized) {
      bool ext_ok = false;
      for (auto ext : {".png", ".mp4", ".html"}) {
        std::string e = ext;
        if (ph.path.size() > e.size() &&
            ph.path.compare(ph.path.size() - e.size(), e.size(), e) == 0)
          ext_ok = true;
      }
      recognized = ext_ok;
    }
    if (ok && recognized) out.push_back(std::move(ph));
    pos = close + 1;
  }
  return out;
}

inline std::string compile_element_prompt(const ImagePlan& p) {
  auto ctx = trim(render_template(prompts::kImageContextTemplate,
                                  {{"page_style", p.context.page_style},
                                   {"role", p.context.role},
                                   {"section", p.context.section}}));
  auto attr = trim(render_template(prompts::kImageAttributeTemplate,
                                   {{"visual_style", p.compiled_attributes.visual_style},
                                    {"color_tone", p.compiled_attributes.color_tone},
                                    {"composition", p.compiled_attributes.composition},
                                    {"lighting", p.compiled_attributes.lighting}}));
  return ctx + " " + attr + " " + trim(p.prompt);
}

inline std::string compile_element_prompt(const VideoPlan& p) {
  auto ctx = trim(render_template(prompts::kVideoContextTemplate,
                                  {{"page_style", p.context.page_style},
                                   {"role", p.context.role},
                                   {"section", p.context.section}}));
  auto attr = trim(render_template(prompts::kVideoAttributeTemplate,
                                   {{"visual_style", p.compiled_attributes.visual_style},
                                    {"motion_intensity", p.compiled_attributes.motion_intensity},
                                    {"camera_behavior", p.compiled_attributes.camera_behavior},
                                    {"loopability", p.compiled_attributes.loopability}}));
  return ctx + " " + attr + " " + trim(p.prompt);
}

inline std::string compile_element_prompt(const ChartPlan& p) {
  auto ctx = trim(render_template(prompts::kChartContextTemplate,
                                  {{"page_style", p.context.page_style},
                                   {"role", p.context.role},
                                   {"section", p.context.section}}));
  auto attr = trim(render_template(prompts::kChartAttributeTemplate,
                                   {{"chart_type", p.compiled_attributes.chart_type},
                                    {"chart_style", p.compiled_attributes.chart_style},
                                    {"color_palette", p.compiled_attributes.color_palette},
                                    {"visual_emphasis", p.compiled_attributes.visual_emphasis}}));
  return ctx + " " + attr + " " + trim(p.prompt);
}

inline std::vector<PlanViolation> cross_check(const GenerationPlan& plan) {
  std::vector<PlanViolation> out;
  auto placeholders = extract_placeholders(plan.code_generation.prompt);
  std::set<std::string> placeholder_paths;
  for (const auto& ph : placeholders) placeholder_paths.insert(ph.path);

  std::set<std::string> planned;
  for (const auto& p : plan.image_generation) planned.insert(p.save_path);
  for (const auto& p : plan.video_generation) planned.insert(p.save_path);
  for (const auto& p : plan.data_visualization) planned.insert(p.save_path);

  for (const auto& path : placeholder_paths)
    if (!planned.count(path))
      out.push_back({"unplanned_placeholder", path, "layout references an element nothing plans"});
  for (const auto& path : planned)
    if (!placeholder_paths.count(path))
      out.push_back({"orphan_element_plan", path, "planned element never referenced by the layout"});
  return out;
}

// Planned asset refs with dimensions pulled from the first matching layout
// placeholder, ready for manifest registration.
inline std::vector<AssetRef> planned_asset_refs(const GenerationPlan& plan) {
  auto placeholders = extract_placeholders(plan.code_generation.prompt);
  auto dims_for = [&](const std::string& path)
      -> std::pair<std::optional<int>, std::optional<int>> {
    for (const auto& ph : placeholders)
      if (ph.path == path) return {ph.width_px, ph.height_px};
    return {{}, {}};
  };
  std::vector<AssetRef> out;
  for (const auto& p : plan.image_generation) {
    auto [w, h] = dims_for(p.save_path);
    out.push_back({p.save_path, AssetKind::image, w, h, AssetStatus::planned});
  }
  for (const auto& p : plan.video_generation) {
    auto [w, h] = dims_for(p.save_path);
    out.push_back({p.save_path, AssetKind::video, w, h, AssetStatus::planned});
  }
  for (const auto& p : plan.data_visualization) {
    auto [w, h] = dims_for(p.save_path);
    out.push_back({p.save_path, AssetKind::chart, w, h, AssetStatus::planned});
  }
  return out;
}

inline ordered_json context_to_json(const ElementContext& ctx) {
  ordered_json j;
  j["section"] = ctx.section;
  j["role"] = ctx.role;
  j["page_style"] = ctx.page_style;
  return j;
}

inline ordered_json serialize_plan(const GenerationPlan& plan) {
  ordered_json j;
  j["code_generation"] = ordered_json::array({{{"prompt", plan.code_generation.prompt}}});
  ordered_json images = ordered_json::array();
  for (const auto& p : plan.image_generation) {
    ordered_json e;
    e["save_path"] = p.save_path;
    e["context"] = context_to_json(p.context);
    e["compiled_attributes"] = {{"visual_style", p.compiled_attributes.visual_style},
                                {"color_tone", p.compiled_attributes.color_tone},
                                {"composition", p.compiled_attributes.composition},
                                {"lighting", p.compiled_attributes.lighting}};
    e["prompt"] = p.prompt;
    e["size"] = p.size;
    images.push_back(std::move(e));
  }
  j["image_generation"] = std::move(images);
  ordered_json videos = ordered_json::array();
  for (const auto& p : plan.video_generation) {
    ordered_json e;
    e["save_path"] = p.save_path;
    e["context"] = context_to_json(p.context);
    e["compiled_attributes"] = {{"visual_style", p.compiled_attributes.visual_style},
                                {"motion_intensity", p.compiled_attributes.motion_intensity},
                                {"camera_behavior", p.compiled_attributes.camera_behavior},
                                {"loopability", p.compiled_attributes.loopability}};
    e["prompt"] = p.prompt;
    e["seconds"] = p.seconds;
    e["size"] = p.size;
    videos.push_back(std::move(e));
  }
  j["video_generation"] = std::move(videos);
  ordered_json charts = ordered_json::array();
  for (const auto& p : plan.data_visualization) {
    ordered_json e;
    e["save_path"] = p.save_path;
    e["context"] = context_to_json(p.context);
    e["compiled_attributes"] = {{"chart_style", p.compiled_attributes.chart_style},
                                {"chart_type", p.compiled_attributes.chart_type},
                                {"color_palette", p.compiled_attributes.color_palette},
                                {"visual_emphasis", p.compiled_attributes.visual_emphasis}};
    e["prompt"] = p.prompt;
    e["source_data"] = p.source_data;
    charts.push_back(std::move(e));
  }
  j["data_visualization"] = std::move(charts);
  return j;
}

inline void save_plan(const GenerationPlan& plan, const std::filesystem::path& workspace_root) {
  write_file(workspace_root / "plan.json", serialize_plan(plan).dump(2) + "\n");
}

inline GenerationPlan load_plan(const std::filesystem::path& workspace_root) {
  return parse_plan(read_file(workspace_root / "plan.json"));
}

}  // namespace webforge::planner
