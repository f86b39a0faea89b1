#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webforge/util.hpp"

namespace webforge {

using ordered_json = nlohmann::ordered_json;

enum class AssetKind { image, video, chart };

inline const char* asset_kind_name(AssetKind k) {
  switch (k) {
    case AssetKind::image: return "image";
    case AssetKind::video: return "video";
    case AssetKind::chart: return "chart";
  }
  return "image";
}

inline AssetKind parse_asset_kind(std::string_view s) {
  if (s == "image") return AssetKind::image;
  if (s == "video") return AssetKind::video;
  if (s == "chart") return AssetKind::chart;
  throw SchemaError("unknown asset kind: " + std::string(s), "kind");
}

inline const char* asset_kind_extension(AssetKind k) {
  switch (k) {
    case AssetKind::image: return ".png";
    case AssetKind::video: return ".mp4";
    case AssetKind::chart: return ".html";
  }
  return ".png";
}

enum class AssetStatus { planned, generated, inserted };

inline const char* asset_status_name(AssetStatus s) {
  switch (s) {
    case AssetStatus::planned: return "planned";
    case AssetStatus::generated: return "generated";
    case AssetStatus::inserted: return "inserted";
  }
  return "planned";
}

inline AssetStatus parse_asset_status(std::string_view s) {
  if (s == "planned") return AssetStatus::planned;
  if (s == "generated") return AssetStatus::generated;
  if (s == "inserted") return AssetStatus::inserted;
  throw SchemaError("unknown asset status: " + std::string(s), "status");
}

struct AssetRef {
  std::string path;
  AssetKind kind = AssetKind::image;
  std::optional<int> declared_width_px;
  std::optional<int> declared_height_px;
  AssetStatus status = AssetStatus::planned;
};

inline void validate_asset_ref(const AssetRef& ref) {
  if (ref.path.rfind("assets/", 0) != 0)
    throw SchemaError("asset path must begin with assets/: " + ref.path, "path");
  std::string ext = asset_kind_extension(ref.kind);
  if (ref.path.size() <= ext.size() ||
      ref.path.compare(ref.path.size() - ext.size(), ext.size(), ext) != 0)
    throw SchemaError("asset path extension does not match kind " +
                          std::string(asset_kind_name(ref.kind)) + ": " + ref.path,
                      "path");
  if (ref.declared_width_px && *ref.declared_width_px <= 0)
    throw SchemaError("declared width must be positive", "declared_width_px");
  if (ref.declared_height_px && *ref.declared_height_px <= 0)
    throw SchemaError("declared height must be positive", "declared_height_px");
}

struct PenaltyItem {
  std::string issue;
  Rational value;

  friend bool operator==(const PenaltyItem& a, const PenaltyItem& b) {
    return a.issue == b.issue && a.value == b.value;
  }
};

struct PenaltyReport {
  std::vector<PenaltyItem> items;
  Rational reported_total;

  friend bool operator==(const PenaltyReport& a, const PenaltyReport& b) {
    return a.items == b.items && a.reported_total == b.reported_total;
  }
};

inline const std::vector<Rational>& layout_penalty_magnitudes() {
  static const std::vector<Rational> vals{Rational(1, 10), Rational(1, 5), Rational(3, 10),
                                          Rational(1, 2), Rational(1)};
  return vals;
}

inline const std::vector<Rational>& style_penalty_magnitudes() {
  static const std::vector<Rational> vals{Rational(1, 10), Rational(1, 5), Rational(1, 2)};
  return vals;
}

struct GradedScore {
  Rational value;
};

inline const std::vector<Rational>& graded_scale() {
  static const std::vector<Rational> vals{Rational(0),     Rational(1, 5), Rational(2, 5),
                                          Rational(3, 5),  Rational(4, 5), Rational(1)};
  return vals;
}

enum class Dimension { layout, style, aesthetics, image, video, chart };

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::layout: return "layout";
    case Dimension::style: return "style";
    case Dimension::aesthetics: return "aesthetics";
    case Dimension::image: return "image";
    case Dimension::video: return "video";
    case Dimension::chart: return "chart";
  }
  return "layout";
}

inline Dimension parse_dimension(std::string_view s) {
  if (s == "layout") return Dimension::layout;
  if (s == "style") return Dimension::style;
  if (s == "aesthetics") return Dimension::aesthetics;
  if (s == "image") return Dimension::image;
  if (s == "video") return Dimension::video;
  if (s == "chart") return Dimension::chart;
  throw SchemaError("unknown dimension: " + std::string(s), "dimension");
}

struct DimensionScore {
  Dimension dimension = Dimension::layout;
  Rational value;
  int sample_count = 0;
};

struct Viewport {
  int width_px = 1280;
  int height_px = 800;
};

struct ProviderConfig {
  std::string mode = "mock";  // mock | live, plus mock:<profile> variants
  std::string endpoint;
  std::string api_key;
  std::string model;
  double simulated_latency_s = 0;  // mock only: sleep and report this latency
};

struct RunConfig {
  Rational alpha{1, 5};
  int max_reflection_iterations = 3;
  Viewport viewport;
  std::map<std::string, ProviderConfig> providers;
  int default_chart_iframe_height_px = 240;
  bool parallel_fanout = true;
};

struct WorkspaceManifest {
  std::filesystem::path root;
  std::string design_prompt;
  std::map<std::string, AssetRef> assets;
  std::string page_document_path = "index.html";
  std::vector<std::string> reports;
  std::vector<std::string> iterations;
};

inline Rational score_from_penalties(const PenaltyReport& report, Rational alpha) {
  Rational sum;
  for (const auto& item : report.items) {
    if (item.value < Rational(0)) throw EvalError("negative penalty value: " + item.issue);
    sum = sum + item.value;
  }
  Rational score = Rational(1) - alpha * sum;
  if (score < Rational(0)) return Rational(0);
  return score;
}

inline Rational graded_mean(const std::vector<GradedScore>& scores) {
  if (scores.empty()) throw EvalError("no samples for dimension");
  Rational sum;
  for (const auto& s : scores) sum = sum + s.value;
  return sum * Rational(1, int64_t(scores.size()));
}

inline Rational aggregate_overall(const std::vector<DimensionScore>& scores) {
  if (scores.size() != 6) throw EvalError("overall score needs exactly six dimensions");
  bool seen[6] = {};
  Rational sum;
  for (const auto& s : scores) {
    int idx = int(s.dimension);
    if (seen[idx])
      throw EvalError(std::string("duplicate dimension: ") + dimension_name(s.dimension));
    seen[idx] = true;
    sum = sum + s.value;
  }
  return sum * Rational(1, 6);
}

// Persisted form keeps root as "." so a workspace stays byte-identical when
// relocated; the loader restores the live root from the manifest's directory.
inline ordered_json manifest_to_json(const WorkspaceManifest& m) {
  ordered_json j;
  j["root"] = ".";
  j["design_prompt"] = m.design_prompt;
  ordered_json assets = ordered_json::object();
  for (const auto& [path, ref] : m.assets) {
    ordered_json a;
    a["path"] = ref.path;
    a["kind"] = asset_kind_name(ref.kind);
    if (ref.declared_width_px) a["declared_width_px"] = *ref.declared_width_px;
    if (ref.declared_height_px) a["declared_height_px"] = *ref.declared_height_px;
    a["status"] = asset_status_name(ref.status);
    assets[path] = std::move(a);
  }
  j["assets"] = std::move(assets);
  j["page_document_path"] = m.page_document_path;
  j["reports"] = m.reports;
  j["iterations"] = m.iterations;
  return j;
}

inline void save_manifest(const WorkspaceManifest& m) {
  write_file(m.root / "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

inline WorkspaceManifest load_manifest(const std::filesystem::path& root) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(root / "manifest.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest.json: ") + e.what(), size_t(e.byte));
  }
  WorkspaceManifest m;
  m.root = root;
  m.design_prompt = j.at("design_prompt").get<std::string>();
  m.page_document_path = j.at("page_document_path").get<std::string>();
  for (const auto& [path, a] : j.at("assets").items()) {
    AssetRef ref;
    ref.path = a.at("path").get<std::string>();
    ref.kind = parse_asset_kind(a.at("kind").get<std::string>());
    if (a.contains("declared_width_px")) ref.declared_width_px = a["declared_width_px"].get<int>();
    if (a.contains("declared_height_px"))
      ref.declared_height_px = a["declared_height_px"].get<int>();
    ref.status = parse_asset_status(a.at("status").get<std::string>());
    if (ref.path != path) throw SchemaError("asset key does not match its path field", "assets");
    m.assets[path] = ref;
  }
  m.reports = j.at("reports").get<std::vector<std::string>>();
  m.iterations = j.at("iterations").get<std::vector<std::string>>();
  return m;
}

inline WorkspaceManifest new_workspace(const std::filesystem::path& root,
                                       const std::string& design_prompt, const RunConfig&) {
  namespace fs = std::filesystem;
  if (fs::exists(root) && !fs::is_empty(root))
    throw ConfigError("workspace root exists and is not empty: " + root.string());
  fs::create_directories(root / "assets");
  fs::create_directories(root / "reports");
  fs::create_directories(root / "renders");
  WorkspaceManifest m;
  m.root = root;
  m.design_prompt = design_prompt;
  save_manifest(m);
  return m;
}

inline WorkspaceManifest register_asset(WorkspaceManifest manifest, const AssetRef& ref) {
  validate_asset_ref(ref);
  if (manifest.assets.count(ref.path))
    throw SchemaError("duplicate asset path: " + ref.path, "path");
  manifest.assets[ref.path] = ref;
  return manifest;
}

}  // namespace webforge
