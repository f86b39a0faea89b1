#pragma once

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "webforge/core.hpp"
#include "webforge/util.hpp"

namespace webforge::assembler {

struct ReconciliationReport {
  std::vector<std::string> referenced_paths;
  std::vector<std::string> missing_assets;
  std::vector<std::string> orphan_assets;
};

namespace detail {

inline std::string normalize_ref(std::string v) {
  if (v.rfind("./", 0) == 0) v = v.substr(2);
  return v;
}

inline bool boundary_before(const std::string& doc, size_t pos) {
  if (pos == 0) return false;  // an attribute never starts the document
  char c = doc[pos - 1];
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// Tolerant attribute scan: name="value" / name='value' occurrences.
inline void scan_attr(const std::string& doc, const std::string& name,
                      std::vector<std::string>& out) {
  std::string needle = name + "=";
  size_t pos = 0;
  while ((pos = doc.find(needle, pos)) != std::string::npos) {
    size_t at = pos;
    pos += needle.size();
    if (!boundary_before(doc, at)) continue;
    if (pos >= doc.size()) break;
    char quote = doc[pos];
    if (quote != '"' && quote != '\'') continue;
    size_t close = doc.find(quote, pos + 1);
    if (close == std::string::npos) break;
    out.push_back(doc.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
}

inline void scan_css_urls(const std::string& doc, std::vector<std::string>& out) {
  size_t pos = 0;
  while ((pos = doc.find("url(", pos)) != std::string::npos) {
    pos += 4;
    size_t close = doc.find(')', pos);
    if (close == std::string::npos) break;
    std::string v = trim(doc.substr(pos, close - pos));
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
      v = v.substr(1, v.size() - 2);
    out.push_back(v);
    pos = close + 1;
  }
}

struct TagSpan {
  size_t begin = 0;  // at '<'
  size_t end = 0;    // one past '>'
  std::string text;  // the full opening tag
};

inline std::vector<TagSpan> find_tags(const std::string& doc, const std::string& tag) {
  std::vector<TagSpan> out;
  std::string needle = "<" + tag;
  size_t pos = 0;
  while ((pos = doc.find(needle, pos)) != std::string::npos) {
    size_t after = pos + needle.size();
    char c = after < doc.size() ? doc[after] : '\0';
    if (c != ' ' && c != '\t' && c != '\n' && c != '>' && c != '/') {
      pos = after;
      continue;
    }
    size_t close = doc.find('>', pos);
    if (close == std::string::npos) break;
    out.push_back({pos, close + 1, doc.substr(pos, close + 1 - pos)});
    pos = close + 1;
  }
  return out;
}

struct TagAttr {
  std::string name;
  std::string value;
  bool has_value = false;
};

// Parses "<name a=\"v\" b>" into its attribute list; tolerant of ' quotes.
inline std::pair<std::string, std::vector<TagAttr>> parse_tag(const std::string& tag_text) {
  std::vector<TagAttr> attrs;
  size_t i = 1;  // skip '<'
  auto skip_ws = [&] {
    while (i < tag_text.size() && (tag_text[i] == ' ' || tag_text[i] == '\t' ||
                                   tag_text[i] == '\n' || tag_text[i] == '\r'))
      ++i;
  };
  auto read_name = [&] {
    size_t start = i;
    while (i < tag_text.size() && tag_text[i] != ' ' && tag_text[i] != '\t' &&
           tag_text[i] != '\n' && tag_text[i] != '\r' && tag_text[i] != '=' &&
           tag_text[i] != '>' && tag_text[i] != '/')
      ++i;
    return tag_text.substr(start, i - start);
  };
  std::string tag_name = read_name();
  while (i < tag_text.size()) {
    skip_ws();
    if (i >= tag_text.size() || tag_text[i] == '>' ||
        (tag_text[i] == '/' && i + 1 < tag_text.size() && tag_text[i + 1] == '>'))
      break;
    TagAttr a;
    a.name = read_name();
    if (a.name.empty()) break;
    skip_ws();
    if (i < tag_text.size() && tag_text[i] == '=') {
      ++i;
      skip_ws();
      a.has_value = true;
      if (i < tag_text.size() && (tag_text[i] == '"' || tag_text[i] == '\'')) {
        char quote = tag_text[i++];
        size_t start = i;
        while (i < tag_text.size() && tag_text[i] != quote) ++i;
        a.value = tag_text.substr(start, i - start);
        if (i < tag_text.size()) ++i;
      } else {
        size_t start = i;
        while (i < tag_text.size() && tag_text[i] != ' ' && tag_text[i] != '>') ++i;
        a.value = tag_text.substr(start, i - start);
      }
    }
    attrs.push_back(std::move(a));
  }
  return {tag_name, std::move(attrs)};
}

inline std::string render_tag(const std::string& tag_name,
                              const std::vector<TagAttr>& attrs, bool self_closing) {
  std::string out = "<" + tag_name;
  for (const auto& a : attrs) {
    out += " " + a.name;
    if (a.has_value) out += "=\"" + a.value + "\"";
  }
  return out + (self_closing ? " />" : ">");
}

inline std::string attr_value(const std::vector<TagAttr>& attrs, const std::string& name) {
  for (const auto& a : attrs)
    if (a.name == name) return normalize_ref(a.value);
  return {};
}

}  // namespace detail

// Every local asset reference in the document, deduplicated and grouped by
// surface: element and framed-include sources, poster images, embedded
// objects, then style background urls.
inline std::vector<std::string> extract_references(const std::string& doc) {
  std::vector<std::string> raw;
  detail::scan_attr(doc, "src", raw);
  detail::scan_attr(doc, "poster", raw);
  detail::scan_attr(doc, "data", raw);
  detail::scan_css_urls(doc, raw);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& v : raw) {
    std::string p = detail::normalize_ref(v);
    if (p.rfind("assets/", 0) != 0) continue;
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

inline ReconciliationReport reconcile_references(const std::string& doc,
                                                 const WorkspaceManifest& manifest) {
  namespace fs = std::filesystem;
  ReconciliationReport report;
  report.referenced_paths = extract_references(doc);
  std::set<std::string> referenced(report.referenced_paths.begin(),
                                   report.referenced_paths.end());
  for (const auto& p : report.referenced_paths)
    if (!fs::exists(manifest.root / p)) report.missing_assets.push_back(p);
  for (const auto& [path, ref] : manifest.assets)
    if (!referenced.count(path) && fs::exists(manifest.root / path))
      report.orphan_assets.push_back(path);
  return report;
}

// Chart documents are embedded as framed includes with a pinned inline style:
// declared height when the plan gave one, the configured default otherwise.
inline std::string embed_charts(const std::string& doc, const std::vector<AssetRef>& charts,
                                int default_height_px = 240) {
  std::string out = doc;
  for (const auto& chart : charts) {
    if (chart.kind != AssetKind::chart)
      throw std::invalid_argument("embed_charts got a non-chart ref: " + chart.path);
    int height = chart.declared_height_px.value_or(default_height_px);
    std::string style =
        "height: " + std::to_string(height) + "px; width: 100%; border: none;";

    // normalize matching iframes in place
    for (const char* tag : {"iframe", "img", "embed"}) {
      bool to_iframe = std::string(tag) != "iframe";
      size_t offset = 0;
      for (;;) {
        auto spans = detail::find_tags(out, tag);
        const detail::TagSpan* hit = nullptr;
        for (const auto& s : spans) {
          if (s.begin < offset) continue;
          auto [name, attrs] = detail::parse_tag(s.text);
          if (detail::attr_value(attrs, "src") == chart.path) {
            hit = &s;
            break;
          }
        }
        if (!hit) break;
        std::string replacement;
        if (to_iframe) {
          replacement = "<iframe src=\"" + chart.path + "\" style=\"" + style +
                        "\"></iframe>";
        } else {
          auto [name, attrs] = detail::parse_tag(hit->text);
          bool styled = false;
          for (auto& a : attrs)
            if (a.name == "style") {
              a.value = style;
              a.has_value = true;
              styled = true;
            }
          if (!styled) attrs.push_back({"style", style, true});
          replacement = detail::render_tag(name, attrs, false);
        }
        if (replacement == hit->text) {
          offset = hit->end;
          continue;
        }
        out = out.substr(0, hit->begin) + replacement + out.substr(hit->end);
        offset = hit->begin + replacement.size();
      }
    }
  }
  return out;
}

inline WorkspaceManifest write_site(WorkspaceManifest manifest, const std::string& doc) {
  namespace fs = std::filesystem;
  if (doc.empty()) throw std::invalid_argument("page document is empty");
  auto page_path = manifest.root / manifest.page_document_path;
  if (fs::exists(page_path)) {
    std::string current = read_file(page_path);
    if (current != doc) {
      std::string stem = fs::path(manifest.page_document_path).stem().string();
      std::string archive =
          stem + ".iter" + std::to_string(manifest.iterations.size() + 1) + ".html";
      write_file(manifest.root / archive, current);
      manifest.iterations.push_back(archive);
    }
  }
  write_file(page_path, doc);
  auto referenced = extract_references(doc);
  std::set<std::string> ref_set(referenced.begin(), referenced.end());
  for (auto& [path, ref] : manifest.assets)
    if (ref_set.count(path) && ref.status != AssetStatus::planned)
      ref.status = AssetStatus::inserted;
  save_manifest(manifest);
  return manifest;
}

}  // namespace webforge::assembler
