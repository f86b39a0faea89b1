#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "webforge/assembler.hpp"
#include "webforge/core.hpp"
#include "webforge/evaluator.hpp"
#include "webforge/generators.hpp"
#include "webforge/prompts.hpp"
#include "webforge/providers.hpp"
#include "webforge/renderer.hpp"
#include "webforge/util.hpp"

// Three-level page refinement driven by evaluation findings: local asset
// edits, in-context style and container fixes, and whole-page rewrites.
namespace webforge::reflector {

enum class ReflectionLevel { local, context, global };

inline const char* reflection_level_name(ReflectionLevel l) {
  switch (l) {
    case ReflectionLevel::local: return "local";
    case ReflectionLevel::context: return "context";
    case ReflectionLevel::global: return "global";
  }
  return "local";
}

enum class ActionKind {
  edit_image,
  rewrite_chart,
  patch_styles,
  rewrite_page,
  fix_chart_container,
};

inline const char* action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::edit_image: return "edit_image";
    case ActionKind::rewrite_chart: return "rewrite_chart";
    case ActionKind::patch_styles: return "patch_styles";
    case ActionKind::rewrite_page: return "rewrite_page";
    case ActionKind::fix_chart_container: return "fix_chart_container";
  }
  return "edit_image";
}

struct ReflectionAction {
  ReflectionLevel level = ReflectionLevel::local;
  std::string target;  // asset path, or "page" for whole-page rewrites
  ActionKind kind = ActionKind::edit_image;
  std::vector<std::string> payload;    // edit instructions, issues, or style rules
  std::vector<std::string> solutions;  // container fixes carry page-side suggestions
};

// One optional score per dimension, in the Dimension enum order; a dimension
// stays empty when the plan called for none of that element kind.
using ScoreSnapshot = std::array<std::optional<Rational>, 6>;

inline ScoreSnapshot snapshot_scores(const evaluator::SampleEvalReport& report) {
  ScoreSnapshot out;
  for (int i = 0; i < 6; ++i)
    out[size_t(i)] = evaluator::sample_dimension_score(report, Dimension(i));
  return out;
}

struct IterationRecord {
  int index = 0;  // 0 when the initial evaluation was already clean
  std::vector<ReflectionAction> actions;
  ScoreSnapshot pre_scores;
  ScoreSnapshot post_scores;
  bool converged = false;
  std::vector<std::string> notes;
};

// Maps a sample evaluation onto concrete refinement work, grouped by level:
// asset-local edits first, then in-page fixes, then at most one page rewrite.
inline std::vector<ReflectionAction> plan_actions(const evaluator::SampleEvalReport& report) {
  std::vector<ReflectionAction> out;
  for (const auto& img : report.images)
    if (!img.element_solutions.empty())
      out.push_back({ReflectionLevel::local, img.asset_path, ActionKind::edit_image,
                     img.element_solutions,
                     {}});
  for (const auto& ch : report.charts)
    if (!ch.element_solutions.empty())
      out.push_back({ReflectionLevel::local, ch.asset_path, ActionKind::rewrite_chart,
                     ch.element_solutions,
                     {}});
  for (const auto& img : report.images)
    if (!img.webpage_solutions.empty())
      out.push_back({ReflectionLevel::context, img.asset_path, ActionKind::patch_styles,
                     img.webpage_solutions,
                     {}});
  for (const auto& ch : report.charts)
    if (!ch.webpage_issues.empty() || !ch.webpage_solutions.empty())
      out.push_back({ReflectionLevel::context, ch.asset_path, ActionKind::fix_chart_container,
                     ch.webpage_issues.empty() ? ch.webpage_solutions : ch.webpage_issues,
                     ch.webpage_solutions});
  std::vector<std::string> page_issues;
  for (const auto& item : report.layout.report.items) page_issues.push_back(item.issue);
  for (const auto& item : report.style.report.items) page_issues.push_back(item.issue);
  if (!page_issues.empty())
    out.push_back({ReflectionLevel::global, "page", ActionKind::rewrite_page,
                   std::move(page_issues),
                   {}});
  return out;
}

namespace detail {

inline std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& it : items) out += "- " + it + "\n";
  return out;
}

inline bool style_hides(const std::map<std::string, std::string>& style) {
  try {
    if (std::stod(renderer::detail::style_or(style, "opacity", "1")) <= 0) return true;
  } catch (const std::exception&) {
  }
  return renderer::detail::style_or(style, "visibility", "visible") == "hidden" ||
         renderer::detail::style_or(style, "display", "block") == "none";
}

// Rewrites only the hiding declarations in one inline style value; everything
// else passes through untouched.
inline std::string unhide_style_value(const std::string& raw) {
  std::vector<std::string> decls;
  for (const auto& part : split(raw, ';')) {
    std::string decl = trim(part);
    if (decl.empty()) continue;
    auto colon = decl.find(':');
    if (colon != std::string::npos) {
      std::string key = lower(trim(decl.substr(0, colon)));
      std::string value = lower(trim(decl.substr(colon + 1)));
      if (key == "opacity") {
        double v = 1;
        try {
          v = std::stod(value);
        } catch (const std::exception&) {
        }
        if (v <= 0) {
          decls.push_back("opacity: 1");
          continue;
        }
      } else if (key == "visibility" && value == "hidden") {
        decls.push_back("visibility: visible");
        continue;
      } else if (key == "display" && value == "none") {
        decls.push_back("display: block");
        continue;
      }
    }
    decls.push_back(decl);
  }
  return join(decls, "; ");
}

}  // namespace detail

// True when the chart element's effective inline styles leave it visible.
inline bool chart_visible_in(const std::string& doc, const std::string& chart_path) {
  auto elements = renderer::detail::scan_stub_elements(doc, std::filesystem::path{}, Viewport{});
  for (const auto& el : elements)
    if (el.path == chart_path)
      return el.opacity > 0 && el.visibility != "hidden" && el.display != "none";
  return false;
}

// Last-resort container fix: rewrites hiding inline declarations on the chart
// element and its open ancestors, leaving the rest of the page untouched.
inline std::string force_chart_visibility(const std::string& doc, const std::string& chart_path) {
  struct OpenTag {
    std::string name;
    size_t begin = 0;
    size_t end = 0;
    std::string text;
  };
  struct TagEdit {
    size_t begin = 0;
    size_t end = 0;
    std::string text;
  };
  std::vector<OpenTag> open;
  std::map<size_t, TagEdit> edits;

  auto queue_unhide = [&](size_t begin, size_t end, const std::string& tag_text) {
    auto [name, attrs] = assembler::detail::parse_tag(tag_text);
    bool hides = false;
    for (auto& a : attrs) {
      if (lower(a.name) != "style" || !a.has_value) continue;
      if (detail::style_hides(renderer::detail::parse_inline_style(a.value))) {
        a.value = detail::unhide_style_value(a.value);
        hides = true;
      }
    }
    if (!hides) return;
    bool self_closing = tag_text.size() >= 2 && tag_text[tag_text.size() - 2] == '/';
    edits.emplace(begin,
                  TagEdit{begin, end, assembler::detail::render_tag(name, attrs, self_closing)});
  };

  size_t pos = 0;
  while (true) {
    size_t lt = doc.find('<', pos);
    if (lt == std::string::npos) break;
    if (lt + 1 < doc.size() && doc[lt + 1] == '!') {
      size_t gt = doc.find('>', lt);
      if (gt == std::string::npos) break;
      pos = gt + 1;
      continue;
    }
    if (lt + 1 < doc.size() && doc[lt + 1] == '/') {
      size_t gt = doc.find('>', lt);
      if (gt == std::string::npos) break;
      std::string name = lower(trim(doc.substr(lt + 2, gt - lt - 2)));
      for (size_t i = open.size(); i-- > 0;)
        if (open[i].name == name) {
          open.erase(open.begin() + long(i));
          break;
        }
      pos = gt + 1;
      continue;
    }
    size_t gt = doc.find('>', lt);
    if (gt == std::string::npos) break;
    std::string tag_text = doc.substr(lt, gt - lt + 1);
    auto [raw_name, attrs] = assembler::detail::parse_tag(tag_text);
    std::string name = lower(raw_name);
    pos = gt + 1;

    if (name == "script" || name == "style") {
      size_t end = doc.find("</" + name, pos);
      pos = end == std::string::npos ? doc.size() : end;
      continue;
    }

    if (renderer::detail::is_media_tag(name) &&
        assembler::detail::attr_value(attrs, "src") == chart_path) {
      for (const auto& anc : open) queue_unhide(anc.begin, anc.end, anc.text);
      queue_unhide(lt, gt + 1, tag_text);
    }

    bool self_closing = tag_text.size() >= 2 && tag_text[tag_text.size() - 2] == '/';
    if (renderer::detail::is_container_tag(name) && !self_closing)
      open.push_back({name, lt, gt + 1, tag_text});
  }

  std::string out = doc;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it)
    out.replace(it->second.begin, it->second.end - it->second.begin, it->second.text);
  return out;
}

inline constexpr const char* kReflectionStyleOpen = "<style data-reflection-patches>";

// Appends whitelisted rules inside a dedicated style block; everything else
// in the document stays byte-identical. Rejected rules land in notes.
inline std::string apply_style_patches(std::string doc, const std::vector<std::string>& rules,
                                       std::vector<std::string>* notes = nullptr) {
  std::vector<std::string> accepted;
  for (const auto& raw : rules) {
    std::string rule = trim(raw);
    if (rule.empty()) continue;
    if (evaluator::style_rule_allowed(rule))
      accepted.push_back(rule);
    else if (notes)
      notes->push_back("rejected style patch (" + rule + "): " +
                       std::string(evaluator::kAllowedCssNote));
  }
  if (accepted.empty()) return doc;

  std::string lines;
  for (const auto& r : accepted) lines += "    " + r + "\n";

  size_t open_pos = doc.find(kReflectionStyleOpen);
  if (open_pos != std::string::npos) {
    size_t close = doc.find("</style>", open_pos);
    if (close != std::string::npos) {
      doc.insert(close, lines);
      return doc;
    }
  }
  std::string block = std::string("  ") + kReflectionStyleOpen + "\n" + lines + "  </style>\n";
  size_t head_close = doc.find("</head>");
  if (head_close != std::string::npos) {
    doc.insert(head_close, block);
    return doc;
  }
  size_t body_close = doc.find("</body>");
  if (body_close != std::string::npos) {
    doc.insert(body_close, block);
    return doc;
  }
  return doc + block;
}

// Batches every instruction into one edit call; any failure keeps the
// original bytes and leaves a note instead of aborting the iteration.
inline std::string refine_image(const providers::ToolProvider& provider, const std::string& asset,
                                const std::vector<std::string>& instructions,
                                std::vector<std::string>* notes = nullptr) {
  if (instructions.empty()) throw std::invalid_argument("no image edit instructions");
  try {
    return generators::edit_image(provider, asset, instructions);
  } catch (const std::exception& e) {
    if (notes)
      notes->push_back(std::string("image edit failed; keeping the original asset (") + e.what() +
                       ")");
    return asset;
  }
}

// Asks the chart provider for a corrected document; an invalid replacement is
// retried once, then the original document wins.
inline std::string refine_chart_local(const providers::ToolProvider& provider,
                                      const std::string& chart_doc,
                                      const std::string& design_prompt,
                                      const std::vector<std::string>& issues,
                                      int iframe_height_px,
                                      std::vector<std::string>* notes = nullptr,
                                      const std::string& background = "transparent") {
  if (issues.empty()) throw std::invalid_argument("no chart issues to address");
  providers::ToolRequest req;
  req.tag = "chart_local_reflection";
  req.system = prompts::chart_local_reflection_system();
  req.user = prompts::chart_local_reflection_user(iframe_height_px, background, design_prompt,
                                                  chart_doc, detail::bullet_list(issues));
  req.extra["document"] = chart_doc;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string candidate;
    try {
      candidate = generators::detail::maybe_unfence(providers::call_provider(provider, req).text);
    } catch (const std::exception& e) {
      if (notes)
        notes->push_back(std::string("chart rewrite failed; keeping the original document (") +
                         e.what() + ")");
      return chart_doc;
    }
    if (!candidate.empty() && generators::validate_chart_doc(candidate).empty()) return candidate;
  }
  if (notes)
    notes->push_back("chart rewrite failed validation twice; keeping the original document");
  return chart_doc;
}

// Asks the page provider to fix the chart's embedding; a rewrite that still
// hides the chart is retried once, then visibility is forced directly.
inline std::string refine_chart_container(const providers::ToolProvider& provider,
                                          const std::string& page_doc,
                                          const std::string& chart_path,
                                          const std::vector<std::string>& issues,
                                          const std::vector<std::string>& solutions,
                                          int iframe_height_px,
                                          std::vector<std::string>* notes = nullptr) {
  if (issues.empty()) throw std::invalid_argument("no container issues to address");
  providers::ToolRequest req;
  req.tag = "chart_container_reflection";
  req.system = prompts::kChartContainerReflectionSystem;
  req.user = prompts::chart_container_reflection_user(chart_path, iframe_height_px,
                                                      detail::bullet_list(issues),
                                                      detail::bullet_list(solutions), page_doc);
  req.extra["document"] = page_doc;
  req.extra["chart_path"] = chart_path;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string candidate;
    try {
      candidate = generators::detail::maybe_unfence(providers::call_provider(provider, req).text);
    } catch (const std::exception& e) {
      if (notes)
        notes->push_back(std::string("container rewrite failed; forcing chart visibility (") +
                         e.what() + ")");
      return force_chart_visibility(page_doc, chart_path);
    }
    if (!candidate.empty() && chart_visible_in(candidate, chart_path)) return candidate;
  }
  if (notes)
    notes->push_back("container rewrite left the chart hidden; forcing visibility instead");
  return force_chart_visibility(page_doc, chart_path);
}

// Whole-page rewrite for layout and style findings; a rewrite that drops any
// referenced asset is retried once, then the current page wins.
inline std::string refine_global(const providers::ToolProvider& provider,
                                 const std::string& design_prompt, const std::string& page_doc,
                                 const std::vector<std::string>& issues,
                                 std::vector<std::string>* notes = nullptr) {
  if (issues.empty()) throw std::invalid_argument("no page issues to address");
  auto required = assembler::extract_references(page_doc);
  providers::ToolRequest req;
  req.tag = "global_reflection";
  req.system = prompts::global_reflection_system();
  req.user = prompts::global_reflection_user(design_prompt, page_doc, detail::bullet_list(issues));
  req.extra["document"] = page_doc;

  std::string problem = "empty document";
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string candidate;
    try {
      candidate = generators::detail::maybe_unfence(providers::call_provider(provider, req).text);
    } catch (const std::exception& e) {
      if (notes)
        notes->push_back(std::string("page rewrite failed; keeping the current page (") + e.what() +
                         ")");
      return page_doc;
    }
    if (candidate.empty()) continue;
    std::vector<std::string> missing;
    for (const auto& p : required)
      if (candidate.find(p) == std::string::npos) missing.push_back(p);
    if (missing.empty()) return candidate;
    problem = "dropped asset references: " + join(missing, ", ");
  }
  if (notes) notes->push_back("page rewrite rejected (" + problem + "); keeping the current page");
  return page_doc;
}

inline ordered_json action_to_json(const ReflectionAction& a) {
  ordered_json j;
  j["level"] = reflection_level_name(a.level);
  j["kind"] = action_kind_name(a.kind);
  j["target"] = a.target;
  j["payload"] = a.payload;
  if (!a.solutions.empty()) j["solutions"] = a.solutions;
  return j;
}

inline ordered_json snapshot_to_json(const ScoreSnapshot& s) {
  ordered_json j;
  for (int i = 0; i < 6; ++i) {
    if (s[size_t(i)])
      j[dimension_name(Dimension(i))] = s[size_t(i)]->to_double();
    else
      j[dimension_name(Dimension(i))] = nullptr;
  }
  return j;
}

inline ordered_json record_to_json(const IterationRecord& rec) {
  ordered_json j;
  j["index"] = rec.index;
  j["converged"] = rec.converged;
  j["actions"] = ordered_json::array();
  for (const auto& a : rec.actions) j["actions"].push_back(action_to_json(a));
  j["pre_scores"] = snapshot_to_json(rec.pre_scores);
  j["post_scores"] = snapshot_to_json(rec.post_scores);
  if (!rec.notes.empty()) j["notes"] = rec.notes;
  return j;
}

struct ReflectionOutcome {
  WorkspaceManifest manifest;
  std::vector<IterationRecord> records;
  evaluator::SampleEvalReport final_report;
};

// Runs refinement passes until an evaluation comes back clean or the budget
// is spent. Each applied pass archives the prior page, re-evaluates, and
// appends one record; a clean starting report yields a single index-0 record.
inline ReflectionOutcome run_reflection_loop(WorkspaceManifest manifest,
                                             const providers::ProviderSet& providers,
                                             const RunConfig& cfg,
                                             const evaluator::PlannedElements& planned,
                                             renderer::BrowserSession& session,
                                             evaluator::SampleEvalReport initial_report) {
  const auto& judge = providers.get("judge");
  const auto& page_provider = providers.get("layout");
  const auto& chart_provider = providers.get("chart");
  const auto& image_editor = providers.get("image_edit");

  auto height_for = [&](const std::string& path) {
    auto it = manifest.assets.find(path);
    if (it != manifest.assets.end() && it->second.declared_height_px)
      return *it->second.declared_height_px;
    return cfg.default_chart_iframe_height_px;
  };

  auto persist_record = [&](const IterationRecord& rec) {
    std::string rel = "reports/reflection-iter" + std::to_string(rec.index) + ".json";
    write_file(manifest.root / rel, record_to_json(rec).dump(2) + "\n");
    manifest.reports.push_back(rel);
    save_manifest(manifest);
  };

  std::vector<IterationRecord> records;
  evaluator::SampleEvalReport current = std::move(initial_report);
  int iterations_done = 0;

  for (;;) {
    auto actions = plan_actions(current);
    if (actions.empty()) {
      int index = iterations_done == 0 ? 0 : iterations_done + 1;
      if (index <= cfg.max_reflection_iterations) {
        IterationRecord rec;
        rec.index = index;
        rec.converged = true;
        rec.pre_scores = rec.post_scores = snapshot_scores(current);
        persist_record(rec);
        records.push_back(std::move(rec));
      }
      break;
    }
    if (iterations_done >= cfg.max_reflection_iterations) break;

    IterationRecord rec;
    rec.actions = actions;
    rec.pre_scores = snapshot_scores(current);

    // local phase: per-asset file edits, independent of the page document
    auto run_local = [&](const ReflectionAction& a) {
      std::vector<std::string> notes;
      auto file = manifest.root / a.target;
      if (!std::filesystem::exists(file)) {
        notes.push_back("skipped: asset file missing");
        return notes;
      }
      std::string original = read_file(file);
      std::string out = original;
      if (a.kind == ActionKind::edit_image)
        out = refine_image(image_editor, original, a.payload, &notes);
      else if (a.kind == ActionKind::rewrite_chart)
        out = refine_chart_local(chart_provider, original, manifest.design_prompt, a.payload,
                                 height_for(a.target), &notes);
      if (out != original) write_file(file, out);
      return notes;
    };

    std::vector<const ReflectionAction*> locals;
    for (const auto& a : actions)
      if (a.level == ReflectionLevel::local) locals.push_back(&a);
    std::vector<std::vector<std::string>> local_notes(locals.size());
    if (cfg.parallel_fanout && locals.size() > 1) {
      std::vector<std::future<std::vector<std::string>>> futures;
      futures.reserve(locals.size());
      for (const auto* a : locals)
        futures.push_back(std::async(std::launch::async, run_local, std::cref(*a)));
      for (size_t i = 0; i < futures.size(); ++i) local_notes[i] = futures[i].get();
    } else {
      for (size_t i = 0; i < locals.size(); ++i) local_notes[i] = run_local(*locals[i]);
    }
    for (size_t i = 0; i < locals.size(); ++i)
      for (const auto& n : local_notes[i])
        rec.notes.push_back(std::string(action_kind_name(locals[i]->kind)) + " " +
                            locals[i]->target + ": " + n);

    // context and global phases rewrite the page document single-threaded
    std::string pre_doc = read_file(manifest.root / manifest.page_document_path);
    std::string doc = pre_doc;

    std::vector<std::string> patch_rules;
    for (const auto& a : actions)
      if (a.kind == ActionKind::patch_styles)
        patch_rules.insert(patch_rules.end(), a.payload.begin(), a.payload.end());
    if (!patch_rules.empty()) {
      std::vector<std::string> notes;
      doc = apply_style_patches(std::move(doc), patch_rules, &notes);
      for (const auto& n : notes) rec.notes.push_back("patch_styles page: " + n);
    }

    for (const auto& a : actions) {
      if (a.kind != ActionKind::fix_chart_container) continue;
      std::vector<std::string> notes;
      doc = refine_chart_container(page_provider, doc, a.target, a.payload, a.solutions,
                                   height_for(a.target), &notes);
      for (const auto& n : notes)
        rec.notes.push_back("fix_chart_container " + a.target + ": " + n);
    }

    for (const auto& a : actions) {
      if (a.kind != ActionKind::rewrite_page) continue;
      std::vector<std::string> notes;
      doc = refine_global(page_provider, manifest.design_prompt, doc, a.payload, &notes);
      for (const auto& n : notes) rec.notes.push_back("rewrite_page: " + n);
    }

    // archive exactly once per applied pass, then land the new page
    if (doc == pre_doc) {
      std::string stem = std::filesystem::path(manifest.page_document_path).stem().string();
      std::string archive =
          stem + ".iter" + std::to_string(manifest.iterations.size() + 1) + ".html";
      write_file(manifest.root / archive, pre_doc);
      manifest.iterations.push_back(archive);
      save_manifest(manifest);
    } else {
      manifest = assembler::write_site(std::move(manifest), doc);
    }

    auto [updated, fresh] =
        evaluator::evaluate_sample(judge, std::move(manifest), planned, session, cfg);
    manifest = std::move(updated);

    ++iterations_done;
    rec.index = iterations_done;
    rec.post_scores = snapshot_scores(fresh);
    rec.converged = false;
    persist_record(rec);
    records.push_back(std::move(rec));
    current = std::move(fresh);
  }

  return {std::move(manifest), std::move(records), std::move(current)};
}

}  // namespace webforge::reflector
