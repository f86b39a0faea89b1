#pragma once

#include <string>

#include "webforge/prompt_text.hpp"
#include "webforge/util.hpp"

namespace webforge::prompts {

// The page-level reflection system embeds the layout generation rules so the
// rewriter keeps honoring them; the chart-level one embeds the chart rules.
inline std::string global_reflection_system() {
  return render_template(kGlobalReflectionSystem, {{"HTML_PROMPT", kLayoutSystem}});
}

inline std::string chart_local_reflection_system() {
  return render_template(kChartLocalReflectionSystem, {{"VIS_PROMPT_V3", kChartSystem}});
}

inline std::string layout_eval_user(const std::string& design_prompt,
                                    const std::string& generated_html) {
  return render_template(kLayoutEvalUser, {{"design_prompt", design_prompt},
                                           {"generated_html", generated_html}});
}

inline std::string style_eval_user(const std::string& design_prompt,
                                   const std::string& generated_html) {
  return render_template(kStyleEvalUser, {{"design_prompt", design_prompt},
                                          {"generated_html", generated_html}});
}

inline std::string aesthetics_eval_user(const std::string& design_prompt) {
  return render_template(kAestheticsEvalUser, {{"design_prompt", design_prompt}});
}

inline std::string extraction_user(const std::string& design_prompt) {
  return render_template(kExtractionUser, {{"design_prompt", design_prompt}});
}

inline std::string completeness_user(const std::string& design_prompt,
                                     const std::string& extracted_elements,
                                     const std::string& existing_elements) {
  return render_template(kCompletenessUser, {{"design_prompt", design_prompt},
                                             {"extracted_elements", extracted_elements},
                                             {"existing_elements", existing_elements}});
}

inline std::string image_eval_user(const std::string& image_path, const std::string& embed_info,
                                   const std::string& html_excerpt,
                                   const std::string& design_prompt) {
  return render_template(kImageEvalUser, {{"image_path", image_path},
                                          {"embed_info", embed_info},
                                          {"html_excerpt", html_excerpt},
                                          {"design_prompt", design_prompt}});
}

// The video template reuses the image_path slot name for the asset path.
inline std::string video_eval_user(const std::string& video_path,
                                   const std::string& html_excerpt,
                                   const std::string& design_prompt) {
  return render_template(kVideoEvalUser, {{"image_path", video_path},
                                          {"html_excerpt", html_excerpt},
                                          {"design_prompt", design_prompt}});
}

inline std::string chart_eval_user(const std::string& echart_path, int iframe_height_px,
                                   const std::string& generated_html,
                                   const std::string& webpage_html_excerpt,
                                   const std::string& design_prompt) {
  return render_template(kChartEvalUser,
                         {{"echart_path", echart_path},
                          {"iframe_height", std::to_string(iframe_height_px)},
                          {"generated_html", generated_html},
                          {"webpage_html_excerpt", webpage_html_excerpt},
                          {"design_prompt", design_prompt}});
}

inline std::string inline_chart_eval_user(const std::string& chart_ref,
                                          const std::string& embed_info,
                                          const std::string& html_excerpt,
                                          const std::string& design_prompt) {
  return render_template(kInlineChartEvalUser, {{"chart_ref", chart_ref},
                                                {"embed_info", embed_info},
                                                {"html_excerpt", html_excerpt},
                                                {"design_prompt", design_prompt}});
}

inline std::string global_reflection_user(const std::string& design_prompt,
                                          const std::string& generated_html,
                                          const std::string& issues_list) {
  return render_template(kGlobalReflectionUser, {{"design_prompt", design_prompt},
                                                 {"generated_html", generated_html},
                                                 {"issues_list", issues_list}});
}

inline std::string chart_local_reflection_user(int iframe_height_px,
                                               const std::string& background,
                                               const std::string& design_prompt,
                                               const std::string& generated_html,
                                               const std::string& suggestions) {
  return render_template(kChartLocalReflectionUser,
                         {{"iframe_height", std::to_string(iframe_height_px)},
                          {"background", background},
                          {"design_prompt", design_prompt},
                          {"generated_html", generated_html},
                          {"suggestions", suggestions}});
}

inline std::string chart_container_reflection_user(const std::string& chart_path,
                                                   int iframe_height_px,
                                                   const std::string& webpage_issues,
                                                   const std::string& webpage_solutions,
                                                   const std::string& webpage_html) {
  return render_template(kChartContainerReflectionUser,
                         {{"chart_path", chart_path},
                          {"iframe_height", std::to_string(iframe_height_px)},
                          {"webpage_issues", webpage_issues},
                          {"webpage_solutions", webpage_solutions},
                          {"webpage_html", webpage_html}});
}

// One fixed retry nudge for judges that broke their output contract; sent as
// a follow-up user turn, one attempt only.
inline const char* const kFormatReprompt =
    "Your previous reply did not follow the required output format. Reply again with only the "
    "required format, no extra text.";

}  // namespace webforge::prompts
