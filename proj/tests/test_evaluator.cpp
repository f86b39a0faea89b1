#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>

#include "webforge/evaluator.hpp"
#include "webforge/generators.hpp"
#include "webforge/providers.hpp"
#include "webforge/renderer.hpp"

using namespace webforge;
namespace fs = std::filesystem;
using evaluator::PenaltyRubric;

static const char* kPrompt =
    "Design a landing page for Driftwood Coffee, a small-batch roastery. Warm minimal "
    "style, cream background, walnut accents. Hero image of a pour-over setup (path: "
    "assets/hero_pourover.png, width: 1200px, height: 600px). A looping steam video "
    "(path: assets/steam_loop.mp4, width: 960px, height: 540px). A bar chart of monthly "
    "roast volume (path: assets/roast_volume.html, width: 800px, height: 300px) from the "
    "table below.\n\n| Month | Bags |\n|---|---|\n| Jan | 120 |\n| Feb | 135 |\n| Mar | 160 |";

static fs::path fresh_dir(const std::string& hint) {
  static std::atomic<int> counter{0};
  auto p = fs::temp_directory_path() /
           ("webforge-eval-" + hint + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
  fs::remove_all(p);
  return p;
}

struct Workspace {
  WorkspaceManifest manifest;
  planner::GenerationPlan plan;
};

static Workspace generated_workspace(const fs::path& root) {
  auto provider = providers::make_mock_provider("planner");
  auto res = providers::call_provider(provider, {"plan", {}, kPrompt, {}, {}});
  auto plan = planner::parse_plan(res.text);
  auto set = providers::make_mock_providers();
  RunConfig config;
  auto manifest = new_workspace(root, kPrompt, config);
  auto [updated, records] = generators::execute_plan(plan, set, config, std::move(manifest));
  return {std::move(updated), std::move(plan)};
}

struct ScriptedJudge {
  providers::ToolProvider provider;
  std::shared_ptr<std::atomic<int>> calls;
  std::shared_ptr<std::vector<providers::ToolRequest>> requests;
};

// Replays the given replies in order, repeating the last one; records every
// request for assertions on tags and reprompt text.
static ScriptedJudge scripted(std::vector<std::string> replies) {
  ScriptedJudge s;
  s.calls = std::make_shared<std::atomic<int>>(0);
  s.requests = std::make_shared<std::vector<providers::ToolRequest>>();
  auto texts = std::make_shared<std::vector<std::string>>(std::move(replies));
  s.provider.kind = "judge";
  s.provider.endpoint = "mock:test";
  s.provider.fn = [calls = s.calls, requests = s.requests,
                   texts](const providers::ToolRequest& req) -> providers::ToolResponse {
    size_t n = size_t(calls->fetch_add(1));
    requests->push_back(req);
    if (texts->empty()) return {"", {}, 0.0};
    return {(*texts)[std::min(n, texts->size() - 1)], {}, 0.0};
  };
  return s;
}

static renderer::ElementCrop crop_of(renderer::BrowserSession& session,
                                     const WorkspaceManifest& manifest, Viewport vp,
                                     const std::string& path) {
  session.navigate(manifest.root, vp);
  session.render();
  return session.crop_element(path);
}

TEST_CASE("penalty report text round-trips through parse") {
  std::vector<std::string> notes;
  auto report = evaluator::parse_penalty_report(
      "Layout Penalties:\n- Missing hero: Penalty--0.5\nTotal Penalty: 0.5",
      PenaltyRubric::layout, &notes);
  REQUIRE(report.items.size() == 1);
  CHECK(report.items[0].issue == "Missing hero");
  CHECK(report.items[0].value == Rational(1, 2));
  CHECK(report.reported_total == Rational(1, 2));
  CHECK(notes.empty());

  std::mt19937_64 rng(42);
  const std::vector<std::string> words = {"Hero crowds the nav", "Footer overlaps content",
                                          "Sidebar drifts",      "Cards misaligned",
                                          "Banner clipped",      "Sections reordered"};
  for (int round = 0; round < 100; ++round) {
    PenaltyRubric rubric = rng() % 2 == 0 ? PenaltyRubric::layout : PenaltyRubric::style;
    const auto& mags = evaluator::rubric_magnitudes(rubric);
    PenaltyReport r;
    size_t count = rng() % 5;
    for (size_t i = 0; i < count; ++i) {
      PenaltyItem item;
      item.issue = words[rng() % words.size()];
      item.value = mags[rng() % mags.size()];
      r.reported_total = r.reported_total + item.value;
      r.items.push_back(std::move(item));
    }
    std::vector<std::string> round_notes;
    auto back = evaluator::parse_penalty_report(evaluator::render_penalty_report(r, rubric),
                                                rubric, &round_notes);
    REQUIRE(back == r);
    REQUIRE(round_notes.empty());
  }
}

TEST_CASE("judge totals are recomputed and off-rubric magnitudes snap") {
  std::vector<std::string> notes;
  auto repaired = evaluator::parse_penalty_report(
      "Layout Penalties:\n- A: Penalty--0.5\n- B: Penalty--0.3\nTotal Penalty: 1.0",
      PenaltyRubric::layout, &notes);
  CHECK(repaired.reported_total == Rational(4, 5));
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].find("replaced by computed 0.8") != std::string::npos);

  notes.clear();
  auto clamped = evaluator::parse_penalty_report(
      "Layout Penalties:\n- C: Penalty--0.25\nTotal Penalty: 0.25", PenaltyRubric::layout,
      &notes);
  REQUIRE(clamped.items.size() == 1);
  CHECK(clamped.items[0].value == Rational(1, 5));
  CHECK(clamped.reported_total == Rational(1, 5));
  REQUIRE_FALSE(notes.empty());
  CHECK(notes[0].find("clamped") != std::string::npos);

  notes.clear();
  auto style = evaluator::parse_penalty_report(
      "Style Consistency Penalties:\n- D: Penalty--0.3\nTotal Penalty: 0.3",
      PenaltyRubric::style, &notes);
  CHECK(style.items[0].value == Rational(1, 5));

  auto zero = evaluator::parse_penalty_report("Layout Penalties:\nTotal Penalty: 0",
                                              PenaltyRubric::layout);
  CHECK(zero.items.empty());
  CHECK(zero.reported_total == Rational(0));

  notes.clear();
  auto untotaled = evaluator::parse_penalty_report("- E: Penalty--0.1\n- F: Penalty--0.2",
                                                   PenaltyRubric::layout, &notes);
  CHECK(untotaled.reported_total == Rational(3, 10));
  CHECK(notes.empty());

  CHECK_THROWS_AS(
      evaluator::parse_penalty_report("The layout looks fine to me.", PenaltyRubric::layout),
      EvalError);
}

TEST_CASE("issue counts map to the graded score scale") {
  for (size_t k = 0; k <= 10; ++k) {
    Rational expected = k >= 5 ? Rational(0) : Rational(int64_t(5 - k), 5);
    CHECK(evaluator::normalized_issue_score(k) == expected);
    const auto& scale = graded_scale();
    CHECK(std::find(scale.begin(), scale.end(), evaluator::normalized_issue_score(k)) !=
          scale.end());
  }
}

TEST_CASE("layout and style judgments score through the penalty formula") {
  auto root = fresh_dir("global");
  auto ws = generated_workspace(root);
  auto doc = read_file(root / "index.html");
  auto session = renderer::make_stub_session();
  session->navigate(root, Viewport{});
  auto rendered = session->render();

  auto clean = providers::make_mock_provider("judge");
  auto layout_eval = evaluator::eval_layout(clean, kPrompt, doc, rendered.screenshot);
  CHECK(layout_eval.score == Rational(1));
  CHECK(layout_eval.report.items.empty());
  CHECK(layout_eval.raw_text.find("Layout Penalties:") == 0);

  auto strict = providers::make_mock_provider("judge", 0, "strict");
  auto strict_layout = evaluator::eval_layout(strict, kPrompt, doc, rendered.screenshot);
  REQUIRE(strict_layout.report.items.size() == 1);
  CHECK(strict_layout.report.items[0].value == Rational(1, 10));
  CHECK(strict_layout.score == Rational(49, 50));

  auto strict_style = evaluator::eval_style(strict, kPrompt, doc, rendered.screenshot);
  CHECK(strict_style.score == Rational(49, 50));
  CHECK(strict_style.raw_text.find("Style Consistency Penalties:") == 0);

  auto wide = evaluator::eval_layout(strict, kPrompt, doc, rendered.screenshot, Rational(1, 2));
  CHECK(wide.score == Rational(19, 20));

  auto two = scripted({"Layout Penalties:\n- Missing critical section: Penalty--0.5\n"
                       "- Misplaced critical section: Penalty--0.2\nTotal Penalty: 0.7"});
  auto two_eval = evaluator::eval_layout(two.provider, kPrompt, doc, rendered.screenshot);
  CHECK(two_eval.score == Rational(43, 50));

  auto three = scripted({"Style Consistency Penalties:\n- Overall mismatch: Penalty--0.5\n"
                         "- Accent drift: Penalty--0.1\n- Font drift: Penalty--0.1\n"
                         "Total Penalty: 0.7"});
  auto three_eval = evaluator::eval_style(three.provider, kPrompt, doc, rendered.screenshot);
  CHECK(three_eval.score == Rational(43, 50));

  auto flaky = scripted({"I could not find any problems worth listing.",
                         "Layout Penalties:\nTotal Penalty: 0"});
  auto recovered = evaluator::eval_layout(flaky.provider, kPrompt, doc, rendered.screenshot);
  CHECK(recovered.score == Rational(1));
  CHECK(*flaky.calls == 2);
  REQUIRE(flaky.requests->size() == 2);
  CHECK((*flaky.requests)[1].user.find(prompts::kFormatReprompt) != std::string::npos);
  CHECK((*flaky.requests)[1].user.find((*flaky.requests)[0].user) != std::string::npos);

  auto hopeless = scripted({"nope", "still nope"});
  CHECK_THROWS_AS(evaluator::eval_layout(hopeless.provider, kPrompt, doc, rendered.screenshot),
                  EvalError);
  CHECK(*hopeless.calls == 2);

  auto wrong_kind = providers::make_mock_provider("image");
  CHECK_THROWS_AS(evaluator::eval_layout(wrong_kind, kPrompt, doc, rendered.screenshot),
                  ConfigError);
  fs::remove_all(root);
}

TEST_CASE("aesthetics parsing enforces five named aspects on the restricted scale") {
  auto mixed = scripted(
      {"Layout: 0.8\nTypography: 0.8\nColor: 1.0\nClarity: 0.6\nProfessional: 0.8"});
  auto eval = evaluator::eval_aesthetics(mixed.provider, kPrompt, "png");
  CHECK(eval.mean == Rational(4, 5));
  CHECK(eval.scores.color.value == Rational(1));
  CHECK(eval.scores.clarity.value == Rational(3, 5));

  auto four = scripted({"Layout: 0.8\nTypography: 0.8\nColor: 1.0\nClarity: 0.6"});
  CHECK_THROWS_AS(evaluator::eval_aesthetics(four.provider, kPrompt, "png"), EvalError);
  CHECK(*four.calls == 2);

  auto renamed = scripted(
      {"Layout: 0.8\nTypography: 0.8\nColour: 1.0\nClarity: 0.6\nProfessional: 0.8"});
  CHECK_THROWS_AS(evaluator::eval_aesthetics(renamed.provider, kPrompt, "png"), EvalError);

  auto off_scale = scripted(
      {"Layout: 0.8\nTypography: 0.3\nColor: 1.0\nClarity: 0.6\nProfessional: 0.8"});
  CHECK_THROWS_AS(evaluator::eval_aesthetics(off_scale.provider, kPrompt, "png"), EvalError);

  auto zero = scripted(
      {"Layout: 0\nTypography: 0.8\nColor: 1.0\nClarity: 0.6\nProfessional: 0.8"});
  CHECK_THROWS_AS(evaluator::eval_aesthetics(zero.provider, kPrompt, "png"), EvalError);

  auto duplicated = scripted(
      {"Layout: 0.8\nLayout: 0.8\nColor: 1.0\nClarity: 0.6\nProfessional: 0.8"});
  CHECK_THROWS_AS(evaluator::eval_aesthetics(duplicated.provider, kPrompt, "png"), EvalError);

  auto clean = providers::make_mock_provider("judge");
  CHECK(evaluator::eval_aesthetics(clean, kPrompt, "png").mean == Rational(1));
  auto strict = providers::make_mock_provider("judge", 0, "strict");
  CHECK(evaluator::eval_aesthetics(strict, kPrompt, "png").mean == Rational(4, 5));
}

TEST_CASE("extraction returns strict per-kind element lists") {
  auto judge = providers::make_mock_provider("judge");
  auto extracted = evaluator::extract_elements(judge, kPrompt);
  REQUIRE(extracted.image.size() == 1);
  REQUIRE(extracted.video.size() == 1);
  REQUIRE(extracted.chart.size() == 1);
  CHECK(extracted.image[0].find("pour-over") != std::string::npos);
  CHECK(extracted.chart[0].find("```markdown") != std::string::npos);
  CHECK(extracted.chart[0].find("| Month | Bags |") != std::string::npos);

  auto prose = scripted({"There are two images and a chart.", "Sorry, still prose."});
  CHECK_THROWS_AS(evaluator::extract_elements(prose.provider, kPrompt), EvalError);
  CHECK(*prose.calls == 2);

  auto fenced = scripted({"```json\n{\"image\":[\"a\"],\"video\":[],\"chart\":[]}\n```"});
  auto unfenced = evaluator::extract_elements(fenced.provider, kPrompt);
  CHECK(unfenced.image == std::vector<std::string>{"a"});

  auto partial = scripted({"{\"image\":[],\"chart\":[]}", "{\"image\":[],\"chart\":[]}"});
  CHECK_THROWS_AS(evaluator::extract_elements(partial.provider, kPrompt), EvalError);
}

TEST_CASE("completeness marks the tail of extracted when existing falls short") {
  auto judge = providers::make_mock_provider("judge");
  evaluator::ExtractedElements extracted;
  extracted.image = {"A hero image.", "A texture image.", "A team photo."};
  evaluator::ExtractedElements existing;
  existing.image = {"A hero image.", "A texture image."};

  auto missing = evaluator::check_completeness(judge, kPrompt, extracted, existing);
  REQUIRE(missing.image.size() == 1);
  CHECK(missing.image.at(3) == "A team photo.");
  CHECK(missing.video.empty());
  CHECK(missing.chart.empty());

  auto covered = evaluator::check_completeness(judge, kPrompt, extracted, extracted);
  CHECK(covered.total() == 0);

  auto counter = scripted({"{}"});
  auto none = evaluator::check_completeness(counter.provider, kPrompt, {}, existing);
  CHECK(none.total() == 0);
  CHECK(*counter.calls == 0);

  auto bad_key = scripted({"{\"image\":{\"lost-1\":\"x\"},\"video\":[],\"chart\":[]}",
                           "{\"image\":{\"lost-1\":\"x\"},\"video\":[],\"chart\":[]}"});
  CHECK_THROWS_AS(evaluator::check_completeness(bad_key.provider, kPrompt, extracted, existing),
                  EvalError);

  auto full_array = scripted({"{\"image\":[\"x\"],\"video\":[],\"chart\":[]}",
                              "{\"image\":[\"x\"],\"video\":[],\"chart\":[]}"});
  CHECK_THROWS_AS(
      evaluator::check_completeness(full_array.provider, kPrompt, extracted, existing),
      EvalError);
}

TEST_CASE("image judging normalizes scores and filters style patches") {
  auto root = fresh_dir("image");
  auto ws = generated_workspace(root);
  auto doc = read_file(root / "index.html");
  auto session = renderer::make_stub_session();
  auto crop = crop_of(*session, ws.manifest, Viewport{}, "assets/hero_pourover.png");
  auto original = read_file(root / "assets/hero_pourover.png");
  auto rendered = session->render();

  auto clean = providers::make_mock_provider("judge");
  auto ok = evaluator::eval_image(clean, kPrompt, rendered.screenshot, crop, original,
                                  evaluator::doc_excerpt_for(doc, crop.asset_path));
  CHECK(ok.score.value == Rational(1));
  CHECK(ok.webpage_issues.empty());

  auto strict = providers::make_mock_provider("judge", 0, "strict");
  auto cropped = evaluator::eval_image(strict, kPrompt, rendered.screenshot, crop, original,
                                       evaluator::doc_excerpt_for(doc, crop.asset_path));
  CHECK(cropped.score.value == Rational(4, 5));
  REQUIRE(cropped.webpage_solutions.size() == 1);
  CHECK(cropped.webpage_solutions[0].find("object-fit") != std::string::npos);

  auto patched = evaluator::eval_image(strict, kPrompt, rendered.screenshot, crop, original,
                                       "img { object-fit: contain; } plus surrounding markup");
  CHECK(patched.score.value == Rational(1));

  auto miscounted = scripted({R"({"description":"d","user_prompt":"u",
      "image_issues":["too dark","wrong subject"],"image_solutions":[],
      "webpage_issues":[],"webpage_solutions":[],"score":0.9})"});
  auto two = evaluator::eval_image(miscounted.provider, kPrompt, rendered.screenshot, crop,
                                   original, "excerpt");
  CHECK(two.score.value == Rational(3, 5));

  auto sloppy = scripted({R"({"description":"d","user_prompt":"u","image_issues":[],
      "image_solutions":[],"webpage_issues":["crop is off"],
      "webpage_solutions":["img.hero { object-fit: cover; }",
                           "img.hero { width: 100%; }",
                           "make the container bigger"],"score":1.0})"});
  auto filtered = evaluator::eval_image(sloppy.provider, kPrompt, rendered.screenshot, crop,
                                        original, "excerpt");
  REQUIRE(filtered.webpage_solutions.size() == 1);
  CHECK(filtered.webpage_solutions[0].find("object-fit") != std::string::npos);
  REQUIRE(filtered.notes.size() == 2);
  for (const auto& note : filtered.notes)
    CHECK(note.find(evaluator::kAllowedCssNote) != std::string::npos);

  auto overloaded = scripted({R"({"description":"d","user_prompt":"u",
      "image_issues":["a","b","c","d"],"image_solutions":[],
      "webpage_issues":["e","f"],"webpage_solutions":[],"score":0.4})"});
  auto floored = evaluator::eval_image(overloaded.provider, kPrompt, rendered.screenshot, crop,
                                       original, "excerpt");
  CHECK(floored.score.value == Rational(0));

  auto shapeless = scripted({R"({"description":"d","image_issues":[]})",
                             R"({"description":"d","image_issues":[]})"});
  CHECK_THROWS_AS(evaluator::eval_image(shapeless.provider, kPrompt, rendered.screenshot, crop,
                                        original, "excerpt"),
                  EvalError);
  CHECK(*shapeless.calls == 2);
  fs::remove_all(root);
}

TEST_CASE("video judging keeps the judge's rubric grade") {
  auto root = fresh_dir("video");
  auto ws = generated_workspace(root);
  auto frames = renderer::sample_frames(root / "assets/steam_loop.mp4",
                                        evaluator::kVideoSampleFrames);

  auto clean = providers::make_mock_provider("judge");
  auto ok = evaluator::eval_video(clean, kPrompt, frames, "excerpt");
  CHECK(ok.score.value == Rational(1));
  CHECK_FALSE(ok.reasoning.empty());
  CHECK_FALSE(ok.user_prompt_excerpt.empty());

  auto strict = providers::make_mock_provider("judge", 0, "strict");
  CHECK(evaluator::eval_video(strict, kPrompt, frames, "excerpt").score.value ==
        Rational(4, 5));

  auto weak = scripted(
      {R"({"description":"d","user_prompt":"u","reasoning":"loose theme","score":0.4})"});
  CHECK(evaluator::eval_video(weak.provider, kPrompt, frames, "excerpt").score.value ==
        Rational(2, 5));

  auto unrelated = scripted(
      {R"({"description":"d","user_prompt":"u","reasoning":"no relation","score":0.0})"});
  CHECK(evaluator::eval_video(unrelated.provider, kPrompt, frames, "excerpt").score.value ==
        Rational(0));

  auto off = scripted(
      {R"({"description":"d","user_prompt":"u","reasoning":"r","score":0.3})",
       R"({"description":"d","user_prompt":"u","reasoning":"r","score":0.3})"});
  CHECK_THROWS_AS(evaluator::eval_video(off.provider, kPrompt, frames, "excerpt"), EvalError);
  CHECK(*off.calls == 2);

  renderer::FrameSample empty;
  empty.asset_path = "assets/steam_loop.mp4";
  CHECK_THROWS_AS(evaluator::eval_video(clean, kPrompt, empty, "excerpt"),
                  std::invalid_argument);
  fs::remove_all(root);
}

TEST_CASE("chart judging short-circuits blank renders") {
  auto root = fresh_dir("chart");
  auto ws = generated_workspace(root);
  auto doc = read_file(root / "index.html");
  auto session = renderer::make_stub_session();
  auto crop = crop_of(*session, ws.manifest, Viewport{}, "assets/roast_volume.html");
  auto chart_doc = read_file(root / "assets/roast_volume.html");
  auto rendered = session->render();

  auto counter = scripted({"{}"});
  renderer::ElementCrop blank;
  blank.asset_path = "assets/roast_volume.html";
  blank.crop = media::make_solid_png(60, 40, {200, 200, 200});
  auto failed = evaluator::eval_chart(counter.provider, kPrompt, rendered.screenshot, blank,
                                      chart_doc, "excerpt", 300);
  CHECK(failed.score.value == Rational(0));
  REQUIRE(failed.element_issues.size() == 1);
  CHECK(failed.element_issues[0] == "render failure");
  CHECK(*counter.calls == 0);

  auto clean = providers::make_mock_provider("judge");
  auto ok = evaluator::eval_chart(clean, kPrompt, rendered.screenshot, crop, chart_doc,
                                  evaluator::doc_excerpt_for(doc, crop.asset_path), 300);
  CHECK(ok.score.value == Rational(1));

  auto strict = providers::make_mock_provider("judge", 0, "strict");
  auto unrevised = evaluator::eval_chart(strict, kPrompt, rendered.screenshot, crop, chart_doc,
                                         "excerpt", 300);
  CHECK(unrevised.score.value == Rational(4, 5));
  REQUIRE(unrevised.element_issues.size() == 1);

  renderer::ElementCrop hidden = crop;
  hidden.diagnostics["opacity"] = "0";
  auto invisible = evaluator::eval_chart(clean, kPrompt, rendered.screenshot, hidden, chart_doc,
                                         "excerpt", 300);
  REQUIRE(invisible.webpage_issues.size() == 1);
  CHECK(invisible.webpage_issues[0].find("opacity") != std::string::npos);
  CHECK(invisible.score.value == Rational(4, 5));

  auto adversarial = providers::make_mock_provider("judge", 0, "adversarial");
  auto both = evaluator::eval_chart(adversarial, kPrompt, rendered.screenshot, hidden,
                                    chart_doc, "excerpt", 300);
  CHECK(both.element_issues.size() == 1);
  CHECK(both.webpage_issues.size() == 1);
  CHECK(both.score.value == Rational(3, 5));

  auto inline_judge = scripted({R"({"description":"d","user_prompt":"u","chart_issues":[],
      "chart_solutions":[],"webpage_issues":[],"webpage_solutions":[],"score":1.0})"});
  auto inline_eval = evaluator::eval_chart(inline_judge.provider, kPrompt, rendered.screenshot,
                                           crop, chart_doc, "excerpt", 300, false);
  CHECK(inline_eval.score.value == Rational(1));
  REQUIRE(inline_judge.requests->size() == 1);
  CHECK((*inline_judge.requests)[0].tag == "inline_chart_eval");
  fs::remove_all(root);
}

TEST_CASE("evaluate_sample renders, fans out, and persists the iteration report") {
  auto root = fresh_dir("sample");
  auto ws = generated_workspace(root);
  auto planned = evaluator::planned_elements(ws.plan);
  auto session = renderer::make_stub_session();
  RunConfig cfg;
  auto judge = providers::make_mock_provider("judge");

  auto [manifest, report] =
      evaluator::evaluate_sample(judge, std::move(ws.manifest), planned, *session, cfg);
  CHECK(report.layout.score == Rational(1));
  CHECK(report.style.score == Rational(1));
  CHECK(report.aesthetics.mean == Rational(1));
  REQUIRE(report.images.size() == 1);
  REQUIRE(report.videos.size() == 1);
  REQUIRE(report.charts.size() == 1);
  CHECK(report.missing.total() == 0);
  for (int d = 0; d < 6; ++d) {
    auto v = evaluator::sample_dimension_score(report, Dimension(d));
    REQUIRE(v.has_value());
    CHECK(*v == Rational(1));
  }

  REQUIRE_FALSE(manifest.reports.empty());
  CHECK(manifest.reports.back() == "reports/eval-iter1.json");
  auto persisted = nlohmann::ordered_json::parse(read_file(root / "reports/eval-iter1.json"));
  CHECK(persisted["dimensions"]["layout"] == 1.0);
  CHECK(persisted["layout"]["penalty_text"].get<std::string>().rfind("Layout Penalties:", 0) ==
        0);
  CHECK(persisted["images"][0].contains("image_issues"));
  CHECK(persisted["images"][0].contains("webpage_solutions"));
  CHECK(persisted["videos"][0].contains("reasoning"));
  CHECK(persisted["charts"][0].contains("chart_issues"));
  CHECK(persisted["missing"]["image"].is_array());
  auto reloaded = load_manifest(root);
  CHECK(reloaded.reports == manifest.reports);

  auto [again, second] =
      evaluator::evaluate_sample(judge, std::move(manifest), planned, *session, cfg);
  CHECK(again.reports.back() == "reports/eval-iter2.json");
  CHECK(fs::exists(root / "reports/eval-iter2.json"));
  fs::remove_all(root);
}

TEST_CASE("parallel and sequential evaluation produce identical reports") {
  auto root_a = fresh_dir("par");
  auto root_b = fresh_dir("seq");
  auto ws_a = generated_workspace(root_a);
  auto ws_b = generated_workspace(root_b);
  auto planned = evaluator::planned_elements(ws_a.plan);
  auto judge = providers::make_mock_provider("judge", 0, "strict");
  auto session = renderer::make_stub_session();

  RunConfig parallel_cfg;
  parallel_cfg.parallel_fanout = true;
  auto [ma, ra] =
      evaluator::evaluate_sample(judge, std::move(ws_a.manifest), planned, *session, parallel_cfg);
  RunConfig sequential_cfg;
  sequential_cfg.parallel_fanout = false;
  auto [mb, rb] =
      evaluator::evaluate_sample(judge, std::move(ws_b.manifest), planned, *session, sequential_cfg);

  CHECK(evaluator::report_to_json(ra).dump(2) == evaluator::report_to_json(rb).dump(2));
  CHECK(read_file(root_a / "reports/eval-iter1.json") ==
        read_file(root_b / "reports/eval-iter1.json"));

  CHECK(ra.layout.score == Rational(49, 50));
  CHECK(ra.aesthetics.mean == Rational(4, 5));
  CHECK(*evaluator::sample_dimension_score(ra, Dimension::image) == Rational(4, 5));
  CHECK(*evaluator::sample_dimension_score(ra, Dimension::video) == Rational(4, 5));
  CHECK(*evaluator::sample_dimension_score(ra, Dimension::chart) == Rational(4, 5));
  fs::remove_all(root_a);
  fs::remove_all(root_b);
}

TEST_CASE("elements that never made it to the page flow into completeness") {
  auto root = fresh_dir("ghost");
  auto ws = generated_workspace(root);
  auto planned = evaluator::planned_elements(ws.plan);
  fs::remove(root / "assets/hero_pourover.png");
  auto session = renderer::make_stub_session();
  RunConfig cfg;
  auto judge = providers::make_mock_provider("judge");

  auto [manifest, report] =
      evaluator::evaluate_sample(judge, std::move(ws.manifest), planned, *session, cfg);
  CHECK(report.images.empty());
  REQUIRE(report.missing.image.size() == 1);
  CHECK(report.missing.image.begin()->second.find("pour-over") != std::string::npos);
  auto image_dim = evaluator::sample_dimension_score(report, Dimension::image);
  REQUIRE(image_dim.has_value());
  CHECK(*image_dim == Rational(0));
  CHECK(*evaluator::sample_dimension_score(report, Dimension::video) == Rational(1));

  auto persisted = nlohmann::ordered_json::parse(read_file(root / "reports/eval-iter1.json"));
  CHECK(persisted["missing"]["image"].is_object());
  CHECK(persisted["dimensions"]["image"] == 0.0);
  fs::remove_all(root);
}

static evaluator::ElementEvalResult scored_element(const std::string& path, Rational score) {
  evaluator::ElementEvalResult e;
  e.asset_path = path;
  e.score.value = score;
  return e;
}

static evaluator::SampleEvalReport flat_report(Rational layout, Rational style, Rational aes,
                                               std::vector<Rational> images,
                                               std::vector<Rational> videos,
                                               std::vector<Rational> charts) {
  evaluator::SampleEvalReport r;
  r.layout.score = layout;
  r.style.score = style;
  r.aesthetics.mean = aes;
  for (size_t i = 0; i < images.size(); ++i)
    r.images.push_back(scored_element("assets/i" + std::to_string(i) + ".png", images[i]));
  for (size_t i = 0; i < videos.size(); ++i)
    r.videos.push_back(scored_element("assets/v" + std::to_string(i) + ".mp4", videos[i]));
  for (size_t i = 0; i < charts.size(); ++i)
    r.charts.push_back(scored_element("assets/c" + std::to_string(i) + ".html", charts[i]));
  return r;
}

TEST_CASE("benchmark aggregation excludes unplanned kinds and zeroes missing elements") {
  auto one = flat_report(Rational(1), Rational(1), Rational(1), {Rational(1), Rational(1)}, {},
                         {});
  one.missing.image[3] = "A team photo.";
  auto [dims_one, overall_one] = evaluator::aggregate_benchmark({one});
  CHECK(dims_one[int(Dimension::image)].value == Rational(2, 3));
  CHECK(dims_one[int(Dimension::image)].sample_count == 1);
  CHECK(dims_one[int(Dimension::video)].sample_count == 0);
  CHECK(dims_one[int(Dimension::video)].value == Rational(0));

  auto with_video = flat_report(Rational(1), Rational(1), Rational(1), {Rational(1)},
                                {Rational(4, 5)}, {});
  auto without_video = flat_report(Rational(1), Rational(1), Rational(1), {Rational(1)}, {},
                                   {Rational(3, 5)});
  auto [dims, overall] = evaluator::aggregate_benchmark({with_video, without_video});
  CHECK(dims[int(Dimension::video)].value == Rational(4, 5));
  CHECK(dims[int(Dimension::video)].sample_count == 1);
  CHECK(dims[int(Dimension::chart)].value == Rational(3, 5));
  CHECK(dims[int(Dimension::image)].value == Rational(1));
  CHECK(dims[int(Dimension::image)].sample_count == 2);
  CHECK(overall == aggregate_overall(dims));

  auto [flipped_dims, flipped_overall] =
      evaluator::aggregate_benchmark({without_video, with_video});
  for (int d = 0; d < 6; ++d) {
    CHECK(flipped_dims[d].value == dims[d].value);
    CHECK(flipped_dims[d].sample_count == dims[d].sample_count);
  }
  CHECK(flipped_overall == overall);

  auto shuffled = with_video;
  std::reverse(shuffled.images.begin(), shuffled.images.end());
  auto [dims_shuffled, overall_shuffled] =
      evaluator::aggregate_benchmark({shuffled, without_video});
  CHECK(overall_shuffled == overall);

  CHECK_THROWS_AS(evaluator::aggregate_benchmark({}), std::invalid_argument);
}

TEST_CASE("adding a missing element never raises any dimension") {
  std::mt19937_64 rng(7);
  const auto& scale = graded_scale();
  auto random_report = [&] {
    auto pick = [&] { return scale[rng() % scale.size()]; };
    std::vector<Rational> imgs(rng() % 3), vids(rng() % 3), charts(rng() % 3);
    for (auto& v : imgs) v = pick();
    for (auto& v : vids) v = pick();
    for (auto& v : charts) v = pick();
    auto r = flat_report(pick(), pick(), pick(), imgs, vids, charts);
    for (int i = 0; i < int(rng() % 2); ++i) r.missing.image[100 + i] = "extra";
    return r;
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<evaluator::SampleEvalReport> reports;
    size_t count = 1 + rng() % 4;
    for (size_t i = 0; i < count; ++i) reports.push_back(random_report());
    auto [before_dims, before_overall] = evaluator::aggregate_benchmark(reports);

    auto& victim = reports[rng() % reports.size()];
    int kind = int(rng() % 3);
    if (kind == 0) victim.missing.image[999] = "late addition";
    if (kind == 1) victim.missing.video[999] = "late addition";
    if (kind == 2) victim.missing.chart[999] = "late addition";
    auto [after_dims, after_overall] = evaluator::aggregate_benchmark(reports);

    for (int d = 0; d < 6; ++d) CHECK(after_dims[d].value <= before_dims[d].value);
    CHECK(after_overall <= before_overall);
  }
}

TEST_CASE("element evaluations overlap when fanned out") {
  auto root = fresh_dir("fanout");
  auto ws = generated_workspace(root);
  auto planned = evaluator::planned_elements(ws.plan);
  auto session = renderer::make_stub_session();
  auto judge = providers::make_mock_provider("judge", 0.05);

  RunConfig parallel_cfg;
  parallel_cfg.parallel_fanout = true;
  auto t0 = std::chrono::steady_clock::now();
  auto [m1, r1] =
      evaluator::evaluate_sample(judge, std::move(ws.manifest), planned, *session, parallel_cfg);
  double parallel_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunConfig sequential_cfg;
  sequential_cfg.parallel_fanout = false;
  auto t1 = std::chrono::steady_clock::now();
  auto [m2, r2] =
      evaluator::evaluate_sample(judge, std::move(m1), planned, *session, sequential_cfg);
  double sequential_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  // 8 judge calls at 50 ms each: the serial pass pays them all, the parallel
  // pass only the extraction + completeness chain.
  CHECK(sequential_wall >= 0.35);
  CHECK(parallel_wall < sequential_wall);
  CHECK(parallel_wall < 0.3);
  fs::remove_all(root);
}
