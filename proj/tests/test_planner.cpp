#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "webforge/planner.hpp"

using namespace webforge;
using namespace webforge::planner;
namespace fs = std::filesystem;

static const char* kPlanJson = R"({
  "code_generation": [
    {
      "prompt": "Warm minimal landing page for Driftwood Coffee. Hero image of a pour-over setup (path: assets/hero_pourover.png, width: 1200px, height: 600px). A looping steam video (path: assets/steam_loop.mp4, width: 960px, height: 540px). A bar chart of monthly roast volume (path: assets/roast_volume.html, width: 800px, height: 300px). Cream background, walnut accents, generous spacing."
    }
  ],
  "image_generation": [
    {
      "save_path": "assets/hero_pourover.png",
      "context": {
        "section": "hero",
        "role": "hero",
        "page_style": "warm minimal"
      },
      "compiled_attributes": {
        "visual_style": "photorealistic",
        "color_tone": "muted",
        "composition": "centered object",
        "lighting": "soft natural"
      },
      "prompt": "A ceramic pour-over dripper on a walnut counter at sunrise, steam rising.",
      "size": "1536x1024"
    }
  ],
  "video_generation": [
    {
      "save_path": "assets/steam_loop.mp4",
      "context": {
        "section": "story",
        "role": "background loop",
        "page_style": "warm minimal"
      },
      "compiled_attributes": {
        "visual_style": "cinematic",
        "motion_intensity": "low",
        "camera_behavior": "static",
        "loopability": "should loop seamlessly"
      },
      "prompt": "Slow steam curling from a fresh cup of coffee against a dark walnut wall.",
      "seconds": 8,
      "size": "1280x720"
    }
  ],
  "data_visualization": [
    {
      "save_path": "assets/roast_volume.html",
      "context": {
        "section": "numbers",
        "role": "analytical",
        "page_style": "warm minimal"
      },
      "compiled_attributes": {
        "chart_type": "bar chart",
        "chart_style": "clean",
        "color_palette": "cream and walnut",
        "visual_emphasis": "monthly growth"
      },
      "prompt": "Bar chart of monthly roast volume with cream background and walnut bars.",
      "source_data": "| Month | Bags |\n|---|---|\n| Jan | 120 |\n| Feb | 135 |\n| Mar | 160 |"
    }
  ]
})";

static GenerationPlan make_plan() { return parse_plan(kPlanJson); }

TEST_CASE("planner request pairs the fixed system text with the raw prompt") {
  auto [sys, user] = build_planner_request("a café landing page");
  CHECK(sys == std::string(prompts::kPlannerSystem));
  CHECK(user == "a café landing page");
  CHECK_THROWS_AS(build_planner_request(""), std::invalid_argument);
}

TEST_CASE("parse accepts the instruction text's own output example") {
  std::string sys = prompts::kPlannerSystem;
  auto fence = sys.find("```json");
  REQUIRE(fence != std::string::npos);
  auto plan = parse_plan(sys.substr(fence));
  CHECK(plan.image_generation.size() == 1);
  CHECK(plan.video_generation.size() == 1);
  CHECK(plan.data_visualization.size() == 1);
  CHECK(plan.video_generation[0].seconds == 8);
  CHECK(plan.image_generation[0].size == "1024x768");
  CHECK_FALSE(plan.code_generation.prompt.empty());
}

TEST_CASE("parse handles fences, string seconds, and context key variants") {
  auto plan = make_plan();
  CHECK(plan.image_generation.size() == 1);
  CHECK(plan.video_generation[0].seconds == 8);
  CHECK(plan.data_visualization[0].compiled_attributes.chart_type == "bar chart");

  SECTION("fenced output unwraps") {
    auto fenced = "```json\n" + std::string(kPlanJson) + "\n```";
    CHECK(parse_plan(fenced).image_generation.size() == 1);
  }
  SECTION("seconds given as a string") {
    auto txt = replace_all(kPlanJson, "\"seconds\": 8", "\"seconds\": \"8\"");
    CHECK(parse_plan(txt).video_generation[0].seconds == 8);
  }
  SECTION("global_style normalizes to page_style") {
    auto txt = replace_all(kPlanJson, "\"page_style\": \"warm minimal\"",
                           "\"global_style\": \"warm minimal\"");
    CHECK(parse_plan(txt).image_generation[0].context.page_style == "warm minimal");
  }
}

TEST_CASE("parse rejects structural violations") {
  CHECK_THROWS_AS(parse_plan("not json at all {"), ParseError);
  CHECK_THROWS_AS(parse_plan(R"({"code_generation": []})"), SchemaError);
  CHECK_THROWS_AS(
      parse_plan(
          R"({"code_generation": [{"prompt": "x"}], "image_generation": [], "video_generation": []})"),
      SchemaError);
  CHECK_THROWS_AS(
      parse_plan(replace_all(kPlanJson, "\"data_visualization\"", "\"charts\"")), SchemaError);
  CHECK_THROWS_AS(
      parse_plan(replace_all(kPlanJson, "assets/steam_loop.mp4", "assets/hero_pourover.png")),
      SchemaError);

  SECTION("error payloads carry locations") {
    try {
      parse_plan(R"({"code_generation": [{"prompt": "x"}])");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset > 0);
    }
    try {
      parse_plan(replace_all(kPlanJson, "\"seconds\": 8,", ""));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field == "seconds");
    }
  }
}

TEST_CASE("validation reports rule violations as data") {
  auto plan = make_plan();
  CHECK(validate_plan(plan).empty());

  SECTION("video seconds outside the allowed set") {
    plan.video_generation[0].seconds = 6;
    auto v = validate_plan(plan);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "video_seconds_not_allowed");
    CHECK(v[0].message.find("{4, 8, 12}") != std::string::npos);
  }
  SECTION("empty chart dataset") {
    plan.data_visualization[0].source_data = "  ";
    auto v = validate_plan(plan);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "empty_source_data");
  }
  SECTION("image size set is configurable") {
    plan.image_generation[0].size = "1024x768";
    REQUIRE(validate_plan(plan).size() == 1);
    CHECK(validate_plan(plan)[0].code == "image_size_not_allowed");
    auto widened = default_image_sizes();
    widened.push_back("1024x768");
    CHECK(validate_plan(plan, widened).empty());
  }
  SECTION("single-field mutations yield attributable violations") {
    plan.video_generation[0].size = "640x480";
    auto v = validate_plan(plan);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "video_size_not_allowed");
    CHECK(v[0].path == "assets/steam_loop.mp4");
  }
}

TEST_CASE("placeholder extraction") {
  SECTION("single fully specified reference") {
    auto phs = extract_placeholders(
        "Hero image (path: assets/hero_cafe.png, width: 1200px, height: 600px) above the fold.");
    REQUIRE(phs.size() == 1);
    CHECK(phs[0].path == "assets/hero_cafe.png");
    CHECK(phs[0].width_px == 1200);
    CHECK(phs[0].height_px == 600);
  }
  SECTION("no references") { CHECK(extract_placeholders("plain text").empty()); }
  SECTION("repeated path yields two placeholders") {
    auto phs = extract_placeholders(
        "(path: assets/a.png, width: 10px) and again (path: assets/a.png, width: 10px)");
    REQUIRE(phs.size() == 2);
    CHECK(phs[0].path == phs[1].path);
  }
  SECTION("dimension order and omissions are tolerated") {
    auto phs = extract_placeholders(
        "(path: assets/c.html, height: 300px, width: 800px) then (path: assets/d.png)");
    REQUIRE(phs.size() == 2);
    CHECK(phs[0].width_px == 800);
    CHECK(phs[0].height_px == 300);
    CHECK_FALSE(phs[1].width_px.has_value());
  }
  SECTION("unrecognized paths are skipped") {
    CHECK(extract_placeholders("(path: media/x.png, width: 10px)").empty());
    CHECK(extract_placeholders("(path: assets/x.gif)").empty());
  }
  SECTION("spans are ordered and non-overlapping") {
    auto plan = make_plan();
    auto phs = extract_placeholders(plan.code_generation.prompt);
    REQUIRE(phs.size() == 3);
    for (size_t i = 1; i < phs.size(); ++i) CHECK(phs[i - 1].end <= phs[i].begin);
    for (const auto& ph : phs)
      CHECK(plan.code_generation.prompt.substr(ph.begin, 6) == "(path:");
  }
}

TEST_CASE("element prompt compilation expands context then attributes then prompt") {
  auto plan = make_plan();

  auto img = compile_element_prompt(plan.image_generation[0]);
  CHECK(img.rfind("The image will be incorporated into a warm minimal webpage, serving as a "
                  "hero image in the hero section.",
                  0) == 0);
  CHECK(img.find("The image should have a photorealistic visual style, muted color tone, "
                 "centered object composition, and soft natural lighting.") != std::string::npos);
  CHECK(img.find("A ceramic pour-over dripper") != std::string::npos);

  auto vid = compile_element_prompt(plan.video_generation[0]);
  CHECK(vid.rfind("The video will be embedded in a warm minimal webpage, functioning as a "
                  "background loop video in the story section.",
                  0) == 0);
  CHECK(vid.find("and should loop seamlessly.") != std::string::npos);

  auto chart = compile_element_prompt(plan.data_visualization[0]);
  CHECK(chart.rfind("The chart will appear in a warm minimal webpage, acting as an analytical "
                    "chart in the numbers section.",
                    0) != 0);
  CHECK(chart.rfind("The chart will appear in a warm minimal webpage, acting as a analytical "
                    "chart in the numbers section.",
                    0) == 0);
  CHECK(chart.find("should be a bar chart chart") != std::string::npos);
  CHECK(chart.find("section. .") == std::string::npos);

  SECTION("each field value appears exactly once per slot") {
    auto count = [&](const std::string& hay, const std::string& needle) {
      size_t n = 0, pos = 0;
      while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
      }
      return n;
    };
    CHECK(count(img, "photorealistic") == 1);
    CHECK(count(img, "soft natural") == 1);
    CHECK(count(vid, "static") == 1);
    CHECK(count(chart, "cream and walnut") == 1);
  }
}

TEST_CASE("cross check pairs placeholders with element plans") {
  auto plan = make_plan();
  CHECK(cross_check(plan).empty());

  SECTION("layout reference nothing plans") {
    plan.code_generation.prompt += " Plus a badge (path: assets/badge.png, width: 64px).";
    auto v = cross_check(plan);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "unplanned_placeholder");
    CHECK(v[0].path == "assets/badge.png");
  }
  SECTION("planned element the layout never references") {
    auto extra = plan.image_generation[0];
    extra.save_path = "assets/orphan.png";
    plan.image_generation.push_back(extra);
    auto v = cross_check(plan);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "orphan_element_plan");
    CHECK(v[0].path == "assets/orphan.png");
  }
}

TEST_CASE("planned asset refs pick up placeholder dimensions") {
  auto refs = planned_asset_refs(make_plan());
  REQUIRE(refs.size() == 3);
  CHECK(refs[0].path == "assets/hero_pourover.png");
  CHECK(refs[0].kind == AssetKind::image);
  CHECK(refs[0].declared_width_px == 1200);
  CHECK(refs[0].declared_height_px == 600);
  CHECK(refs[2].path == "assets/roast_volume.html");
  CHECK(refs[2].declared_height_px == 300);
  for (const auto& r : refs) CHECK(r.status == AssetStatus::planned);
}

TEST_CASE("serialize and parse round trip") {
  auto plan = make_plan();
  auto text = serialize_plan(plan).dump(2);
  auto again = parse_plan(text);
  CHECK(serialize_plan(again).dump(2) == text);

  auto j = serialize_plan(plan);
  auto keys = std::vector<std::string>{};
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"code_generation", "image_generation",
                                         "video_generation", "data_visualization"});

  SECTION("plan file round trip") {
    auto dir = fs::temp_directory_path() / "wf-planner";
    fs::remove_all(dir);
    fs::create_directories(dir);
    save_plan(plan, dir);
    CHECK(serialize_plan(load_plan(dir)).dump(2) == text);
    fs::remove_all(dir);
  }
}
