#include <catch2/catch_amalgamated.hpp>

#include "webforge/util.hpp"

using namespace webforge;

TEST_CASE("fnv1a64 matches reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("hex rendering") {
  CHECK(to_hex(0, 4) == "0000");
  CHECK(to_hex(0xdeadbeefull, 8) == "deadbeef");
  CHECK(short_hash("foobar") == "f73967e8");
}

TEST_CASE("base64 round trip and reference vectors") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foo") == "Zm9v");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYmFy") == "foobar");
  CHECK(base64_decode("Zg==") == "f");
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes += char(i);
  CHECK(base64_decode(base64_encode(bytes)) == bytes);
  CHECK_THROWS_AS(base64_decode("Zm9v!"), ParseError);
}

TEST_CASE("sha1 reference vectors") {
  CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(sha1_hex("The quick brown fox jumps over the lazy dog") ==
        "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
  // WebSocket handshake digest from RFC 6455 section 1.3.
  std::string accept = base64_encode(std::string(
      reinterpret_cast<const char*>(
          sha1("dGhlIHNhbXBsZSBub25jZQ==258EAFA5-E914-47DA-95CA-C5AB0DC85B11").data()),
      20));
  CHECK(accept == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
}

TEST_CASE("rational parsing and arithmetic stay exact") {
  auto r = Rational::from_string("0.1");
  CHECK(r.num == 1);
  CHECK(r.den == 10);
  Rational sum;
  for (int i = 0; i < 10; ++i) sum = sum + r;
  CHECK(sum == Rational(1));
  CHECK(sum.to_string() == "1");

  auto a = Rational::from_string("0.3");
  auto b = Rational::from_string("0.2");
  CHECK((a + b).to_string() == "0.5");
  CHECK((a - b).to_string() == "0.1");
  CHECK((a * b) == Rational(3, 50));
  CHECK((a * b).to_string() == "0.06");

  CHECK(Rational::from_string("-0.2").to_string() == "-0.2");
  CHECK(Rational::from_string("1.5").to_string() == "1.5");
  CHECK(Rational::from_string("2").to_string() == "2");
  CHECK(Rational(1, 3).to_string() == "1/3");
  CHECK(Rational(-1, -2) == Rational(1, 2));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 2) < Rational(2, 3));
  CHECK(Rational(1, 2) >= Rational(1, 2));
  CHECK_THROWS_AS(Rational::from_string("abc"), ParseError);
  CHECK_THROWS_AS(Rational::from_string("1.2.3"), ParseError);
  CHECK_THROWS_AS(Rational::from_string(""), ParseError);
}

TEST_CASE("string helpers") {
  CHECK(trim("  hi \n") == "hi");
  CHECK(trim("") == "");
  CHECK(lower("MiXeD") == "mixed");
  CHECK(replace_all("a-b-c", "-", "+") == "a+b+c");
  CHECK(join({"x", "y", "z"}, ", ") == "x, y, z");
  CHECK(contains_ci("Hello World", "WORLD"));
  CHECK_FALSE(contains_ci("Hello", "xyz"));

  auto lines = split_lines("a\nb\r\nc");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "a");
  CHECK(lines[1] == "b");
  CHECK(lines[2] == "c");
  CHECK(split_lines("a\n").size() == 1);
  CHECK(split_lines("").size() == 1);
}

TEST_CASE("template rendering") {
  std::map<std::string, std::string> slots{{"name", "chart"}, {"style", "minimal"}};
  CHECK(render_template("a {name} in {style} form", slots) == "a chart in minimal form");

  SECTION("unknown single-brace tokens pass through") {
    CHECK(render_template(R"({"image": [], "video": []})", slots) ==
          R"({"image": [], "video": []})");
  }
  SECTION("doubled braces collapse to literals") {
    CHECK(render_template("use {{name}} not {name}", slots) == "use {name} not chart");
    CHECK(render_template("option = {{series: []}}", {}) == "option = {series: []}");
  }
  SECTION("substituted values are not rescanned") {
    CHECK(render_template("{a}", {{"a", "{b}"}, {"b", "nope"}}) == "{b}");
  }
  SECTION("unclosed brace is literal") {
    CHECK(render_template("{name", slots) == "{name");
  }
}

TEST_CASE("decimal formatting") {
  CHECK(format_double(0.2, 1) == "0.2");
  CHECK(format_double(1.0, 2) == "1.00");
  CHECK(format_compact(56.1) == "56.1");
  CHECK(format_compact(250.0) == "250");
}

TEST_CASE("file helpers") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / ("wf-util-" + short_hash("file helpers"));
  fs::remove_all(dir);
  write_file(dir / "a" / "b.txt", "payload");
  CHECK(read_file(dir / "a" / "b.txt") == "payload");
  write_file(dir / "a" / "a.txt", "x");
  auto names = list_dir_sorted(dir / "a");
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "a.txt");
  CHECK(names[1] == "b.txt");
  CHECK(list_dir_sorted(dir / "missing").empty());
  CHECK_THROWS(read_file(dir / "missing.txt"));
  fs::remove_all(dir);
}
