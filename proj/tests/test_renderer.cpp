#include <catch2/catch_amalgamated.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "webforge/generators.hpp"
#include "webforge/providers.hpp"
#include "webforge/renderer.hpp"

using namespace webforge;
namespace fs = std::filesystem;
using json = nlohmann::json;

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
           ("webforge-rnd-" + hint + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
  fs::remove_all(p);
  return p;
}

static fs::path generated_site(const std::string& hint) {
  auto root = fresh_dir(hint);
  auto provider = providers::make_mock_provider("planner");
  auto res = providers::call_provider(provider, {"plan", {}, kPrompt, {}, {}});
  auto plan = planner::parse_plan(res.text);
  auto set = providers::make_mock_providers();
  RunConfig config;
  auto manifest = new_workspace(root, kPrompt, config);
  generators::execute_plan(plan, set, config, std::move(manifest));
  return root;
}

TEST_CASE("stub render honours the viewport and is deterministic") {
  auto root = generated_site("stub");
  auto result = renderer::stub_render(root, {1280, 800});
  auto [w, h] = media::png_dimensions(result.screenshot);
  CHECK(w == 1280);
  CHECK(h >= 800);
  CHECK(result.page_url.find("index.html") != std::string::npos);
  CHECK(result.console_errors.empty());

  auto again = renderer::stub_render(root, {1280, 800});
  CHECK(result.screenshot == again.screenshot);

  auto narrow = renderer::stub_render(root, {640, 400});
  auto [nw, nh] = media::png_dimensions(narrow.screenshot);
  CHECK(nw == 640);

  write_file(root / "index.html", read_file(root / "index.html") + "<!-- nudge -->");
  auto changed = renderer::stub_render(root, {1280, 800});
  CHECK(changed.screenshot != result.screenshot);
  fs::remove_all(root);
}

TEST_CASE("stub crops carry layout boxes and computed-style diagnostics") {
  auto root = generated_site("crop");
  renderer::StubSession session;
  session.navigate(root, {1280, 800});

  auto crop = session.crop_element("assets/hero_pourover.png");
  CHECK(crop.asset_path == "assets/hero_pourover.png");
  auto [cw, ch] = media::png_dimensions(crop.crop);
  CHECK(cw == crop.bbox.w);
  CHECK(ch == crop.bbox.h);
  CHECK(crop.bbox.y >= 64);
  CHECK(crop.diagnostics.at("opacity") == "1");
  CHECK(crop.diagnostics.at("visibility") == "visible");
  CHECK(crop.diagnostics.at("object-fit") == "fill");
  CHECK(crop.diagnostics.at("rendered") ==
        std::to_string(crop.bbox.w) + "x" + std::to_string(crop.bbox.h));
  CHECK_FALSE(media::is_uniform_png(crop.crop));

  CHECK_THROWS_AS(session.crop_element("assets/never_planned.png"),
                  renderer::NotEmbedded);
  fs::remove_all(root);
}

TEST_CASE("crops of distinct assets do not overlap") {
  auto root = generated_site("tile");
  renderer::StubSession session;
  session.navigate(root, {1280, 800});
  auto a = session.crop_element("assets/hero_pourover.png");
  auto b = session.crop_element("assets/steam_loop.mp4");
  auto c = session.crop_element("assets/roast_volume.html");
  auto overlaps = [](const renderer::BBox& p, const renderer::BBox& q) {
    return p.x < q.x + q.w && q.x < p.x + p.w && p.y < q.y + q.h && q.y < p.y + p.h;
  };
  CHECK_FALSE(overlaps(a.bbox, b.bbox));
  CHECK_FALSE(overlaps(b.bbox, c.bbox));
  CHECK_FALSE(overlaps(a.bbox, c.bbox));
  fs::remove_all(root);
}

TEST_CASE("a chart inside a transparent container reports opacity zero") {
  auto root = fresh_dir("hidden");
  fs::create_directories(root / "assets");
  write_file(root / "assets/chart.html", "<html><body></body></html>");
  write_file(root / "index.html",
             "<html><body>\n"
             "<img src=\"assets/logo.png\">\n"
             "<div style=\"opacity: 0;\">\n"
             "  <iframe src=\"assets/chart.html\" style=\"height: 240px; width: 100%; "
             "border: none;\"></iframe>\n"
             "</div>\n"
             "</body></html>");
  write_file(root / "assets/logo.png", media::make_solid_png(64, 64, {10, 20, 30}, "lg"));

  renderer::StubSession session;
  session.navigate(root, {1280, 800});
  auto crop = session.crop_element("assets/chart.html");
  CHECK(crop.diagnostics.at("opacity") == "0");
  CHECK(media::is_uniform_png(crop.crop));

  auto logo = session.crop_element("assets/logo.png");
  CHECK(logo.diagnostics.at("opacity") == "1");
  fs::remove_all(root);
}

TEST_CASE("hidden ancestors propagate into visibility and display diagnostics") {
  auto root = fresh_dir("vis");
  fs::create_directories(root / "assets");
  write_file(root / "assets/a.png", media::make_solid_png(32, 32, {1, 2, 3}));
  write_file(root / "assets/b.png", media::make_solid_png(32, 32, {3, 2, 1}));
  write_file(root / "index.html",
             "<html><body>"
             "<section style=\"visibility: hidden\"><img src=\"assets/a.png\"></section>"
             "<div style=\"display: none\"><img src=\"assets/b.png\"></div>"
             "</body></html>");
  renderer::StubSession session;
  session.navigate(root, {800, 600});
  CHECK(session.crop_element("assets/a.png").diagnostics.at("visibility") == "hidden");
  CHECK(session.crop_element("assets/b.png").diagnostics.at("display") == "none");
  fs::remove_all(root);
}

TEST_CASE("script errors in the document surface as console errors") {
  auto root = fresh_dir("console");
  write_file(root / "index.html",
             "<html><body><script>throw new Error(\"kaboom\")</script></body></html>");
  auto result = renderer::stub_render(root, {800, 600});
  REQUIRE_FALSE(result.console_errors.empty());
  CHECK(result.console_errors.front() == "Uncaught Error: kaboom");
  fs::remove_all(root);
}

TEST_CASE("render_page requires index.html") {
  auto root = fresh_dir("nopage");
  fs::create_directories(root);
  CHECK_THROWS_AS(renderer::render_page(root, {1280, 800}), std::invalid_argument);
  fs::remove_all(root);
}

TEST_CASE("sample_frames spaces timestamps uniformly from zero") {
  auto dir = fresh_dir("frames");
  auto path = dir / "clip.mp4";
  media::write_solid_mp4(path, 320, 240, 8, {90, 60, 30});

  auto sample = renderer::sample_frames(path, 4);
  REQUIRE(sample.timestamps_s.size() == 4);
  CHECK(sample.timestamps_s == std::vector<double>{0.0, 2.0, 4.0, 6.0});
  REQUIRE(sample.frames.size() == 4);
  auto [w, h] = media::png_dimensions(sample.frames.front());
  CHECK(w == 320);
  CHECK(h == 240);

  auto single = renderer::sample_frames(path, 1);
  CHECK(single.timestamps_s == std::vector<double>{0.0});

  auto clamped = renderer::sample_frames(path, 1000);
  CHECK(clamped.frames.size() == 32);
  for (size_t i = 1; i < clamped.timestamps_s.size(); ++i)
    CHECK(clamped.timestamps_s[i] > clamped.timestamps_s[i - 1]);
  CHECK(clamped.timestamps_s.back() < 8.0);

  CHECK_THROWS_AS(renderer::sample_frames(dir / "absent.mp4", 4), RendererError);
  CHECK_THROWS_AS(renderer::sample_frames(path, 0), std::invalid_argument);
  fs::remove_all(dir);
}

// A miniature devtools endpoint speaking just enough of the protocol to
// exercise the websocket client: handshake, masked client frames, a
// fragmented server reply, events interleaved with responses.
class FakeCdpServer {
 public:
  FakeCdpServer() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(listen_fd_ >= 0);
    int yes = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    REQUIRE(::listen(listen_fd_, 1) == 0);
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { serve(); });
  }

  ~FakeCdpServer() {
    if (thread_.joinable()) thread_.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
  }

  int port() const { return port_; }
  bool saw_device_metrics() const { return saw_metrics_; }

 private:
  int listen_fd_ = -1;
  int port_ = 0;
  std::thread thread_;
  std::atomic<bool> saw_metrics_{false};
  std::string buf_;

  void serve() {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    handshake(fd);
    try {
      for (;;) {
        auto msg = read_frame(fd);
        if (!msg) break;
        handle(fd, json::parse(*msg));
      }
    } catch (...) {
    }
    ::close(fd);
  }

  void handshake(int fd) {
    while (buf_.find("\r\n\r\n") == std::string::npos) {
      char chunk[4096];
      ssize_t r = ::recv(fd, chunk, sizeof(chunk), 0);
      if (r <= 0) return;
      buf_.append(chunk, size_t(r));
    }
    auto head_end = buf_.find("\r\n\r\n");
    std::string head = buf_.substr(0, head_end);
    buf_.erase(0, head_end + 4);
    std::string key;
    for (const auto& line : split_lines(head)) {
      auto low = lower(line);
      if (low.rfind("sec-websocket-key:", 0) == 0) key = trim(line.substr(18));
    }
    std::string response =
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        "Sec-WebSocket-Accept: " +
        ws::accept_key_for(key) + "\r\n\r\n";
    ::send(fd, response.data(), response.size(), MSG_NOSIGNAL);
  }

  std::optional<std::string> read_frame(int fd) {
    auto need = [&](size_t n) {
      while (buf_.size() < n) {
        char chunk[8192];
        ssize_t r = ::recv(fd, chunk, sizeof(chunk), 0);
        if (r <= 0) return false;
        buf_.append(chunk, size_t(r));
      }
      return true;
    };
    std::string message;
    for (;;) {
      if (!need(2)) return std::nullopt;
      uint8_t b0 = uint8_t(buf_[0]), b1 = uint8_t(buf_[1]);
      bool fin = b0 & 0x80;
      uint8_t opcode = b0 & 0x0f;
      uint64_t len = b1 & 0x7f;
      size_t header = 2;
      if (len == 126) {
        if (!need(4)) return std::nullopt;
        len = (uint64_t(uint8_t(buf_[2])) << 8) | uint8_t(buf_[3]);
        header = 4;
      } else if (len == 127) {
        if (!need(10)) return std::nullopt;
        len = 0;
        for (int i = 0; i < 8; ++i) len = (len << 8) | uint8_t(buf_[2 + i]);
        header = 10;
      }
      size_t mask_at = header;
      header += 4;  // client frames are always masked
      if (!need(header + len)) return std::nullopt;
      std::string payload = buf_.substr(header, len);
      for (size_t i = 0; i < payload.size(); ++i)
        payload[i] = char(payload[i] ^ buf_[mask_at + (i % 4)]);
      buf_.erase(0, header + len);
      if (opcode == 0x8) return std::nullopt;
      if (opcode == 0x9) {
        send_raw(fd, 0xA, payload, true);
        continue;
      }
      message += payload;
      if (fin) return message;
    }
  }

  void send_raw(int fd, uint8_t opcode, const std::string& payload, bool fin) {
    std::string f;
    f.push_back(char((fin ? 0x80 : 0x00) | opcode));
    if (payload.size() < 126) {
      f.push_back(char(payload.size()));
    } else if (payload.size() <= 0xffff) {
      f.push_back(char(126));
      f.push_back(char((payload.size() >> 8) & 0xff));
      f.push_back(char(payload.size() & 0xff));
    } else {
      f.push_back(char(127));
      for (int i = 7; i >= 0; --i)
        f.push_back(char((uint64_t(payload.size()) >> (8 * i)) & 0xff));
    }
    f += payload;
    ::send(fd, f.data(), f.size(), MSG_NOSIGNAL);
  }

  void send_text(int fd, const json& msg) { send_raw(fd, 0x1, msg.dump(), true); }

  void send_fragmented(int fd, const json& msg) {
    std::string payload = msg.dump();
    size_t half = payload.size() / 2;
    send_raw(fd, 0x1, payload.substr(0, half), false);
    send_raw(fd, 0x0, payload.substr(half), true);
  }

  void handle(int fd, const json& req) {
    int id = req["id"].get<int>();
    std::string method = req["method"].get<std::string>();
    if (method == "Emulation.setDeviceMetricsOverride") saw_metrics_ = true;
    if (method == "Page.navigate") {
      send_text(fd, {{"id", id}, {"result", {{"frameId", "F1"}}}});
      send_text(fd, {{"method", "Runtime.consoleAPICalled"},
                     {"params",
                      {{"type", "error"},
                       {"args", json::array({{{"type", "string"}, {"value", "boom"}}})}}}});
      send_text(fd, {{"method", "Page.loadEventFired"}, {"params", json::object()}});
      return;
    }
    if (method == "Page.getLayoutMetrics") {
      send_text(fd, {{"id", id},
                     {"result",
                      {{"contentSize", {{"x", 0}, {"y", 0}, {"width", 640}, {"height", 900}}}}}});
      return;
    }
    if (method == "Page.captureScreenshot") {
      auto png = media::make_solid_png(640, 900, {120, 140, 160}, "page");
      send_fragmented(fd, {{"id", id}, {"result", {{"data", base64_encode(png)}}}});
      return;
    }
    if (method == "Runtime.evaluate") {
      std::string expr = req["params"]["expression"].get<std::string>();
      if (expr.find("assets/ghost.png") != std::string::npos) {
        send_text(fd, {{"id", id},
                       {"result", {{"result", {{"type", "object"}, {"subtype", "null"}}}}}});
        return;
      }
      json info{{"x", 32.0},   {"y", 100.0},       {"w", 300.0},
                {"h", 200.0},  {"opacity", "0"},   {"visibility", "visible"},
                {"display", "block"}, {"fit", "cover"}, {"pos", "50% 50%"},
                {"rw", 300},   {"rh", 200}};
      send_text(fd, {{"id", id},
                     {"result", {{"result", {{"type", "string"}, {"value", info.dump()}}}}}});
      return;
    }
    send_text(fd, {{"id", id}, {"result", json::object()}});
  }
};

TEST_CASE("devtools session drives the wire protocol end to end") {
  auto root = fresh_dir("cdp");
  write_file(root / "index.html", "<html><body>ok</body></html>");

  FakeCdpServer server;
  renderer::CdpSession session(
      "ws://127.0.0.1:" + std::to_string(server.port()) + "/devtools/page/TEST", 5, 10);
  session.navigate(root, {640, 400});

  auto result = session.render();
  auto [w, h] = media::png_dimensions(result.screenshot);
  CHECK(w == 640);
  CHECK(h == 900);
  CHECK(result.viewport.width_px == 640);
  REQUIRE_FALSE(result.console_errors.empty());
  CHECK(result.console_errors.front() == "boom");

  auto crop = session.crop_element("assets/roast_volume.html");
  CHECK(crop.bbox.x == 32);
  CHECK(crop.bbox.y == 100);
  CHECK(crop.bbox.w == 300);
  CHECK(crop.bbox.h == 200);
  auto [cw, ch] = media::png_dimensions(crop.crop);
  CHECK(cw == 300);
  CHECK(ch == 200);
  CHECK(crop.diagnostics.at("opacity") == "0");
  CHECK(crop.diagnostics.at("object-fit") == "cover");

  CHECK_THROWS_AS(session.crop_element("assets/ghost.png"), renderer::NotEmbedded);
  CHECK(server.saw_device_metrics());
  fs::remove_all(root);
}

TEST_CASE("unreachable browser endpoints raise renderer errors") {
  CHECK_THROWS_AS(renderer::make_cdp_session("http://127.0.0.1:1/"), RendererError);
  CHECK_THROWS_AS(
      renderer::CdpSession("ws://127.0.0.1:1/devtools", 1, 0), RendererError);
}
