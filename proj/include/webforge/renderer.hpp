#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "webforge/assembler.hpp"
#include "webforge/core.hpp"
#include "webforge/media.hpp"
#include "webforge/util.hpp"
#include "webforge/ws_client.hpp"

namespace webforge::renderer {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Raised when an asset has no visible element on the page; completeness
// scoring consumes it instead of failing the evaluation.
struct NotEmbedded : RendererError {
  using RendererError::RendererError;
};

struct RenderResult {
  std::string screenshot;
  Viewport viewport;
  std::string page_url;
  std::vector<std::string> console_errors;
};

struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct ElementCrop {
  std::string asset_path;
  BBox bbox;
  std::string crop;
  std::map<std::string, std::string> diagnostics;
};

struct FrameSample {
  std::string asset_path;
  std::vector<std::string> frames;
  std::vector<double> timestamps_s;
};

// Narrow browser seam: navigate, full-page render, per-element crop.
// Sessions are single-threaded; run one per workspace.
class BrowserSession {
 public:
  virtual ~BrowserSession() = default;
  virtual void navigate(const fs::path& site_root, Viewport viewport) = 0;
  virtual RenderResult render() = 0;
  virtual ElementCrop crop_element(const std::string& asset_path) = 0;
};

namespace detail {

inline std::map<std::string, std::string> parse_inline_style(const std::string& s) {
  std::map<std::string, std::string> out;
  for (const auto& decl : split(s, ';')) {
    auto colon = decl.find(':');
    if (colon == std::string::npos) continue;
    std::string key = lower(trim(decl.substr(0, colon)));
    std::string value = trim(decl.substr(colon + 1));
    if (!key.empty() && !value.empty()) out[key] = value;
  }
  return out;
}

inline std::optional<int> style_px(const std::map<std::string, std::string>& style,
                                   const std::string& key) {
  auto it = style.find(key);
  if (it == style.end()) return std::nullopt;
  const std::string& v = it->second;
  size_t i = 0;
  while (i < v.size() && (isdigit(v[i]) || v[i] == '.')) ++i;
  if (i == 0) return std::nullopt;
  if (v.substr(i) != "px" && !v.substr(i).empty()) return std::nullopt;
  return int(std::stod(v.substr(0, i)));
}

inline std::string style_or(const std::map<std::string, std::string>& style,
                            const std::string& key, const std::string& fallback) {
  auto it = style.find(key);
  return it == style.end() ? fallback : it->second;
}

inline std::string background_ref(const std::map<std::string, std::string>& style) {
  for (const char* key : {"background-image", "background"}) {
    auto it = style.find(key);
    if (it == style.end()) continue;
    auto at = it->second.find("url(");
    if (at == std::string::npos) continue;
    auto close = it->second.find(')', at);
    if (close == std::string::npos) continue;
    std::string v = trim(it->second.substr(at + 4, close - at - 4));
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) v = v.substr(1, v.size() - 2);
    if (v.rfind("./", 0) == 0) v = v.substr(2);
    if (v.rfind("assets/", 0) == 0) return v;
  }
  return {};
}

struct StubElement {
  std::string path;
  std::string tag;
  BBox box;
  double opacity = 1;
  std::string visibility = "visible";
  std::string display = "block";
  std::string object_fit = "fill";
  std::string object_position = "50% 50%";
  uint64_t paint_hash = 0;
  bool has_bytes = false;
};

inline bool is_container_tag(const std::string& name) {
  static const std::set<std::string> tags{"div",    "section", "main",  "article",
                                          "figure", "header",  "footer", "aside",
                                          "body",   "nav"};
  return tags.count(name) > 0;
}

inline bool is_media_tag(const std::string& name) {
  return name == "img" || name == "video" || name == "iframe" || name == "embed";
}

// Static layout model: referenced elements stack vertically under a header
// band; inline styles on the element and its open ancestors decide
// visibility. Everything derives from the document text and asset bytes.
inline std::vector<StubElement> scan_stub_elements(const std::string& doc,
                                                   const fs::path& site_root,
                                                   Viewport viewport) {
  struct Open {
    std::string name;
    std::map<std::string, std::string> style;
  };
  std::vector<Open> open;
  std::vector<StubElement> out;
  int content_x = 32;
  int content_w = std::max(64, viewport.width_px - 64);
  int y = 80;

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

    auto style = parse_inline_style(assembler::detail::attr_value(attrs, "style"));
    std::string src = assembler::detail::attr_value(attrs, "src");
    std::string ref;
    if (is_media_tag(name) && src.rfind("assets/", 0) == 0) ref = src;
    if (ref.empty()) ref = background_ref(style);

    if (!ref.empty()) {
      StubElement el;
      el.path = ref;
      el.tag = name;
      int h = style_px(style, "height").value_or(240);
      int w = std::min(style_px(style, "width").value_or(content_w), content_w);
      el.box = {content_x, y, w, h};
      y += h + 24;

      el.opacity = std::stod(style_or(style, "opacity", "1"));
      el.visibility = style_or(style, "visibility", "visible");
      el.display = style_or(style, "display", "block");
      el.object_fit = style_or(style, "object-fit", "fill");
      el.object_position = style_or(style, "object-position", "50% 50%");
      for (const auto& anc : open) {
        el.opacity *= std::stod(style_or(anc.style, "opacity", "1"));
        if (style_or(anc.style, "visibility", "visible") == "hidden")
          el.visibility = "hidden";
        if (style_or(anc.style, "display", "block") == "none") el.display = "none";
      }

      auto file = site_root / ref;
      if (fs::exists(file)) {
        el.paint_hash = fnv1a64(read_file(file));
        el.has_bytes = true;
      } else {
        el.paint_hash = fnv1a64(ref);
      }
      out.push_back(std::move(el));
    }

    bool self_closing = tag_text.size() >= 2 && tag_text[tag_text.size() - 2] == '/';
    if (is_container_tag(name) && !self_closing) open.push_back({name, style});
  }
  return out;
}

inline std::vector<std::string> scan_console_errors(const std::string& doc) {
  std::vector<std::string> out;
  auto collect = [&](const std::string& needle, const std::string& prefix) {
    size_t pos = 0;
    while ((pos = doc.find(needle, pos)) != std::string::npos) {
      pos += needle.size();
      std::string msg = "script error";
      if (pos < doc.size() && (doc[pos] == '"' || doc[pos] == '\'')) {
        char quote = doc[pos];
        size_t close = doc.find(quote, pos + 1);
        if (close != std::string::npos) msg = doc.substr(pos + 1, close - pos - 1);
      }
      out.push_back(prefix + msg);
    }
  };
  collect("throw new Error(", "Uncaught Error: ");
  collect("console.error(", "");
  return out;
}

inline std::string format_opacity(double v) {
  if (v <= 0) return "0";
  if (v >= 1) return "1";
  return format_compact(v);
}

}  // namespace detail

// Browserless render: a deterministic bitmap plus diagnostics from a static
// attribute scan, so full-pipeline tests need no external process.
class StubSession : public BrowserSession {
 public:
  void navigate(const fs::path& site_root, Viewport viewport) override {
    auto page = site_root / "index.html";
    if (!fs::exists(page))
      throw std::invalid_argument("index.html missing under " + site_root.string());
    doc_ = read_file(page);
    viewport_ = viewport;
    page_url_ = "file://" + fs::absolute(page).string();
    elements_ = detail::scan_stub_elements(doc_, site_root, viewport);
    console_ = detail::scan_console_errors(doc_);
    paint();
  }

  RenderResult render() override {
    require_page();
    return {screenshot_, viewport_, page_url_, console_};
  }

  ElementCrop crop_element(const std::string& asset_path) override {
    require_page();
    for (const auto& el : elements_) {
      if (el.path != asset_path) continue;
      ElementCrop crop;
      crop.asset_path = asset_path;
      crop.bbox = el.box;
      crop.crop = media::crop_png(screenshot_, el.box.x, el.box.y, el.box.w, el.box.h);
      crop.diagnostics = {
          {"opacity", detail::format_opacity(el.opacity)},
          {"visibility", el.visibility},
          {"display", el.display},
          {"object-fit", el.object_fit},
          {"object-position", el.object_position},
          {"rendered", std::to_string(el.box.w) + "x" + std::to_string(el.box.h)},
      };
      return crop;
    }
    throw NotEmbedded("asset not embedded: " + asset_path);
  }

 private:
  std::string doc_;
  Viewport viewport_;
  std::string page_url_;
  std::vector<detail::StubElement> elements_;
  std::vector<std::string> console_;
  std::string screenshot_;

  void require_page() const {
    if (doc_.empty()) throw RendererError("no page loaded");
  }

  void paint() {
    uint64_t doc_hash = fnv1a64(doc_);
    int content_end = elements_.empty() ? 80 : 0;
    for (const auto& el : elements_)
      content_end = std::max(content_end, el.box.y + el.box.h + 24);
    int page_h = std::max(viewport_.height_px, content_end + 48);

    media::Rgb bg{uint8_t(216 + (doc_hash & 0x1f)), uint8_t(216 + ((doc_hash >> 5) & 0x1f)),
                  uint8_t(216 + ((doc_hash >> 10) & 0x1f))};
    media::Canvas canvas(viewport_.width_px, page_h, bg);
    canvas.fill_rect(0, 0, viewport_.width_px, 64, media::color_from_hash(doc_hash >> 16));
    canvas.fill_rect(0, page_h - 48, viewport_.width_px, 48,
                     media::color_from_hash(doc_hash >> 32));

    for (const auto& el : elements_) {
      bool hidden =
          el.opacity <= 0 || el.visibility == "hidden" || el.display == "none";
      if (hidden) continue;
      media::Rgb band = el.has_bytes ? media::color_from_hash(el.paint_hash)
                                     : media::Rgb{221, 221, 221};
      canvas.fill_rect(el.box.x, el.box.y, el.box.w, el.box.h, band);
      if (el.has_bytes) {
        media::Rgb ink{uint8_t(255 - band.r), uint8_t(255 - band.g),
                       uint8_t(255 - band.b)};
        canvas.draw_text(short_hash(el.path), el.box.x + el.box.w / 8,
                         el.box.y + el.box.h / 2, 0.8, ink);
      }
    }
    screenshot_ = canvas.png();
  }
};

// DevTools-protocol session over a hand-rolled websocket.
class CdpSession : public BrowserSession {
 public:
  explicit CdpSession(const std::string& ws_url, double timeout_s = 20,
                      int settle_ms = 500)
      : timeout_s_(timeout_s), settle_ms_(settle_ms), client_(make_client(ws_url)) {}

  void navigate(const fs::path& site_root, Viewport viewport) override {
    auto page = site_root / "index.html";
    if (!fs::exists(page))
      throw std::invalid_argument("index.html missing under " + site_root.string());
    viewport_ = viewport;
    page_url_ = "file://" + fs::absolute(page).string();
    console_.clear();
    screenshot_.clear();

    call("Page.enable", {});
    call("Runtime.enable", {});
    call("Emulation.setDeviceMetricsOverride",
         {{"width", viewport.width_px},
          {"height", viewport.height_px},
          {"deviceScaleFactor", 1},
          {"mobile", false}});
    call("Page.navigate", {{"url", page_url_}});
    if (!wait_event("Page.loadEventFired", timeout_s_))
      throw RendererError("page load timeout; console so far: " +
                          join(console_, " | "));
    std::this_thread::sleep_for(std::chrono::milliseconds(settle_ms_));
    loaded_ = true;
  }

  RenderResult render() override {
    require_page();
    return {full_screenshot(), viewport_, page_url_, console_};
  }

  ElementCrop crop_element(const std::string& asset_path) override {
    require_page();
    auto result = call("Runtime.evaluate",
                       {{"expression", locate_script(asset_path)},
                        {"returnByValue", true}});
    auto value = result.value("result", json::object());
    if (!value.contains("value") || !value["value"].is_string())
      throw NotEmbedded("asset not embedded: " + asset_path);
    json info = json::parse(value["value"].get<std::string>());

    const std::string& shot = full_screenshot();
    auto [pw, ph] = media::png_dimensions(shot);
    BBox box;
    box.x = std::clamp(int(std::floor(info["x"].get<double>())), 0, pw - 1);
    box.y = std::clamp(int(std::floor(info["y"].get<double>())), 0, ph - 1);
    box.w = std::clamp(int(std::ceil(info["w"].get<double>())), 1, pw - box.x);
    box.h = std::clamp(int(std::ceil(info["h"].get<double>())), 1, ph - box.y);

    ElementCrop crop;
    crop.asset_path = asset_path;
    crop.bbox = box;
    crop.crop = media::crop_png(shot, box.x, box.y, box.w, box.h);
    crop.diagnostics = {
        {"opacity", info["opacity"].get<std::string>()},
        {"visibility", info["visibility"].get<std::string>()},
        {"display", info["display"].get<std::string>()},
        {"object-fit", info["fit"].get<std::string>()},
        {"object-position", info["pos"].get<std::string>()},
        {"rendered",
         std::to_string(info["rw"].get<int>()) + "x" + std::to_string(info["rh"].get<int>())},
    };
    return crop;
  }

 private:
  double timeout_s_;
  int settle_ms_;
  ws::Client client_;
  int next_id_ = 0;
  bool loaded_ = false;
  Viewport viewport_;
  std::string page_url_;
  std::vector<std::string> console_;
  std::deque<std::string> seen_events_;
  std::string screenshot_;

  static ws::Client make_client(const std::string& ws_url) {
    std::string rest = ws_url;
    if (rest.rfind("ws://", 0) == 0) rest = rest.substr(5);
    else throw ConfigError("devtools url must start with ws://: " + ws_url);
    std::string path = "/";
    auto slash = rest.find('/');
    if (slash != std::string::npos) {
      path = rest.substr(slash);
      rest = rest.substr(0, slash);
    }
    int port = 80;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      port = std::stoi(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    return ws::Client(rest, port, path);
  }

  void require_page() const {
    if (!loaded_) throw RendererError("no page loaded");
  }

  void handle_message(const json& msg) {
    if (!msg.contains("method")) return;
    std::string method = msg["method"].get<std::string>();
    seen_events_.push_back(method);
    if (method == "Runtime.consoleAPICalled" &&
        msg["params"].value("type", "") == "error") {
      std::string line;
      for (const auto& arg : msg["params"].value("args", json::array())) {
        if (!line.empty()) line += " ";
        if (arg.contains("value") && arg["value"].is_string())
          line += arg["value"].get<std::string>();
        else
          line += arg.value("description", "");
      }
      console_.push_back(line.empty() ? "console error" : line);
    }
    if (method == "Runtime.exceptionThrown") {
      auto details = msg["params"].value("exceptionDetails", json::object());
      std::string line = details.value("text", "exception");
      if (details.contains("exception"))
        line += " " + details["exception"].value("description", "");
      console_.push_back(trim(line));
    }
  }

  json call(const std::string& method, json params) {
    int id = ++next_id_;
    json req{{"id", id}, {"method", method}, {"params", std::move(params)}};
    client_.send_text(req.dump());
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(timeout_s_);
    for (;;) {
      auto left = std::chrono::duration<double>(deadline -
                                                std::chrono::steady_clock::now())
                      .count();
      if (left <= 0) throw RendererError("devtools call timeout: " + method);
      auto text = client_.recv_text(left);
      if (!text) throw RendererError("devtools call timeout: " + method);
      json msg = json::parse(*text, nullptr, false);
      if (msg.is_discarded()) continue;
      if (msg.contains("id") && msg["id"] == id) {
        if (msg.contains("error"))
          throw RendererError("devtools error on " + method + ": " +
                              msg["error"].value("message", "unknown"));
        return msg.value("result", json::object());
      }
      handle_message(msg);
    }
  }

  bool wait_event(const std::string& name, double timeout_s) {
    auto consumed = [&] {
      for (size_t i = 0; i < seen_events_.size(); ++i)
        if (seen_events_[i] == name) {
          seen_events_.erase(seen_events_.begin() + long(i));
          return true;
        }
      return false;
    };
    if (consumed()) return true;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(timeout_s);
    for (;;) {
      auto left = std::chrono::duration<double>(deadline -
                                                std::chrono::steady_clock::now())
                      .count();
      if (left <= 0) return false;
      auto text = client_.recv_text(left);
      if (!text) return false;
      json msg = json::parse(*text, nullptr, false);
      if (msg.is_discarded()) continue;
      handle_message(msg);
      if (consumed()) return true;
    }
  }

  const std::string& full_screenshot() {
    if (!screenshot_.empty()) return screenshot_;
    call("Page.getLayoutMetrics", {});
    auto shot = call("Page.captureScreenshot",
                     {{"format", "png"}, {"captureBeyondViewport", true}});
    screenshot_ = base64_decode(shot.value("data", ""));
    if (screenshot_.empty()) throw RendererError("empty screenshot from browser");
    return screenshot_;
  }

  static std::string locate_script(const std::string& asset_path) {
    std::string p = asset_path;
    return "(() => {"
           "const p = \"" + p + "\";"
           "let el = document.querySelector('[src=\"' + p + '\"], [poster=\"' + p + '\"], "
           "[src=\"./' + p + '\"]');"
           "if (!el) { for (const e of document.querySelectorAll('*')) {"
           "const bg = getComputedStyle(e).backgroundImage || '';"
           "if (bg.includes(p)) { el = e; break; } } }"
           "if (!el) return null;"
           "const r = el.getBoundingClientRect();"
           "let opacity = 1, visibility = 'visible', display = getComputedStyle(el).display;"
           "for (let e = el; e; e = e.parentElement) {"
           "const cs = getComputedStyle(e);"
           "opacity *= parseFloat(cs.opacity);"
           "if (cs.visibility === 'hidden') visibility = 'hidden';"
           "if (cs.display === 'none') display = 'none'; }"
           "const cs = getComputedStyle(el);"
           "return JSON.stringify({x: r.x + window.scrollX, y: r.y + window.scrollY,"
           "w: r.width, h: r.height, opacity: String(+opacity.toFixed(4)),"
           "visibility: visibility, display: display, fit: cs.objectFit || 'fill',"
           "pos: cs.objectPosition, rw: Math.round(r.width), rh: Math.round(r.height)});"
           "})()";
  }
};

inline std::unique_ptr<BrowserSession> make_stub_session() {
  return std::make_unique<StubSession>();
}

// Accepts either a direct ws:// debugger url or an http:// devtools root,
// in which case a fresh page target is requested first.
inline std::unique_ptr<BrowserSession> make_cdp_session(const std::string& endpoint,
                                                        double timeout_s = 20,
                                                        int settle_ms = 500) {
  if (endpoint.rfind("ws://", 0) == 0)
    return std::make_unique<CdpSession>(endpoint, timeout_s, settle_ms);
  if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0)
    throw ConfigError("browser endpoint must be ws:// or http://: " + endpoint);

  httplib::Client http(endpoint);
  http.set_connection_timeout(int(timeout_s), 0);
  std::string ws_url;
  for (auto method : {0, 1}) {
    auto res = method == 0 ? http.Put("/json/new?about:blank")
                           : http.Get("/json/new?about:blank");
    if (!res || res->status != 200) continue;
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) continue;
    ws_url = body.value("webSocketDebuggerUrl", "");
    if (!ws_url.empty()) break;
  }
  if (ws_url.empty())
    throw RendererError("browser unreachable: no debugger target from " + endpoint);
  return std::make_unique<CdpSession>(ws_url, timeout_s, settle_ms);
}

inline RenderResult render_page(BrowserSession& session, const fs::path& site_root,
                                Viewport viewport) {
  session.navigate(site_root, viewport);
  return session.render();
}

// Browser endpoint comes from the environment; without one the static stub
// renders, so the pipeline works hermetically.
inline RenderResult render_page(const fs::path& site_root, Viewport viewport) {
  const char* endpoint = std::getenv("WEBFORGE_BROWSER_ENDPOINT");
  auto session = endpoint && *endpoint ? make_cdp_session(endpoint) : make_stub_session();
  return render_page(*session, site_root, viewport);
}

inline ElementCrop crop_element(BrowserSession& session, const std::string& asset_path) {
  return session.crop_element(asset_path);
}

inline RenderResult stub_render(const fs::path& site_root, Viewport viewport) {
  StubSession session;
  return render_page(session, site_root, viewport);
}

// Uniformly spaced frames across [0, duration), always including t=0; n is
// clamped to the container's frame count.
inline FrameSample sample_frames(const fs::path& video_path, int n) {
  if (n < 1) throw std::invalid_argument("frame count must be positive");
  auto info = media::probe_video(video_path);
  if (info.duration_s <= 0 || info.frame_count < 1)
    throw RendererError("video has no decodable frames: " + video_path.string());
  int count = std::min(n, info.frame_count);
  FrameSample sample;
  sample.asset_path = video_path.string();
  for (int i = 0; i < count; ++i) {
    double t = info.duration_s * i / count;
    sample.timestamps_s.push_back(t);
    sample.frames.push_back(media::extract_frame_png(video_path, t));
  }
  return sample;
}

}  // namespace webforge::renderer
