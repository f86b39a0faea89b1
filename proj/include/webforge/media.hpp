#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "webforge/util.hpp"

namespace webforge::media {

struct Rgb {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
};

inline Rgb color_from_hash(uint64_t h) {
  // Keep channels off the extremes so drawn labels stay visible.
  return {uint8_t(32 + (h & 0xbf)), uint8_t(32 + ((h >> 8) & 0xbf)),
          uint8_t(32 + ((h >> 16) & 0xbf))};
}

inline std::string encode_png(const cv::Mat& mat) {
  std::vector<uchar> buf;
  if (!cv::imencode(".png", mat, buf)) throw RendererError("png encode failed");
  return std::string(buf.begin(), buf.end());
}

inline cv::Mat decode_png(const std::string& bytes) {
  std::vector<uchar> buf(bytes.begin(), bytes.end());
  cv::Mat mat = cv::imdecode(buf, cv::IMREAD_COLOR);
  if (mat.empty()) throw ParseError("undecodable image payload");
  return mat;
}

inline std::pair<int, int> png_dimensions(const std::string& bytes) {
  auto mat = decode_png(bytes);
  return {mat.cols, mat.rows};
}

struct Canvas {
  cv::Mat mat;

  Canvas(int w, int h, Rgb c) : mat(h, w, CV_8UC3, cv::Scalar(c.b, c.g, c.r)) {}
  explicit Canvas(cv::Mat m) : mat(std::move(m)) {}

  void fill_rect(int x, int y, int w, int h, Rgb c) {
    cv::Rect r = cv::Rect(x, y, w, h) & cv::Rect(0, 0, mat.cols, mat.rows);
    if (r.area() > 0) mat(r).setTo(cv::Scalar(c.b, c.g, c.r));
  }

  void draw_text(const std::string& text, int x, int y, double scale, Rgb c) {
    cv::putText(mat, text, cv::Point(x, y), cv::FONT_HERSHEY_SIMPLEX, scale,
                cv::Scalar(c.b, c.g, c.r), std::max(1, int(scale * 2)), cv::LINE_8);
  }

  std::string png() const { return encode_png(mat); }
};

inline std::string make_solid_png(int w, int h, Rgb c, const std::string& label = {}) {
  Canvas canvas(w, h, c);
  if (!label.empty()) {
    Rgb ink{uint8_t(255 - c.r), uint8_t(255 - c.g), uint8_t(255 - c.b)};
    canvas.draw_text(label, w / 8, h / 2, std::max(0.5, w / 400.0), ink);
  }
  return canvas.png();
}

inline std::string overlay_label(const std::string& png, const std::string& label) {
  Canvas canvas(decode_png(png));
  canvas.draw_text(label, canvas.mat.cols / 8, canvas.mat.rows / 4,
                   std::max(0.5, canvas.mat.cols / 400.0), Rgb{250, 250, 250});
  return canvas.png();
}

inline std::string crop_png(const std::string& png, int x, int y, int w, int h) {
  auto mat = decode_png(png);
  cv::Rect r = cv::Rect(x, y, w, h) & cv::Rect(0, 0, mat.cols, mat.rows);
  if (r.area() <= 0) throw RendererError("crop outside image bounds");
  return encode_png(mat(r).clone());
}

inline bool is_uniform_png(const std::string& png, int tolerance = 2) {
  auto mat = decode_png(png);
  cv::Vec3b first = mat.at<cv::Vec3b>(0, 0);
  cv::Mat diff;
  cv::absdiff(mat, cv::Scalar(first[0], first[1], first[2]), diff);
  double max_spread = 0;
  cv::minMaxLoc(diff.reshape(1), nullptr, &max_spread);
  return max_spread <= tolerance;
}

struct VideoInfo {
  int width = 0;
  int height = 0;
  double fps = 0;
  int frame_count = 0;
  double duration_s = 0;
};

inline void write_solid_mp4(const std::filesystem::path& path, int w, int h, int seconds,
                            Rgb c, int fps = 4) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  cv::VideoWriter writer(path.string(), cv::VideoWriter::fourcc('m', 'p', '4', 'v'), fps,
                         cv::Size(w, h), true);
  if (!writer.isOpened()) throw GenerationError("cannot open video writer: " + path.string());
  cv::Mat frame(h, w, CV_8UC3, cv::Scalar(c.b, c.g, c.r));
  for (int i = 0; i < seconds * fps; ++i) writer.write(frame);
  writer.release();
}

inline VideoInfo probe_video(const std::filesystem::path& path) {
  cv::VideoCapture cap(path.string());
  if (!cap.isOpened()) throw RendererError("cannot open video: " + path.string());
  VideoInfo info;
  info.width = int(cap.get(cv::CAP_PROP_FRAME_WIDTH));
  info.height = int(cap.get(cv::CAP_PROP_FRAME_HEIGHT));
  info.fps = cap.get(cv::CAP_PROP_FPS);
  info.frame_count = int(cap.get(cv::CAP_PROP_FRAME_COUNT));
  if (info.fps > 0) info.duration_s = info.frame_count / info.fps;
  return info;
}

inline std::string extract_frame_png(const std::filesystem::path& path, double t_s) {
  cv::VideoCapture cap(path.string());
  if (!cap.isOpened()) throw RendererError("cannot open video: " + path.string());
  cap.set(cv::CAP_PROP_POS_MSEC, t_s * 1000.0);
  cv::Mat frame;
  if (!cap.read(frame) || frame.empty())
    throw RendererError("cannot read frame at " + format_compact(t_s) + "s: " + path.string());
  return encode_png(frame);
}

}  // namespace webforge::media
