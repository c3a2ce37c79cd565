#include "rift/imgproc.hpp"

#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace rift {

namespace {

double channel_scale(int depth) {
  switch (depth) {
    case CV_8U:
      return 1.0 / 255.0;
    case CV_16U:
      return 1.0 / 65535.0;
    case CV_32F:
    case CV_64F:
      return 1.0;
    default:
      return 0.0;
  }
}

}  // namespace

RasterF32 load_grayscale(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ImageIoError("cannot open image '" + path.string() + "': no such file");
  }
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot decode image '" + path.string() + "': " + e.what());
  }
  if (raw.empty()) {
    throw ImageIoError("cannot decode image '" + path.string() + "': unsupported format");
  }
  const double scale = channel_scale(raw.depth());
  if (scale == 0.0) {
    throw ImageIoError("cannot decode image '" + path.string() + "': unsupported pixel depth");
  }
  cv::Mat data;
  raw.convertTo(data, CV_64F, scale);

  const int channels = data.channels();
  RasterF32 out(data.cols, data.rows);
  for (int y = 0; y < data.rows; ++y) {
    const double* row = data.ptr<double>(y);
    for (int x = 0; x < data.cols; ++x) {
      const double* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      double v = 0.0;
      if (channels == 1 || channels == 2) {
        v = px[0];
      } else {
        // OpenCV decodes color as BGR(A).
        v = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
      }
      if (!std::isfinite(v)) v = 0.0;
      out(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

void save_png(const std::filesystem::path& path, const RasterF32& img) {
  cv::Mat m(img.height(), img.width(), CV_8U);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const double v = std::clamp(static_cast<double>(img(x, y)), 0.0, 1.0);
      row[x] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  if (!cv::imwrite(path.string(), m)) {
    throw ImageIoError("cannot write image '" + path.string() + "'");
  }
}

void save_png(const std::filesystem::path& path, const RgbImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      const auto* px = img.at(x, y);
      row[3 * x + 0] = px[2];
      row[3 * x + 1] = px[1];
      row[3 * x + 2] = px[0];
    }
  }
  if (!cv::imwrite(path.string(), m)) {
    throw ImageIoError("cannot write image '" + path.string() + "'");
  }
}

RasterF32 warp_affine(const RasterF32& img, const AffineTransform& t, int out_width,
                      int out_height) {
  const AffineTransform inv = t.inverse();
  RasterF32 out(out_width, out_height);
  const int w = img.width();
  const int h = img.height();
  auto fetch = [&](int x, int y) -> double {
    return (x >= 0 && y >= 0 && x < w && y < h) ? static_cast<double>(img(x, y)) : 0.0;
  };

#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Point2d src = inv.apply({static_cast<double>(x), static_cast<double>(y)});
      const double fx = std::floor(src.x);
      const double fy = std::floor(src.y);
      // Fully outside the one-pixel bilinear support.
      if (fx < -1.0 || fy < -1.0 || fx > w - 1 || fy > h - 1) continue;
      const int x0 = static_cast<int>(fx);
      const int y0 = static_cast<int>(fy);
      const double dx = src.x - fx;
      const double dy = src.y - fy;
      double v = fetch(x0, y0) * (1.0 - dx) * (1.0 - dy);
      if (dx != 0.0) v += fetch(x0 + 1, y0) * dx * (1.0 - dy);
      if (dy != 0.0) v += fetch(x0, y0 + 1) * (1.0 - dx) * dy;
      if (dx != 0.0 && dy != 0.0) v += fetch(x0 + 1, y0 + 1) * dx * dy;
      out(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

}  // namespace rift
