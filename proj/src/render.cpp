#include "rift/render.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

namespace rift {

namespace {

cv::Scalar bgr(const Rgb& c) { return cv::Scalar(c[2], c[1], c[0]); }

cv::Point canvas_point(const Point2d& p) {
  return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}

void blit_gray(cv::Mat& canvas, const RasterF32& img, int offset_x) {
  for (int y = 0; y < img.height(); ++y) {
    auto* row = canvas.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const float v = std::clamp(img(x, y), 0.0f, 1.0f);
      const auto g = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      row[offset_x + x] = cv::Vec3b(g, g, g);
    }
  }
}

RgbImage to_rgb(const cv::Mat& bgr_mat) {
  RgbImage out(bgr_mat.cols, bgr_mat.rows);
  for (int y = 0; y < bgr_mat.rows; ++y) {
    const auto* row = bgr_mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr_mat.cols; ++x) {
      std::uint8_t* px = out.at(x, y);
      px[0] = row[x][2];
      px[1] = row[x][1];
      px[2] = row[x][0];
    }
  }
  return out;
}

}  // namespace

MatchRendering render_matches(const RasterF32& reference, const RasterF32& target,
                              const MatchResult& result,
                              std::span<const Keypoint> reference_keypoints,
                              std::span<const Keypoint> target_keypoints) {
  const int width = reference.width() + target.width();
  const int height = std::max(reference.height(), target.height());
  cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(0, 0, 0));
  blit_gray(canvas, reference, 0);
  blit_gray(canvas, target, reference.width());

  MatchRendering out;
  out.target_offset_x = reference.width();
  const double dx = out.target_offset_x;

  for (const auto& kp : reference_keypoints) {
    cv::circle(canvas, canvas_point({kp.x, kp.y}), 3, bgr(kReferenceKeypointColor), 1, cv::LINE_8);
  }
  for (const auto& kp : target_keypoints) {
    const cv::Point c = canvas_point({kp.x + dx, kp.y});
    cv::drawMarker(canvas, c, bgr(kTargetKeypointColor), cv::MARKER_CROSS, 7, 1);
  }
  // Outliers first so inliers stay visible on top.
  for (const bool inliers : {false, true}) {
    for (const auto& c : result.correspondences) {
      if (c.inlier != inliers) continue;
      const Point2d from{c.ref_kp.x, c.ref_kp.y};
      const Point2d to{c.tgt_kp.x + dx, c.tgt_kp.y};
      const Rgb color = inliers ? kInlierColor : kOutlierColor;
      cv::circle(canvas, canvas_point(from), 3, bgr(kReferenceKeypointColor), 1, cv::LINE_8);
      cv::drawMarker(canvas, canvas_point(to), bgr(kTargetKeypointColor), cv::MARKER_CROSS, 7, 1);
      cv::line(canvas, canvas_point(from), canvas_point(to), bgr(color), 1, cv::LINE_8);
      out.segments.push_back({from, to, color});
    }
  }
  out.image = to_rgb(canvas);
  return out;
}

RgbImage render_normalized(const RasterF64& map) {
  const RasterF64 norm = normalize_minmax(map);
  RgbImage out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto g = static_cast<std::uint8_t>(std::lround(norm(x, y) * 255.0));
      std::uint8_t* px = out.at(x, y);
      px[0] = px[1] = px[2] = g;
    }
  }
  return out;
}

RgbImage render_mim(const MaxIndexMap& mim) {
  // Evenly spaced hues, one per label.
  const int n = std::max(mim.n_orientations, 1);
  std::vector<cv::Vec3b> palette(static_cast<std::size_t>(n) + 1, cv::Vec3b(0, 0, 0));
  for (int label = 1; label <= n; ++label) {
    cv::Mat hsv(1, 1, CV_8UC3, cv::Scalar((label - 1) * 180 / n, 220, 255));
    cv::Mat rgb;
    cv::cvtColor(hsv, rgb, cv::COLOR_HSV2RGB);
    palette[static_cast<std::size_t>(label)] = rgb.at<cv::Vec3b>(0, 0);
  }
  RgbImage out(mim.width(), mim.height());
  for (int y = 0; y < mim.height(); ++y) {
    for (int x = 0; x < mim.width(); ++x) {
      const int label = std::min<int>(mim.index(x, y), n);
      const cv::Vec3b& c = palette[static_cast<std::size_t>(label)];
      std::uint8_t* px = out.at(x, y);
      px[0] = c[0];
      px[1] = c[1];
      px[2] = c[2];
    }
  }
  return out;
}

}  // namespace rift
