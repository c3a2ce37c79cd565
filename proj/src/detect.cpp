#include "rift/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rift/imgproc.hpp"

namespace rift {

std::string_view to_string(KeypointKind kind) noexcept {
  return kind == KeypointKind::corner ? "corner" : "edge";
}

void DetectParams::validate() const {
  if (nms_radius < 1) throw std::invalid_argument("detect: nms_radius must be >= 1");
  if (max_corners < 1 || max_edges < 1) {
    throw std::invalid_argument("detect: max_corners and max_edges must be >= 1");
  }
  if (!(fast_threshold > 0.0 && fast_threshold < 1.0)) {
    throw std::invalid_argument("detect: fast_threshold must lie in (0,1)");
  }
  if (border_margin < 3) throw std::invalid_argument("detect: border_margin must be >= 3");
  if (!(corner_percentile >= 0.0 && corner_percentile <= 1.0)) {
    throw std::invalid_argument("detect: corner_percentile must lie in [0,1]");
  }
}

double fast_score(const RasterF64& img, int x, int y) noexcept {
  const double center = img(x, y);
  std::array<double, 16> darker{};
  std::array<double, 16> brighter{};
  for (std::size_t k = 0; k < kFastRing.size(); ++k) {
    const double v = img(x + kFastRing[k][0], y + kFastRing[k][1]);
    darker[k] = center - v;
    brighter[k] = v - center;
  }
  double best = 0.0;
  for (std::size_t start = 0; start < 16; ++start) {
    double arc_dark = darker[start];
    double arc_bright = brighter[start];
    for (int j = 1; j < kFastArc; ++j) {
      const std::size_t k = (start + j) % 16;
      arc_dark = std::min(arc_dark, darker[k]);
      arc_bright = std::min(arc_bright, brighter[k]);
    }
    best = std::max({best, arc_dark, arc_bright});
  }
  return best;
}

std::vector<Keypoint> find_local_maxima(const RasterF64& map, double threshold, int radius,
                                        int margin, KeypointKind kind) {
  const int w = map.width();
  const int h = map.height();
  const int y_begin = margin;
  const int y_end = h - margin;  // exclusive
  const int x_begin = margin;
  const int x_end = w - margin;
  if (y_begin >= y_end || x_begin >= x_end) return {};

  std::vector<std::vector<Keypoint>> rows(static_cast<std::size_t>(y_end - y_begin));
#pragma omp parallel for schedule(dynamic, 8)
  for (int y = y_begin; y < y_end; ++y) {
    auto& found = rows[static_cast<std::size_t>(y - y_begin)];
    for (int x = x_begin; x < x_end; ++x) {
      const double v = map(x, y);
      if (!(v > 0.0) || v < threshold) continue;
      bool dominant = true;
      const int qy0 = std::max(0, y - radius);
      const int qy1 = std::min(h - 1, y + radius);
      const int qx0 = std::max(0, x - radius);
      const int qx1 = std::min(w - 1, x + radius);
      for (int qy = qy0; qy <= qy1 && dominant; ++qy) {
        for (int qx = qx0; qx <= qx1; ++qx) {
          const double q = map(qx, qy);
          // Equal values: the earlier row-major pixel wins.
          if (q > v || (q == v && (qy < y || (qy == y && qx < x)))) {
            dominant = false;
            break;
          }
        }
      }
      if (dominant) {
        found.push_back({static_cast<double>(x), static_cast<double>(y), kind, v, 0.0});
      }
    }
  }

  std::vector<Keypoint> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  // `out` is in row-major order, so a stable sort keeps index order on ties.
  std::stable_sort(out.begin(), out.end(),
                   [](const Keypoint& a, const Keypoint& b) { return a.strength > b.strength; });
  return out;
}

std::vector<Keypoint> detect_corners(const MomentMaps& m, const DetectParams& p) {
  p.validate();
  const RasterF64& cornerness = m.min_moment;
  std::vector<double> nonzero;
  for (double v : cornerness.data()) {
    if (v > 0.0) nonzero.push_back(v);
  }
  if (nonzero.empty()) return {};
  // Nearest-rank quantile.
  auto rank = static_cast<std::size_t>(std::ceil(p.corner_percentile * nonzero.size()));
  rank = std::clamp<std::size_t>(rank, 1, nonzero.size()) - 1;
  std::nth_element(nonzero.begin(), nonzero.begin() + rank, nonzero.end());
  const double threshold = nonzero[rank];

  auto corners = find_local_maxima(cornerness, threshold, p.nms_radius, p.border_margin,
                                   KeypointKind::corner);
  if (corners.size() > static_cast<std::size_t>(p.max_corners)) corners.resize(p.max_corners);
  return corners;
}

std::vector<Keypoint> detect_edges(const MomentMaps& m, const DetectParams& p) {
  p.validate();
  const RasterF64 normalized = normalize_minmax(m.max_moment);
  const int w = normalized.width();
  const int h = normalized.height();
  const int margin = std::max(p.border_margin, 3);

  RasterF64 score(w, h);
#pragma omp parallel for schedule(static)
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double s = fast_score(normalized, x, y);
      if (s > p.fast_threshold) score(x, y) = s;
    }
  }

  auto edges = find_local_maxima(score, 0.0, p.nms_radius, margin, KeypointKind::edge);
  if (edges.size() > static_cast<std::size_t>(p.max_edges)) edges.resize(p.max_edges);
  return edges;
}

std::vector<Keypoint> merge_keypoints(const std::vector<Keypoint>& corners,
                                      const std::vector<Keypoint>& edges, const DetectParams& p) {
  const double r2 = static_cast<double>(p.nms_radius) * p.nms_radius;
  std::vector<Keypoint> merged = corners;
  for (const Keypoint& e : edges) {
    const bool near_corner = std::any_of(corners.begin(), corners.end(), [&](const Keypoint& c) {
      const double dx = c.x - e.x;
      const double dy = c.y - e.y;
      return dx * dx + dy * dy <= r2;
    });
    if (!near_corner) merged.push_back(e);
  }
  const auto cap = static_cast<std::size_t>(p.max_corners) + p.max_edges;
  if (merged.size() > cap) merged.resize(cap);
  return merged;
}

}  // namespace rift
