#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "rift/phase_congruency.hpp"
#include "rift/raster.hpp"

namespace rift {

enum class KeypointKind { corner, edge };

std::string_view to_string(KeypointKind kind) noexcept;

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  KeypointKind kind = KeypointKind::corner;
  double strength = 0.0;
  /// Radians; assigned during description.
  double orientation = 0.0;

  bool operator==(const Keypoint&) const = default;
};

struct DetectParams {
  int nms_radius = 5;
  int max_corners = 2500;
  int max_edges = 2500;
  /// Segment-test threshold on the [0,1]-normalized max-moment map.
  double fast_threshold = 0.05;
  /// Keypoints closer than this to any border are discarded. Must cover the
  /// rotated description patch.
  int border_margin = 69;
  /// Corners must reach this quantile of the nonzero min-moment values.
  double corner_percentile = 0.8;

  void validate() const;

  bool operator==(const DetectParams&) const = default;
};

/// Offsets of the radius-3 Bresenham circle used by the segment test,
/// clockwise starting straight up.
inline constexpr std::array<std::array<int, 2>, 16> kFastRing = {{{0, -3},
                                                                  {1, -3},
                                                                  {2, -2},
                                                                  {3, -1},
                                                                  {3, 0},
                                                                  {3, 1},
                                                                  {2, 2},
                                                                  {1, 3},
                                                                  {0, 3},
                                                                  {-1, 3},
                                                                  {-2, 2},
                                                                  {-3, 1},
                                                                  {-3, 0},
                                                                  {-3, -1},
                                                                  {-2, -2},
                                                                  {-1, -3}}};
inline constexpr int kFastArc = 9;

/// Largest t for which 9 contiguous ring pixels are all brighter than
/// center + t or all darker than center − t. The FAST-9 test at threshold t
/// passes iff fast_score > t. Requires (x, y) at least 3 px from the border.
double fast_score(const RasterF64& img, int x, int y) noexcept;

/// Pixels of `map` that dominate every other pixel within `radius`
/// (Chebyshev window). Ties go to the smaller row-major index. Candidates must
/// be > 0, ≥ `threshold`, and at least `margin` from every border. Sorted by
/// strength descending, then row-major index.
std::vector<Keypoint> find_local_maxima(const RasterF64& map, double threshold, int radius,
                                        int margin, KeypointKind kind);

std::vector<Keypoint> detect_corners(const MomentMaps& m, const DetectParams& p);

std::vector<Keypoint> detect_edges(const MomentMaps& m, const DetectParams& p);

/// Corners first; edges within nms_radius of a corner are dropped.
std::vector<Keypoint> merge_keypoints(const std::vector<Keypoint>& corners,
                                      const std::vector<Keypoint>& edges, const DetectParams& p);

}  // namespace rift
