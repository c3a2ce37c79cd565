#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rift/describe.hpp"
#include "rift/imgproc.hpp"
#include "rift/match.hpp"

namespace rift {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kInlierColor{255, 255, 0};
inline constexpr Rgb kOutlierColor{255, 0, 0};
inline constexpr Rgb kReferenceKeypointColor{255, 0, 0};
inline constexpr Rgb kTargetKeypointColor{0, 255, 0};

struct DrawnSegment {
  Point2d from;  // canvas coordinates
  Point2d to;
  Rgb color;
};

struct MatchRendering {
  RgbImage image;
  int target_offset_x = 0;  // target image starts at this canvas column
  std::vector<DrawnSegment> segments;
};

/// Side-by-side composite: reference keypoints as red circles, target
/// keypoints as green crosshairs, inliers as yellow lines, outliers as red.
MatchRendering render_matches(const RasterF32& reference, const RasterF32& target,
                              const MatchResult& result,
                              std::span<const Keypoint> reference_keypoints = {},
                              std::span<const Keypoint> target_keypoints = {});

/// Grayscale rendering of a raster after min-max normalization.
RgbImage render_normalized(const RasterF64& map);

/// One fixed color per label 1..n_orientations.
RgbImage render_mim(const MaxIndexMap& mim);

}  // namespace rift
