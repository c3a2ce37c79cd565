#pragma once

#include <span>
#include <vector>

#include "rift/detect.hpp"
#include "rift/log_gabor.hpp"
#include "rift/raster.hpp"

namespace rift {

/// Per-pixel argmax orientation channel of the scale-summed amplitudes.
/// Labels are 1-based. Variant `shift` reads the orientation ring starting at
/// channel shift+1, so original channel c carries label ((c - 1 - shift) mod N) + 1.
struct MaxIndexMap {
  RasterU8 index;
  RasterF64 max_amplitude;
  int shift = 0;
  int n_orientations = 0;

  int width() const noexcept { return index.width(); }
  int height() const noexcept { return index.height(); }

  /// 0-based original channel of a label in this variant.
  int channel_of(int label) const noexcept { return (label - 1 + shift) % n_orientations; }
};

/// Argmax ties go to the smallest original channel, so every variant is an
/// exact relabeling of shift 0.
MaxIndexMap build_mim(const ConvolutionSequence& seq, int shift);

/// Variants 0 .. count-1.
std::vector<MaxIndexMap> build_mim_set(const ConvolutionSequence& seq, int count);

struct OrientationEstimate {
  double angle = 0.0;         // radians in [0, 2π); the patch rotation
  double doubled_peak = 0.0;  // histogram peak in doubled-angle space, [0, 2π)
  double peak_ratio = 0.0;    // peak bin / mean bin of the smoothed histogram
  bool degenerate = false;    // no usable peak; angle forced to 0
};

inline constexpr int kOrientationBins = 36;
inline constexpr double kMinPeakRatio = 1.5;

/// SIFT-like dominant orientation read from the MIM. Each pixel in the disk
/// votes for twice its channel angle (channel orientations are π-periodic),
/// weighted by A_max and a Gaussian of σ = radius/2. The smoothed histogram
/// peak, refined by a parabola, gives the orientation axis; the side of the
/// axis holding more A_max mass picks the direction. Channel angles are taken
/// from the original (unshifted) channel, so every variant gives the same
/// answer.
OrientationEstimate dominant_orientation(const MaxIndexMap& mim, const Keypoint& kp,
                                         double radius);

struct Descriptor {
  std::vector<float> values;  // 6 · 6 · N_o, cell-major then label
  Keypoint keypoint;
  int shift = 0;
  /// Flat patch (no amplitude anywhere); excluded from matching.
  bool degenerate = false;
};

inline constexpr int kDescriptorGrid = 6;

/// One descriptor per MIM in the set, over the patch_size × patch_size window
/// rotated by kp.orientation (nearest-neighbor label sampling). Throws
/// std::out_of_range if the rotated window leaves the image.
std::vector<Descriptor> describe(std::span<const MaxIndexMap> mim_set, const Keypoint& kp,
                                 int patch_size);

/// A keypoint with its descriptor variants: one for a reference image, N_o
/// for a target image.
struct DescriptorSet {
  Keypoint keypoint;
  OrientationEstimate orientation;
  std::vector<Descriptor> variants;
};

/// Orientation + description for every keypoint; parallel over keypoints.
/// Orientation is estimated on mim_set.front().
std::vector<DescriptorSet> describe_keypoints(std::span<const MaxIndexMap> mim_set,
                                              std::span<const Keypoint> keypoints,
                                              int patch_size, double orientation_radius);

}  // namespace rift
