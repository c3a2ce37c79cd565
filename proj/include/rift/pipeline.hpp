#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rift/describe.hpp"
#include "rift/detect.hpp"
#include "rift/log_gabor.hpp"
#include "rift/match.hpp"
#include "rift/phase_congruency.hpp"
#include "rift/raster.hpp"

namespace rift {

struct RiftConfig {
  FilterBankParams filter;
  PcParams pc;
  DetectParams detect;
  /// Side of the square description patch; divisible by 6.
  int patch_size = 96;
  double orientation_radius = 48.0;
  ConsensusParams match;
  bool mutual_nn = true;
  /// Fewer correct matches than this counts as a failed match.
  int min_inliers = 4;

  void validate() const;

  bool operator==(const RiftConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sectioned `key = value` text ([filter], [pc], [detect], [describe],
/// [match]). Every field is written; parsing accepts any subset and keeps
/// defaults for the rest, then validates; every problem is a ConfigError.
std::string to_config_text(const RiftConfig& cfg);
RiftConfig parse_config_text(std::string_view text);
RiftConfig load_config(const std::filesystem::path& path);

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ImageRole { reference, target };

struct FeatureIntermediates {
  PcMaps pc;
  MomentMaps moments;
  MaxIndexMap mim;  // shift 0
};

struct ImageFeatures {
  int width = 0;
  int height = 0;
  ImageRole role = ImageRole::reference;
  std::size_t corner_count = 0;
  std::size_t edge_count = 0;
  /// One entry per keypoint: 1 variant for a reference image, N_o for a target.
  std::vector<DescriptorSet> descriptors;
  std::optional<FeatureIntermediates> intermediates;
};

/// Filter, phase congruency, detection and description for one image.
/// Throws PipelineError if the image is smaller than 2·patch_size or has no
/// keypoints.
ImageFeatures extract_features(const RasterF32& img, const RiftConfig& cfg, ImageRole role,
                               bool keep_intermediates = false);

MatchResult match_features(const ImageFeatures& reference, const ImageFeatures& target,
                           const RiftConfig& cfg);

/// Full flow for an image pair. The reference contributes one descriptor per
/// keypoint, the target N_o; swapping the roles can change the result.
MatchResult match_pair(const RasterF32& reference, const RasterF32& target,
                       const RiftConfig& cfg);

}  // namespace rift
