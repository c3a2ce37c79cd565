#include "rift/pipeline.hpp"

#include <string>

namespace rift {

ImageFeatures extract_features(const RasterF32& img, const RiftConfig& cfg, ImageRole role,
                               bool keep_intermediates) {
  cfg.validate();
  const int min_side = 2 * cfg.patch_size;
  if (img.width() < min_side || img.height() < min_side) {
    throw PipelineError("image is " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + "; at least " + std::to_string(min_side) +
                        " px per side is required for patch size " +
                        std::to_string(cfg.patch_size));
  }

  ImageFeatures features;
  features.width = img.width();
  features.height = img.height();
  features.role = role;

  const FilterBank bank = build_filter_bank(img.width(), img.height(), cfg.filter);
  std::vector<MaxIndexMap> mims;
  PcMaps pc;
  {
    const ConvolutionSequence seq = convolve(img, bank);
    pc = compute_pc(seq, cfg.pc);
    const int variants = role == ImageRole::reference ? 1 : cfg.filter.n_orientations;
    mims = build_mim_set(seq, variants);
  }
  MomentMaps moments = compute_moments(pc);

  const auto corners = detect_corners(moments, cfg.detect);
  const auto edges = detect_edges(moments, cfg.detect);
  const auto keypoints = merge_keypoints(corners, edges, cfg.detect);
  for (const auto& kp : keypoints) {
    (kp.kind == KeypointKind::corner ? features.corner_count : features.edge_count) += 1;
  }
  if (keypoints.empty()) throw PipelineError("no keypoints detected");

  features.descriptors =
      describe_keypoints(mims, keypoints, cfg.patch_size, cfg.orientation_radius);

  if (keep_intermediates) {
    features.intermediates =
        FeatureIntermediates{std::move(pc), std::move(moments), std::move(mims.front())};
  }
  return features;
}

MatchResult match_features(const ImageFeatures& reference, const ImageFeatures& target,
                           const RiftConfig& cfg) {
  std::vector<Descriptor> ref_desc;
  ref_desc.reserve(reference.descriptors.size());
  for (const auto& ds : reference.descriptors) {
    ref_desc.insert(ref_desc.end(), ds.variants.begin(), ds.variants.end());
  }
  const auto candidates = match_nn(ref_desc, target.descriptors, cfg.mutual_nn);
  MatchResult result = remove_outliers(candidates, cfg.match);
  if (result.inlier_count < cfg.min_inliers) {
    result.success = false;
    if (result.failure_reason.empty()) {
      result.failure_reason = "only " + std::to_string(result.inlier_count) +
                              " inliers; at least " + std::to_string(cfg.min_inliers) +
                              " are required";
    }
  }
  return result;
}

MatchResult match_pair(const RasterF32& reference, const RasterF32& target,
                       const RiftConfig& cfg) {
  const ImageFeatures ref = extract_features(reference, cfg, ImageRole::reference);
  const ImageFeatures tgt = extract_features(target, cfg, ImageRole::target);
  return match_features(ref, tgt, cfg);
}

}  // namespace rift
