#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rift/describe.hpp"
#include "rift/geometry.hpp"

namespace rift {

struct Correspondence {
  Keypoint ref_kp;
  Keypoint tgt_kp;
  std::size_t ref_index = 0;  // into the reference descriptor list
  std::size_t tgt_index = 0;  // into the target descriptor-set list
  double distance = 0.0;
  int variant = 0;            // MIM shift of the winning target descriptor
  bool inlier = false;

  bool operator==(const Correspondence&) const = default;
};

struct MatchResult {
  std::vector<Correspondence> correspondences;
  std::optional<AffineTransform> affine;  // present iff inlier_count >= 3
  int inlier_count = 0;
  bool success = false;
  std::string failure_reason;

  bool operator==(const MatchResult&) const = default;
};

class DegenerateConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares affine fit. Throws DegenerateConfiguration for fewer than 3
/// pairs or (near-)collinear source points.
AffineTransform estimate_affine(std::span<const PointPair> pairs);

/// Per-pair transfer residuals |t(source) - target|.
std::vector<double> affine_residuals(const AffineTransform& t, std::span<const PointPair> pairs);

/// For each reference descriptor, the nearest target descriptor over every
/// target keypoint and variant (ties: smaller target index, then smaller
/// variant). With `mutual`, a pair survives only if the reference keypoint is
/// also the target keypoint's nearest over all its variants (ties: smaller
/// reference index). Degenerate descriptors never match. Throws
/// std::invalid_argument on empty inputs.
std::vector<Correspondence> match_nn(std::span<const Descriptor> ref,
                                     std::span<const DescriptorSet> tgt, bool mutual = true);

struct ConsensusParams {
  double threshold = 3.0;  // pixels
  int iterations = 10000;
  std::uint64_t seed = 42;
  /// Least-squares refit rounds on the consensus set.
  int refinement_rounds = 5;

  bool operator==(const ConsensusParams&) const = default;
};

/// Random 3-point affine consensus, then least-squares refit on the winning
/// inliers. Candidates are put in a canonical order first, so the outcome
/// depends only on the candidate set and the seed.
MatchResult remove_outliers(std::span<const Correspondence> candidates,
                            const ConsensusParams& params);

}  // namespace rift
