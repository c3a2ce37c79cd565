#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rift/geometry.hpp"
#include "rift/match.hpp"
#include "rift/pipeline.hpp"
#include "rift/raster.hpp"

namespace rift {

class GroundTruthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference → target ground-truth transform, optionally with the hand-picked
/// correspondences it was fitted from.
struct GroundTruth {
  AffineTransform affine;
  std::vector<PointPair> source_points;

  /// Five correspondences, least-squares fitted. Throws GroundTruthError if
  /// the fit RMSE is 1 px or more.
  static GroundTruth from_points(std::vector<PointPair> points);
};

/// JSON object with "affine": [a11, a12, tx, a21, a22, ty] and/or
/// "correspondences": [[x_ref, y_ref, x_tgt, y_tgt], ...] (exactly five).
GroundTruth parse_ground_truth(std::string_view json_text);
GroundTruth load_ground_truth(const std::filesystem::path& path);

inline constexpr double kCorrectMatchThreshold = 3.0;
inline constexpr int kMinCorrectMatches = 4;

struct EvaluationReport {
  int ncm = 0;        // residual < threshold
  double me = 0.0;    // mean residual over correct matches
  double rmse = 0.0;  // root-mean-square residual over correct matches
  bool success = false;
  double runtime_seconds = 0.0;

  bool operator==(const EvaluationReport&) const = default;
};

/// Metrics from raw residuals: NCM counts residual < threshold, ME and RMSE
/// average over those, success iff NCM ≥ 4.
EvaluationReport evaluate_residuals(std::span<const double> residuals,
                                    double threshold = kCorrectMatchThreshold);

/// Residual of every inlier correspondence under the ground truth, then
/// evaluate_residuals.
EvaluationReport evaluate(const MatchResult& result, const GroundTruth& gt,
                          double threshold = kCorrectMatchThreshold);

/// 0, step, 2·step, ... below 360, then 359 if not already present.
std::vector<double> sweep_angles(double step_degrees);

struct SweepEntry {
  double angle_degrees = 0.0;
  int inlier_count = 0;
  EvaluationReport report;
  std::string failure_reason;
};

struct SweepReport {
  std::vector<SweepEntry> entries;  // ascending angle
  double success_rate = 0.0;        // successes / entries
  double runtime_seconds = 0.0;
};

/// Rotates `reference` about its center by each sweep angle (same canvas,
/// zero fill), matches every copy against the original and scores it with
/// the rotation as ground truth. Angles run in parallel.
SweepReport rotation_sweep(const RasterF32& reference, const RiftConfig& cfg,
                           double step_degrees = 5.0,
                           const std::function<void(const SweepEntry&)>& on_entry = {});

/// Successes over pairs.
double success_rate(std::span<const EvaluationReport> reports);

}  // namespace rift
