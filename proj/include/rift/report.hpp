#pragma once

#include <string>

#include "json.hpp"
#include "rift/evaluate.hpp"
#include "rift/match.hpp"
#include "rift/pipeline.hpp"

namespace rift {

/// [a11, a12, tx, a21, a22, ty]
nlohmann::json to_json(const AffineTransform& t);
AffineTransform affine_from_json(const nlohmann::json& j);

/// Per-pair coordinates, distance, winning variant and inlier flag, plus the
/// affine (null when absent).
nlohmann::json to_json(const MatchResult& result);
MatchResult match_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport evaluation_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SweepReport& sweep);

/// Image-level summary: size, role, keypoint counts.
nlohmann::json summary_json(const ImageFeatures& features);

/// x,y,kind,strength rows with a header line.
std::string keypoints_csv(const ImageFeatures& features);

}  // namespace rift
