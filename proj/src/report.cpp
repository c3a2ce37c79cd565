#include "rift/report.hpp"

#include <sstream>

namespace rift {

using json = nlohmann::json;

namespace {

json keypoint_json(const Keypoint& kp) {
  return {{"x", kp.x},
          {"y", kp.y},
          {"kind", std::string(to_string(kp.kind))},
          {"strength", kp.strength},
          {"orientation", kp.orientation}};
}

Keypoint keypoint_from_json(const json& j) {
  Keypoint kp;
  kp.x = j.at("x").get<double>();
  kp.y = j.at("y").get<double>();
  kp.kind = j.at("kind").get<std::string>() == "edge" ? KeypointKind::edge : KeypointKind::corner;
  kp.strength = j.at("strength").get<double>();
  kp.orientation = j.at("orientation").get<double>();
  return kp;
}

}  // namespace

json to_json(const AffineTransform& t) { return json::array({t.a11, t.a12, t.tx, t.a21, t.a22, t.ty}); }

AffineTransform affine_from_json(const json& j) {
  if (!j.is_array() || j.size() != 6) throw std::invalid_argument("affine must have 6 coefficients");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>(), j[4].get<double>(), j[5].get<double>()};
}

json to_json(const MatchResult& result) {
  json matches = json::array();
  for (const auto& c : result.correspondences) {
    matches.push_back({{"ref", keypoint_json(c.ref_kp)},
                       {"tgt", keypoint_json(c.tgt_kp)},
                       {"ref_index", c.ref_index},
                       {"tgt_index", c.tgt_index},
                       {"distance", c.distance},
                       {"variant", c.variant},
                       {"inlier", c.inlier}});
  }
  return {{"success", result.success},
          {"failure_reason", result.failure_reason},
          {"inlier_count", result.inlier_count},
          {"affine", result.affine ? to_json(*result.affine) : json(nullptr)},
          {"matches", std::move(matches)}};
}

MatchResult match_result_from_json(const json& j) {
  MatchResult r;
  r.success = j.at("success").get<bool>();
  r.failure_reason = j.at("failure_reason").get<std::string>();
  r.inlier_count = j.at("inlier_count").get<int>();
  if (!j.at("affine").is_null()) r.affine = affine_from_json(j.at("affine"));
  for (const auto& m : j.at("matches")) {
    Correspondence c;
    c.ref_kp = keypoint_from_json(m.at("ref"));
    c.tgt_kp = keypoint_from_json(m.at("tgt"));
    c.ref_index = m.at("ref_index").get<std::size_t>();
    c.tgt_index = m.at("tgt_index").get<std::size_t>();
    c.distance = m.at("distance").get<double>();
    c.variant = m.at("variant").get<int>();
    c.inlier = m.at("inlier").get<bool>();
    r.correspondences.push_back(c);
  }
  return r;
}

json to_json(const EvaluationReport& report) {
  return {{"ncm", report.ncm},
          {"me", report.me},
          {"rmse", report.rmse},
          {"success", report.success},
          {"runtime_seconds", report.runtime_seconds}};
}

EvaluationReport evaluation_report_from_json(const json& j) {
  EvaluationReport r;
  r.ncm = j.at("ncm").get<int>();
  r.me = j.at("me").get<double>();
  r.rmse = j.at("rmse").get<double>();
  r.success = j.at("success").get<bool>();
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  return r;
}

json to_json(const SweepReport& sweep) {
  json entries = json::array();
  for (const auto& e : sweep.entries) {
    json row = to_json(e.report);
    row["angle_degrees"] = e.angle_degrees;
    row["inlier_count"] = e.inlier_count;
    row["failure_reason"] = e.failure_reason;
    entries.push_back(std::move(row));
  }
  return {{"angles", entries.size()},
          {"success_rate", sweep.success_rate},
          {"runtime_seconds", sweep.runtime_seconds},
          {"entries", std::move(entries)}};
}

json summary_json(const ImageFeatures& features) {
  return {{"width", features.width},
          {"height", features.height},
          {"role", features.role == ImageRole::reference ? "reference" : "target"},
          {"keypoints", features.descriptors.size()},
          {"corners", features.corner_count},
          {"edges", features.edge_count}};
}

std::string keypoints_csv(const ImageFeatures& features) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,kind,strength\n";
  for (const auto& ds : features.descriptors) {
    const Keypoint& kp = ds.keypoint;
    os << kp.x << ',' << kp.y << ',' << to_string(kp.kind) << ',' << kp.strength << '\n';
  }
  return os.str();
}

}  // namespace rift
