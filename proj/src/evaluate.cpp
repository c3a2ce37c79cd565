#include "rift/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "rift/imgproc.hpp"

namespace rift {

using json = nlohmann::json;

GroundTruth GroundTruth::from_points(std::vector<PointPair> points) {
  if (points.size() != 5) {
    throw GroundTruthError("ground truth needs exactly 5 correspondences, got " +
                           std::to_string(points.size()));
  }
  GroundTruth gt;
  try {
    gt.affine = estimate_affine(points);
  } catch (const DegenerateConfiguration& e) {
    throw GroundTruthError(std::string("ground truth correspondences are degenerate: ") + e.what());
  }
  double sq = 0.0;
  for (double r : affine_residuals(gt.affine, points)) sq += r * r;
  const double rmse = std::sqrt(sq / static_cast<double>(points.size()));
  if (!(rmse < 1.0)) {
    throw GroundTruthError("ground truth correspondences fit an affine with RMSE " +
                           std::to_string(rmse) + " px (must be < 1)");
  }
  gt.source_points = std::move(points);
  return gt;
}

GroundTruth parse_ground_truth(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw GroundTruthError(std::string("ground truth is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw GroundTruthError("ground truth must be a JSON object");

  std::optional<GroundTruth> from_points;
  if (doc.contains("correspondences")) {
    std::vector<PointPair> pts;
    for (const auto& row : doc.at("correspondences")) {
      if (!row.is_array() || row.size() != 4) {
        throw GroundTruthError("each correspondence must be [x_ref, y_ref, x_tgt, y_tgt]");
      }
      pts.push_back({{row[0].get<double>(), row[1].get<double>()},
                     {row[2].get<double>(), row[3].get<double>()}});
    }
    from_points = GroundTruth::from_points(std::move(pts));
  }
  if (doc.contains("affine")) {
    const auto& a = doc.at("affine");
    if (!a.is_array() || a.size() != 6) {
      throw GroundTruthError("\"affine\" must be [a11, a12, tx, a21, a22, ty]");
    }
    GroundTruth gt;
    gt.affine = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(),
                 a[3].get<double>(), a[4].get<double>(), a[5].get<double>()};
    if (!gt.affine.invertible()) throw GroundTruthError("ground truth affine is singular");
    if (from_points) gt.source_points = std::move(from_points->source_points);
    return gt;
  }
  if (!from_points) {
    throw GroundTruthError("ground truth needs \"affine\" or \"correspondences\"");
  }
  return *from_points;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GroundTruthError("cannot read ground truth '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ground_truth(buf.str());
}

EvaluationReport evaluate_residuals(std::span<const double> residuals, double threshold) {
  EvaluationReport r;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : residuals) {
    if (!(e < threshold)) continue;
    ++r.ncm;
    sum += e;
    sum_sq += e * e;
  }
  if (r.ncm > 0) {
    r.me = sum / r.ncm;
    r.rmse = std::sqrt(sum_sq / r.ncm);
  }
  r.success = r.ncm >= kMinCorrectMatches;
  return r;
}

EvaluationReport evaluate(const MatchResult& result, const GroundTruth& gt, double threshold) {
  std::vector<double> residuals;
  for (const auto& c : result.correspondences) {
    if (!c.inlier) continue;
    const Point2d mapped = gt.affine.apply({c.ref_kp.x, c.ref_kp.y});
    residuals.push_back(distance(mapped, {c.tgt_kp.x, c.tgt_kp.y}));
  }
  return evaluate_residuals(residuals, threshold);
}

std::vector<double> sweep_angles(double step_degrees) {
  if (!(step_degrees > 0.0) || step_degrees > 360.0) {
    throw std::invalid_argument("sweep step must lie in (0, 360]");
  }
  std::vector<double> angles;
  for (int k = 0;; ++k) {
    const double a = k * step_degrees;
    if (a >= 360.0) break;
    angles.push_back(a);
  }
  if (angles.back() != 359.0) angles.push_back(359.0);
  return angles;
}

double success_rate(std::span<const EvaluationReport> reports) {
  if (reports.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : reports) ok += r.success ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(reports.size());
}

SweepReport rotation_sweep(const RasterF32& reference, const RiftConfig& cfg, double step_degrees,
                           const std::function<void(const SweepEntry&)>& on_entry) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::vector<double> angles = sweep_angles(step_degrees);
  const ImageFeatures ref = extract_features(reference, cfg, ImageRole::reference);
  const Point2d center{(reference.width() - 1) / 2.0, (reference.height() - 1) / 2.0};

  SweepReport sweep;
  sweep.entries.resize(angles.size());
  const auto n = static_cast<std::ptrdiff_t>(angles.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto t0 = clock::now();
    SweepEntry& entry = sweep.entries[static_cast<std::size_t>(k)];
    entry.angle_degrees = angles[static_cast<std::size_t>(k)];
    GroundTruth gt;
    gt.affine = AffineTransform::rotation_about(center, entry.angle_degrees * std::numbers::pi / 180.0);
    try {
      const RasterF32 rotated =
          warp_affine(reference, gt.affine, reference.width(), reference.height());
      const ImageFeatures tgt = extract_features(rotated, cfg, ImageRole::target);
      const MatchResult result = match_features(ref, tgt, cfg);
      entry.inlier_count = result.inlier_count;
      entry.failure_reason = result.failure_reason;
      entry.report = evaluate(result, gt);
    } catch (const std::exception& e) {
      entry.failure_reason = e.what();
      entry.report = EvaluationReport{};
    }
    entry.report.runtime_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (on_entry) {
#pragma omp critical(rift_sweep_progress)
      on_entry(entry);
    }
  }

  std::vector<EvaluationReport> reports;
  for (const auto& e : sweep.entries) reports.push_back(e.report);
  sweep.success_rate = success_rate(reports);
  sweep.runtime_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return sweep;
}

}  // namespace rift
