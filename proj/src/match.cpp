#include "rift/match.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

namespace rift {

AffineTransform estimate_affine(std::span<const PointPair> pairs) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  if (n < 3) throw DegenerateConfiguration("estimate_affine: need at least 3 point pairs");

  double mx = 0.0, my = 0.0;
  for (const auto& p : pairs) {
    mx += p.source.x;
    my += p.source.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd bx(n), by(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    design(i, 0) = p.source.x - mx;
    design(i, 1) = p.source.y - my;
    design(i, 2) = 1.0;
    bx(i) = p.target.x;
    by(i) = p.target.y;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> spread(design.leftCols(2));
  const auto& sv = spread.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-9 * sv(0)) {
    throw DegenerateConfiguration("estimate_affine: source points are collinear");
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::Vector3d rx = qr.solve(bx);
  const Eigen::Vector3d ry = qr.solve(by);
  AffineTransform t;
  t.a11 = rx(0);
  t.a12 = rx(1);
  t.tx = rx(2) - rx(0) * mx - rx(1) * my;
  t.a21 = ry(0);
  t.a22 = ry(1);
  t.ty = ry(2) - ry(0) * mx - ry(1) * my;
  return t;
}

std::vector<double> affine_residuals(const AffineTransform& t, std::span<const PointPair> pairs) {
  std::vector<double> r;
  r.reserve(pairs.size());
  for (const auto& p : pairs) r.push_back(distance(t.apply(p.source), p.target));
  return r;
}

namespace {

float squared_distance(const float* a, const float* b, std::size_t dim) noexcept {
  float acc = 0.0f;
#pragma omp simd reduction(+ : acc)
  for (std::size_t k = 0; k < dim; ++k) {
    const float d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

}  // namespace

std::vector<Correspondence> match_nn(std::span<const Descriptor> ref,
                                     std::span<const DescriptorSet> tgt, bool mutual) {
  if (ref.empty() || tgt.empty()) throw std::invalid_argument("match_nn: empty descriptor list");

  std::size_t dim = 0;
  auto check_dim = [&dim](const Descriptor& d) {
    if (dim == 0) dim = d.values.size();
    if (d.values.size() != dim) throw std::invalid_argument("match_nn: descriptor sizes differ");
  };

  std::vector<std::size_t> ref_rows;
  std::vector<float> ref_data;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    check_dim(ref[i]);
    if (ref[i].degenerate) continue;
    ref_rows.push_back(i);
    ref_data.insert(ref_data.end(), ref[i].values.begin(), ref[i].values.end());
  }

  struct TargetRow {
    std::size_t keypoint;
    std::size_t variant;
  };
  std::vector<TargetRow> tgt_rows;
  std::vector<float> tgt_data;
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    for (std::size_t v = 0; v < tgt[j].variants.size(); ++v) {
      const Descriptor& d = tgt[j].variants[v];
      check_dim(d);
      if (d.degenerate) continue;
      tgt_rows.push_back({j, v});
      tgt_data.insert(tgt_data.end(), d.values.begin(), d.values.end());
    }
  }
  if (ref_rows.empty() || tgt_rows.empty()) return {};

  const std::size_t n_ref = ref_rows.size();
  const std::size_t n_tgt_kp = tgt.size();
  constexpr float kInf = std::numeric_limits<float>::infinity();
  std::vector<std::size_t> best_row(n_ref);
  std::vector<float> best_d2(n_ref);
  // Per (reference row, target keypoint): min over that keypoint's variants.
  std::vector<float> kp_min(mutual ? n_ref * n_tgt_kp : 0, kInf);

  const auto n_ref_signed = static_cast<std::ptrdiff_t>(n_ref);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ii = 0; ii < n_ref_signed; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const float* a = &ref_data[i * dim];
    float best = kInf;
    std::size_t arg = 0;
    float* row_min = mutual ? &kp_min[i * n_tgt_kp] : nullptr;
    for (std::size_t r = 0; r < tgt_rows.size(); ++r) {
      const float d2 = squared_distance(a, &tgt_data[r * dim], dim);
      if (d2 < best) {
        best = d2;
        arg = r;
      }
      if (row_min != nullptr) {
        float& m = row_min[tgt_rows[r].keypoint];
        m = std::min(m, d2);
      }
    }
    best_row[i] = arg;
    best_d2[i] = best;
  }

  std::vector<std::size_t> back_match;
  if (mutual) {
    back_match.assign(n_tgt_kp, n_ref);
    std::vector<float> back_d2(n_tgt_kp, kInf);
    for (std::size_t i = 0; i < n_ref; ++i) {
      for (std::size_t j = 0; j < n_tgt_kp; ++j) {
        const float d2 = kp_min[i * n_tgt_kp + j];
        if (d2 < back_d2[j]) {
          back_d2[j] = d2;
          back_match[j] = i;
        }
      }
    }
  }

  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < n_ref; ++i) {
    const TargetRow& row = tgt_rows[best_row[i]];
    if (mutual && back_match[row.keypoint] != i) continue;
    Correspondence c;
    c.ref_index = ref_rows[i];
    c.tgt_index = row.keypoint;
    c.ref_kp = ref[c.ref_index].keypoint;
    c.tgt_kp = tgt[row.keypoint].keypoint;
    c.distance = std::sqrt(static_cast<double>(best_d2[i]));
    c.variant = tgt[row.keypoint].variants[row.variant].shift;
    out.push_back(c);
  }
  return out;
}

namespace {

Point2d ref_point(const Correspondence& c) { return {c.ref_kp.x, c.ref_kp.y}; }
Point2d tgt_point(const Correspondence& c) { return {c.tgt_kp.x, c.tgt_kp.y}; }

/// Exact affine through three pairs; false if the sources are collinear.
bool affine_from_three(const Point2d (&src)[3], const Point2d (&dst)[3], AffineTransform& t) {
  const double x1 = src[1].x - src[0].x, y1 = src[1].y - src[0].y;
  const double x2 = src[2].x - src[0].x, y2 = src[2].y - src[0].y;
  const double det = x1 * y2 - x2 * y1;
  const double scale = std::max({std::abs(x1), std::abs(y1), std::abs(x2), std::abs(y2)});
  if (!(std::abs(det) > 1e-9 * scale * scale)) return false;
  const double u1 = dst[1].x - dst[0].x, v1 = dst[1].y - dst[0].y;
  const double u2 = dst[2].x - dst[0].x, v2 = dst[2].y - dst[0].y;
  t.a11 = (u1 * y2 - u2 * y1) / det;
  t.a12 = (u2 * x1 - u1 * x2) / det;
  t.a21 = (v1 * y2 - v2 * y1) / det;
  t.a22 = (v2 * x1 - v1 * x2) / det;
  t.tx = dst[0].x - t.a11 * src[0].x - t.a12 * src[0].y;
  t.ty = dst[0].y - t.a21 * src[0].x - t.a22 * src[0].y;
  return true;
}

struct Consensus {
  std::vector<std::size_t> members;
  double cost = std::numeric_limits<double>::infinity();

  bool better_than(const Consensus& o) const {
    return members.size() > o.members.size() ||
           (members.size() == o.members.size() && cost < o.cost);
  }
};

Consensus score(const AffineTransform& t, std::span<const Correspondence> cands,
                std::span<const std::size_t> order, double threshold) {
  Consensus c;
  c.cost = 0.0;
  const double t2 = threshold * threshold;
  for (std::size_t idx : order) {
    const Point2d p = t.apply(ref_point(cands[idx]));
    const Point2d q = tgt_point(cands[idx]);
    const double d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
    if (d2 < t2) {
      c.members.push_back(idx);
      c.cost += d2;
    } else {
      c.cost += t2;
    }
  }
  return c;
}

}  // namespace

MatchResult remove_outliers(std::span<const Correspondence> candidates,
                            const ConsensusParams& params) {
  MatchResult result;
  result.correspondences.assign(candidates.begin(), candidates.end());
  for (auto& c : result.correspondences) c.inlier = false;
  if (candidates.size() < 3) {
    result.failure_reason = "fewer than 3 candidate matches";
    return result;
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const auto& c = candidates[i];
    return std::make_tuple(c.ref_kp.x, c.ref_kp.y, c.tgt_kp.x, c.tgt_kp.y, c.distance, c.variant,
                           c.ref_index, c.tgt_index);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);
  Consensus best;
  for (int it = 0; it < params.iterations; ++it) {
    std::size_t s[3];
    s[0] = pick(rng);
    do s[1] = pick(rng); while (s[1] == s[0]);
    do s[2] = pick(rng); while (s[2] == s[0] || s[2] == s[1]);
    Point2d src[3], dst[3];
    for (int k = 0; k < 3; ++k) {
      src[k] = ref_point(candidates[order[s[k]]]);
      dst[k] = tgt_point(candidates[order[s[k]]]);
    }
    AffineTransform model;
    if (!affine_from_three(src, dst, model)) continue;
    Consensus c = score(model, candidates, order, params.threshold);
    if (c.better_than(best)) best = std::move(c);
  }

  if (best.members.size() < 3) {
    result.failure_reason = "no affine consensus of at least 3 matches";
    return result;
  }

  AffineTransform model;
  bool have_model = false;
  for (int round = 0; round < std::max(1, params.refinement_rounds); ++round) {
    std::vector<PointPair> pairs;
    for (std::size_t idx : best.members) {
      pairs.push_back({ref_point(candidates[idx]), tgt_point(candidates[idx])});
    }
    AffineTransform refit;
    try {
      refit = estimate_affine(pairs);
    } catch (const DegenerateConfiguration&) {
      break;
    }
    Consensus c = score(refit, candidates, order, params.threshold);
    // A refit that loses support keeps the previous round.
    if (have_model && c.members.size() < best.members.size()) break;
    const bool stable = (c.members == best.members);
    model = refit;
    have_model = true;
    best = std::move(c);
    if (stable) break;
  }
  if (!have_model || best.members.size() < 3) {
    result.failure_reason = "consensus set is degenerate";
    return result;
  }

  std::sort(best.members.begin(), best.members.end());
  for (std::size_t idx : best.members) result.correspondences[idx].inlier = true;
  result.inlier_count = static_cast<int>(best.members.size());
  result.affine = model;
  result.success = true;
  return result;
}

}  // namespace rift
