#include "rift/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace rift {

AffineTransform AffineTransform::rotation_about(Point2d center, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  AffineTransform t{c, -s, 0.0, s, c, 0.0};
  t.tx = center.x - (c * center.x - s * center.y);
  t.ty = center.y - (s * center.x + c * center.y);
  return t;
}

bool AffineTransform::invertible() const noexcept {
  const double scale = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  return std::isfinite(determinant()) && std::abs(determinant()) > 1e-12 * scale * scale &&
         scale > 0.0;
}

AffineTransform AffineTransform::inverse() const {
  if (!invertible()) throw std::domain_error("affine transform is singular");
  const double det = determinant();
  AffineTransform inv;
  inv.a11 = a22 / det;
  inv.a12 = -a12 / det;
  inv.a21 = -a21 / det;
  inv.a22 = a11 / det;
  inv.tx = -(inv.a11 * tx + inv.a12 * ty);
  inv.ty = -(inv.a21 * tx + inv.a22 * ty);
  return inv;
}

AffineTransform AffineTransform::compose(const AffineTransform& in) const noexcept {
  AffineTransform r;
  r.a11 = a11 * in.a11 + a12 * in.a21;
  r.a12 = a11 * in.a12 + a12 * in.a22;
  r.a21 = a21 * in.a11 + a22 * in.a21;
  r.a22 = a21 * in.a12 + a22 * in.a22;
  r.tx = a11 * in.tx + a12 * in.ty + tx;
  r.ty = a21 * in.tx + a22 * in.ty + ty;
  return r;
}

double AffineTransform::max_coefficient_difference(const AffineTransform& o) const noexcept {
  return std::max({std::abs(a11 - o.a11), std::abs(a12 - o.a12), std::abs(a21 - o.a21),
                   std::abs(a22 - o.a22), std::abs(tx - o.tx), std::abs(ty - o.ty)});
}

double mean_transfer_difference(const AffineTransform& t, const AffineTransform& u,
                                std::span<const Point2d> points) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : points) sum += distance(t.apply(p), u.apply(p));
  return sum / static_cast<double>(points.size());
}

}  // namespace rift
