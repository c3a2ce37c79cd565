#pragma once

#include <cmath>
#include <span>

namespace rift {

struct Point2d {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2d&) const = default;
};

inline double distance(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Maps (x, y) to (a11 x + a12 y + tx, a21 x + a22 y + ty).
struct AffineTransform {
  double a11 = 1.0, a12 = 0.0, tx = 0.0;
  double a21 = 0.0, a22 = 1.0, ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) { return {1, 0, dx, 0, 1, dy}; }
  /// Rotation by `radians` about `center`. Positive angles turn +x toward +y,
  /// which on screen (y down) is clockwise.
  static AffineTransform rotation_about(Point2d center, double radians);

  double determinant() const noexcept { return a11 * a22 - a12 * a21; }
  bool invertible() const noexcept;

  Point2d apply(Point2d p) const noexcept {
    return {a11 * p.x + a12 * p.y + tx, a21 * p.x + a22 * p.y + ty};
  }

  /// Throws std::domain_error when the transform is singular.
  AffineTransform inverse() const;

  /// (this ∘ inner)(p) = this(inner(p)).
  AffineTransform compose(const AffineTransform& inner) const noexcept;

  double max_coefficient_difference(const AffineTransform& other) const noexcept;

  bool operator==(const AffineTransform&) const = default;
};

struct PointPair {
  Point2d source;
  Point2d target;
};

/// Mean distance between t(p) and u(p) over the given points.
double mean_transfer_difference(const AffineTransform& t, const AffineTransform& u,
                                std::span<const Point2d> points);

}  // namespace rift
