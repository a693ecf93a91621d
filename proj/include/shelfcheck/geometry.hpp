#ifndef SHELFCHECK_GEOMETRY_HPP_
#define SHELFCHECK_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shelfcheck {

/// 2D point in image coordinates (pixels, y grows downward).
struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

/// Axis-aligned box, (x, y) is the top-left corner. Width and height must be
/// positive.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  BBox() = default;
  BBox(double x_, double y_, double w_, double h_) : x(x_), y(y_), w(w_), h(h_) {
    if (!(w > 0.0) || !(h > 0.0)) {
      throw std::invalid_argument("BBox: width and height must be positive");
    }
  }

  Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  double diagonal() const { return std::hypot(w, h); }
  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
};

/// Intersection-over-union of two boxes, in [0, 1]. Identical boxes score
/// exactly 1; the general case is clamped so rounding can never push the
/// ratio past 1.
inline double iou(const BBox& a, const BBox& b) {
  if (a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h) return 1.0;
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  return std::min(1.0, inter / (a.area() + b.area() - inter));
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_GEOMETRY_HPP_
