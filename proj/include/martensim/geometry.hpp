#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "martensim/errors.hpp"
#include "martensim/mat2.hpp"

namespace marten {

// Axis-aligned rectangle stored as lower-left corner plus side lengths.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double l1 = 0.0;  // extent along axis 1 (x)
  double l2 = 0.0;  // extent along axis 2 (y)
  std::int64_t id = -1;

  Rect() = default;
  Rect(double x0_, double y0_, double l1_, double l2_)
      : x0(x0_), y0(y0_), l1(l1_), l2(l2_) {}

  double x1() const { return x0 + l1; }
  double y1() const { return y0 + l2; }
  double area() const { return l1 * l2; }
  double side(int axis) const { return axis == 1 ? l1 : l2; }
  double long_side() const { return l1 >= l2 ? l1 : l2; }
  double short_side() const { return l1 >= l2 ? l2 : l1; }
  double aspect() const { return long_side() / short_side(); }
  Vec2 center() const { return Vec2(x0 + 0.5 * l1, y0 + 0.5 * l2); }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1() + tol && p.y >= y0 - tol &&
           p.y <= y1() + tol;
  }
  bool contains_rect(const Rect& r, double tol = 0.0) const {
    return r.x0 >= x0 - tol && r.x1() <= x1() + tol && r.y0 >= y0 - tol &&
           r.y1() <= y1() + tol;
  }
};

// Axis-aligned rhombus: center plus full diagonal lengths along x and y.
struct Diamond {
  Vec2 center;
  double d1 = 0.0;
  double d2 = 0.0;
  int scale_index = 0;  // 0 = central diamond, r >= 1 = refinement ring r

  double area() const { return 0.5 * d1 * d2; }
  double long_axis() const { return d1 >= d2 ? d1 : d2; }
  bool contains(const Vec2& p, double tol = 0.0) const {
    const double sx = 0.5 * d1;
    const double sy = 0.5 * d2;
    if (sx <= 0.0 || sy <= 0.0) return false;
    return std::abs(p.x - center.x) / sx + std::abs(p.y - center.y) / sy <=
           1.0 + tol;
  }
  std::array<Vec2, 4> vertices() const {
    return {Vec2(center.x + 0.5 * d1, center.y), Vec2(center.x, center.y + 0.5 * d2),
            Vec2(center.x - 0.5 * d1, center.y), Vec2(center.x, center.y - 0.5 * d2)};
  }
};

struct Triangle {
  Vec2 a, b, c;

  Triangle() = default;
  Triangle(const Vec2& a_, const Vec2& b_, const Vec2& c_) : a(a_), b(b_), c(c_) {}

  double area() const { return 0.5 * std::abs((b - a).cross(c - a)); }
  bool contains(const Vec2& p, double tol = 0.0) const;
};

enum class ShapeType { Rect, Diamond, Triangle };

// Tagged union of the three primitive region shapes.
struct Shape {
  ShapeType type = ShapeType::Rect;
  Rect rect;
  Diamond diamond;
  Triangle tri;

  static Shape of(const Rect& r) {
    Shape s;
    s.type = ShapeType::Rect;
    s.rect = r;
    return s;
  }
  static Shape of(const Diamond& d) {
    Shape s;
    s.type = ShapeType::Diamond;
    s.diamond = d;
    return s;
  }
  static Shape of(const Triangle& t) {
    Shape s;
    s.type = ShapeType::Triangle;
    s.tri = t;
    return s;
  }

  double area() const;
  bool contains(const Vec2& p, double tol = 0.0) const;
  Rect bbox() const;
  // Counter-clockwise boundary vertices.
  std::vector<Vec2> vertices() const;
};

// Four congruent sub-rectangles in fixed index order: 0 = lower-left,
// 1 = lower-right, 2 = upper-left, 3 = upper-right.
std::array<Rect, 4> rect_quadrants(const Rect& r);

// Index of the quadrant containing p; boundary ties resolve to the lowest index.
int quadrant_of(const Rect& r, const Vec2& p);

// Geometric length classes: class j collects long sides L with
// lambda^(-j-1/2) / delta <= L < lambda^(-j+1/2) / delta.
struct BucketParams {
  double lambda = 1.1;
  double delta = 0.1;
  int class_count = 0;  // classes 0..class_count-1 cover [1, 1/delta]

  static BucketParams from_delta(double lambda, double delta);
  // Exact construction delta = lambda^(1/2 - class_count); the class of L = 1
  // is then class_count - 1 and the edge identity holds to 1e-12.
  static BucketParams from_class_count(double lambda, int class_count);
};

int rect_class(double long_side, const BucketParams& params);
// Rectangles are classified by their aspect ratio (long side / short side).
inline int rect_class(const Rect& r, const BucketParams& params) {
  return rect_class(r.aspect(), params);
}

// Self-similar diamond packing of a rectangle. Ring 0 is the central diamond
// spanning the full rectangle (half the area); ring r >= 1 adds 8 * 2^(r-1)
// diamonds of relative scale 2^(-r-1), each ring covering 2^(-r-1) of the
// area, so rings 0..R cover exactly 1 - 2^(-R-1).
struct DiamondPacking {
  std::vector<Diamond> diamonds;
  // Uncovered corner pieces left after the last ring; together with the
  // diamonds they tile the rectangle exactly.
  std::vector<Triangle> frontier;
  // frontier_depth[i] = ring at which frontier[i] would have been refined next.
  std::vector<int> frontier_depth;
  int rings = 0;
  // Exact covered-area fraction after all emitted rings (dyadic bookkeeping).
  double covered_fraction() const;
};

DiamondPacking dyadic_diamond_packing(const Rect& r, int max_ring);

// Variant that keeps adding rings while the candidate diamonds' long axis
// stays >= min_scale (at least the central diamond is always emitted).
DiamondPacking dyadic_diamond_packing_to_scale(const Rect& r, double min_scale);

}  // namespace marten
