#pragma once

#include <array>
#include <cmath>

namespace marten {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Column-major-free 2x2 matrix with entries addressed (row, col).
struct Mat2 {
  // a b
  // c d
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  Mat2() = default;
  Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }

  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }

  Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
  Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }

  // M^T M, the Cauchy-Green tensor of the deformation gradient.
  Mat2 gram() const { return transpose() * (*this); }

  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  std::array<double, 4> flat() const { return {a, b, c, d}; }
};

inline Mat2 outer(const Vec2& u, const Vec2& v) {
  return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
}

inline double frob_dist(const Mat2& x, const Mat2& y) { return (x - y).frobenius(); }

}  // namespace marten
