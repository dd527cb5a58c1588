#include "martensim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace marten {

bool Triangle::contains(const Vec2& p, double tol) const {
  Vec2 va = a, vb = b, vc = c;
  if ((vb - va).cross(vc - va) < 0.0) {
    std::swap(vb, vc);
  }
  // Signed perpendicular distance to each edge; tol is a length.
  const Vec2 edges[3][2] = {{va, vb}, {vb, vc}, {vc, va}};
  for (const auto& e : edges) {
    const Vec2 d = e[1] - e[0];
    const double len = d.norm();
    if (len <= 0.0) {
      return false;
    }
    if (d.cross(p - e[0]) < -tol * len) {
      return false;
    }
  }
  return true;
}

double Shape::area() const {
  switch (type) {
    case ShapeType::Rect:
      return rect.area();
    case ShapeType::Diamond:
      return diamond.area();
    case ShapeType::Triangle:
      return tri.area();
  }
  return 0.0;
}

bool Shape::contains(const Vec2& p, double tol) const {
  switch (type) {
    case ShapeType::Rect:
      return rect.contains(p, tol);
    case ShapeType::Diamond: {
      const double sx = 0.5 * diamond.d1;
      const double sy = 0.5 * diamond.d2;
      if (sx <= 0.0 || sy <= 0.0) return false;
      const double value =
          std::abs(p.x - diamond.center.x) / sx + std::abs(p.y - diamond.center.y) / sy;
      const double grad = std::sqrt(1.0 / (sx * sx) + 1.0 / (sy * sy));
      return value <= 1.0 + tol * grad;
    }
    case ShapeType::Triangle:
      return tri.contains(p, tol);
  }
  return false;
}

Rect Shape::bbox() const {
  switch (type) {
    case ShapeType::Rect:
      return rect;
    case ShapeType::Diamond:
      return Rect(diamond.center.x - 0.5 * diamond.d1, diamond.center.y - 0.5 * diamond.d2,
                  diamond.d1, diamond.d2);
    case ShapeType::Triangle: {
      const double xa = std::min({tri.a.x, tri.b.x, tri.c.x});
      const double xb = std::max({tri.a.x, tri.b.x, tri.c.x});
      const double ya = std::min({tri.a.y, tri.b.y, tri.c.y});
      const double yb = std::max({tri.a.y, tri.b.y, tri.c.y});
      return Rect(xa, ya, xb - xa, yb - ya);
    }
  }
  return Rect();
}

std::vector<Vec2> Shape::vertices() const {
  switch (type) {
    case ShapeType::Rect:
      return {Vec2(rect.x0, rect.y0), Vec2(rect.x1(), rect.y0), Vec2(rect.x1(), rect.y1()),
              Vec2(rect.x0, rect.y1())};
    case ShapeType::Diamond: {
      const auto v = diamond.vertices();
      return {v[0], v[1], v[2], v[3]};
    }
    case ShapeType::Triangle: {
      Vec2 va = tri.a, vb = tri.b, vc = tri.c;
      if ((vb - va).cross(vc - va) < 0.0) {
        std::swap(vb, vc);
      }
      return {va, vb, vc};
    }
  }
  return {};
}

std::array<Rect, 4> rect_quadrants(const Rect& r) {
  if (!(r.l1 > 0.0) || !(r.l2 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "quadrants need positive side lengths");
  }
  const double hx = 0.5 * r.l1;
  const double hy = 0.5 * r.l2;
  const double mx = r.x0 + hx;
  const double my = r.y0 + hy;
  return {Rect(r.x0, r.y0, hx, hy), Rect(mx, r.y0, hx, hy), Rect(r.x0, my, hx, hy),
          Rect(mx, my, hx, hy)};
}

int quadrant_of(const Rect& r, const Vec2& p) {
  if (!r.contains(p)) {
    fail(ErrorKind::InvalidPoint, "point lies outside the rectangle");
  }
  const auto q = rect_quadrants(r);
  for (int i = 0; i < 4; ++i) {
    if (q[i].contains(p)) {
      return i;
    }
  }
  fail(ErrorKind::GeometryError, "quadrants failed to cover the rectangle");
}

BucketParams BucketParams::from_delta(double lambda, double delta) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidParameter, "class ratio must exceed 1");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    fail(ErrorKind::InvalidParameter, "thickness fraction must lie in (0,1)");
  }
  BucketParams p;
  p.lambda = lambda;
  p.delta = delta;
  const double q = -std::log(delta) / std::log(lambda);
  p.class_count = static_cast<int>(std::llround(q + 0.5));
  return p;
}

BucketParams BucketParams::from_class_count(double lambda, int class_count) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidParameter, "class ratio must exceed 1");
  }
  if (class_count < 1) {
    fail(ErrorKind::InvalidParameter, "class count must be positive");
  }
  BucketParams p;
  p.lambda = lambda;
  p.class_count = class_count;
  p.delta = std::pow(lambda, 0.5 - static_cast<double>(class_count));
  return p;
}

int rect_class(double long_side, const BucketParams& params) {
  if (!(long_side > 0.0) || !std::isfinite(long_side)) {
    fail(ErrorKind::InvalidParameter, "length must be finite and positive");
  }
  const double ln_lambda = std::log(params.lambda);
  const double log_l = std::log(long_side);
  const double q = -std::log(params.delta) / ln_lambda;
  const double x = q - log_l / ln_lambda;
  long long j = std::llround(std::ceil(x - 0.5));
  // Class j covers [lo(j), lo(j) + ln_lambda) in log-length space; nudge the
  // rounded guess until the half-open interval test holds.
  auto lo = [&](long long jj) {
    return (-static_cast<double>(jj) - 0.5) * ln_lambda - std::log(params.delta);
  };
  for (int guard = 0; guard < 4 && log_l < lo(j); ++guard) {
    ++j;
  }
  for (int guard = 0; guard < 4 && log_l >= lo(j) + ln_lambda; ++guard) {
    --j;
  }
  return static_cast<int>(j);
}

namespace {

// Canonical refinement pieces inside one corner triangle with its right angle
// at the origin and unit legs along +x and +y.
struct PendingPiece {
  int kind;  // 0: corner triangle, 1: notch with base along x, 2: base along y
  double ox, oy;
  double t;  // leg length (kind 0) or base width (kinds 1, 2)
};

struct CornerFrame {
  double ox, oy, sx, sy;
  Vec2 map(double x, double y) const { return Vec2(ox + sx * x, oy + sy * y); }
};

}  // namespace

double DiamondPacking::covered_fraction() const {
  double total = 0.0;
  for (const auto& d : diamonds) {
    const int r = d.scale_index;
    total += (r == 0) ? 0.5 : std::ldexp(1.0, -2 * r - 3);
  }
  return total;
}

DiamondPacking dyadic_diamond_packing(const Rect& r, int max_ring) {
  if (!(r.l1 > 0.0) || !(r.l2 > 0.0) || !std::isfinite(r.l1) || !std::isfinite(r.l2)) {
    fail(ErrorKind::InvalidParameter, "packing needs positive finite side lengths");
  }
  if (max_ring < 0 || max_ring > 40) {
    fail(ErrorKind::InvalidParameter, "ring count out of range [0, 40]");
  }

  DiamondPacking out;
  out.rings = max_ring;

  Diamond central;
  central.center = r.center();
  central.d1 = r.l1;
  central.d2 = r.l2;
  central.scale_index = 0;
  out.diamonds.push_back(central);

  const double u = 0.5 * r.l1;
  const double v = 0.5 * r.l2;
  const CornerFrame frames[4] = {{r.x0, r.y0, u, v},
                                 {r.x0 + r.l1, r.y0, -u, v},
                                 {r.x0, r.y0 + r.l2, u, -v},
                                 {r.x0 + r.l1, r.y0 + r.l2, -u, -v}};

  auto emit = [&](const CornerFrame& f, double cx, double cy, double alpha, int ring) {
    Diamond d;
    d.center = f.map(cx, cy);
    d.d1 = alpha * r.l1;
    d.d2 = alpha * r.l2;
    d.scale_index = ring;
    out.diamonds.push_back(d);
  };

  // Per-corner queues of pieces due at the current ring.
  std::array<std::vector<PendingPiece>, 4> due;
  for (auto& q : due) {
    q.push_back({0, 0.0, 0.0, 1.0});
  }

  for (int ring = 1; ring <= max_ring; ++ring) {
    for (int corner = 0; corner < 4; ++corner) {
      std::vector<PendingPiece> next;
      next.reserve(2 * due[corner].size());
      for (const PendingPiece& pp : due[corner]) {
        const double t = pp.t;
        const double h = 0.5 * t;
        switch (pp.kind) {
          case 0:
            // Two flush diamonds against the hypotenuse; the remainder is a
            // half-scale corner triangle plus one notch along each leg.
            emit(frames[corner], pp.ox + 0.25 * t, pp.oy + h, 0.25 * t, ring);
            emit(frames[corner], pp.ox + h, pp.oy + 0.25 * t, 0.25 * t, ring);
            next.push_back({0, pp.ox, pp.oy, h});
            next.push_back({1, pp.ox + h, pp.oy, h});
            next.push_back({2, pp.ox, pp.oy + h, h});
            break;
          case 1:
            // Notch with base on a horizontal line and apex half a base up:
            // one flush diamond whose top vertex is the apex, two half notches.
            emit(frames[corner], pp.ox + h, pp.oy + 0.25 * t, 0.25 * t, ring);
            next.push_back({1, pp.ox, pp.oy, h});
            next.push_back({1, pp.ox + h, pp.oy, h});
            break;
          case 2:
            emit(frames[corner], pp.ox + 0.25 * t, pp.oy + h, 0.25 * t, ring);
            next.push_back({2, pp.ox, pp.oy, h});
            next.push_back({2, pp.ox, pp.oy + h, h});
            break;
        }
      }
      due[corner] = std::move(next);
    }
  }

  for (int corner = 0; corner < 4; ++corner) {
    for (const PendingPiece& pp : due[corner]) {
      const CornerFrame& f = frames[corner];
      const double t = pp.t;
      const double h = 0.5 * t;
      Triangle tri;
      switch (pp.kind) {
        case 0:
          tri = Triangle(f.map(pp.ox, pp.oy), f.map(pp.ox + t, pp.oy), f.map(pp.ox, pp.oy + t));
          break;
        case 1:
          tri = Triangle(f.map(pp.ox, pp.oy), f.map(pp.ox + t, pp.oy), f.map(pp.ox + h, pp.oy + h));
          break;
        case 2:
          tri = Triangle(f.map(pp.ox, pp.oy), f.map(pp.ox, pp.oy + t), f.map(pp.ox + h, pp.oy + h));
          break;
      }
      out.frontier.push_back(tri);
      out.frontier_depth.push_back(max_ring + 1);
    }
  }
  return out;
}

DiamondPacking dyadic_diamond_packing_to_scale(const Rect& r, double min_scale) {
  if (!(min_scale > 0.0) || !std::isfinite(min_scale)) {
    fail(ErrorKind::InvalidParameter, "minimum scale must be finite and positive");
  }
  const double lmax = r.long_side();
  int rings = 0;
  while (rings < 40 && std::ldexp(lmax, -(rings + 2)) >= min_scale) {
    ++rings;
  }
  return dyadic_diamond_packing(r, rings);
}

}  // namespace marten
