#include "martensim/wells.hpp"

#include <cmath>

namespace marten {

namespace {

bool finite_entries(const Mat2& m) {
  return std::isfinite(m.a) && std::isfinite(m.b) && std::isfinite(m.c) &&
         std::isfinite(m.d);
}

}  // namespace

Wells make_wells(double gamma) {
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    fail(ErrorKind::InvalidParameter, "shear parameter must be finite and positive");
  }
  Wells w;
  w.gamma = gamma;
  w.f0 = Mat2(1.0, gamma, 0.0, 1.0);
  w.f0inv = Mat2(1.0, -gamma, 0.0, 1.0);
  const double den = 1.0 + gamma * gamma;
  const double c = (1.0 - gamma * gamma) / den;
  const double s = 2.0 * gamma / den;
  w.f1 = Mat2(c, gamma, -s, 1.0);
  w.c_plus = w.f0.gram();
  w.c_minus = w.f0inv.gram();
  return w;
}

Mat2 renormalize_det(const Mat2& raw) {
  if (!finite_entries(raw)) {
    fail(ErrorKind::InvalidParameter, "boundary datum has non-finite entries");
  }
  const double det = raw.det();
  if (std::abs(det - 1.0) <= kRenormSkipTol) {
    return raw;  // keep normalized inputs bit-for-bit
  }
  if (std::abs(det) < 1e-300) {
    fail(ErrorKind::InvalidParameter, "boundary datum is singular");
  }
  return Mat2(raw.a, raw.b, raw.c / det, raw.d / det);
}

bool is_interior(const Mat2& m, double gamma) {
  if (!finite_entries(m)) {
    return false;
  }
  if (std::abs(m.det() - 1.0) > kDetTol) {
    return false;
  }
  const Mat2 cg = m.gram();
  return cg.a < 1.0 && cg.d < 1.0 + gamma * gamma;
}

Mat2 make_boundary_data(const Mat2& raw, const Wells& wells) {
  const Mat2 normalized = renormalize_det(raw);
  if (!is_interior(normalized, wells.gamma)) {
    fail(ErrorKind::OutsideHull,
         "boundary datum is not strictly inside the attainable hull");
  }
  return normalized;
}

double well_distance(const Mat2& m, const Wells& wells) {
  const Mat2 cg = m.gram();
  return std::min(frob_dist(cg, wells.c_plus), frob_dist(cg, wells.c_minus));
}

int well_variant(const Mat2& m, const Wells& wells, double tol) {
  const Mat2 cg = m.gram();
  if (frob_dist(cg, wells.c_plus) <= tol) {
    return 1;
  }
  if (frob_dist(cg, wells.c_minus) <= tol) {
    return -1;
  }
  return 0;
}

Split split_along(const Mat2& g, int normal_axis, const Wells& wells) {
  if (normal_axis != 1 && normal_axis != 2) {
    fail(ErrorKind::InvalidParameter, "lamination normal must be axis 1 or 2");
  }
  const double gamma2 = wells.gamma * wells.gamma;
  const Vec2 c1 = g.col(0);
  const Vec2 c2 = g.col(1);

  // Shared quadratic: perturbing one column of g along the direction of the
  // other keeps det = 1 exactly; the free Cauchy-Green entry is quadratic in
  // the step and the two roots give the two children of the convex split.
  Vec2 dir;      // unit vector multiplying the rank-one update
  double beta;   // linear coefficient of the quadratic (z / sqrt(kept entry))
  double disc;   // discriminant, positive on the admissible set
  if (normal_axis == 2) {
    const double x = c1.dot(c1);
    if (x <= 0.0) {
      fail(ErrorKind::DegenerateSplit, "first column vanishes");
    }
    const double rx = std::sqrt(x);
    dir = c1 * (1.0 / rx);
    beta = c1.dot(c2) / rx;
    disc = (x * (1.0 + gamma2) - 1.0) / x;
  } else {
    const double y = c2.dot(c2);
    if (y <= 0.0) {
      fail(ErrorKind::DegenerateSplit, "second column vanishes");
    }
    const double ry = std::sqrt(y);
    dir = c2 * (1.0 / ry);
    beta = c1.dot(c2) / ry;
    disc = (y - 1.0) / y;
  }
  if (disc <= 0.0) {
    fail(ErrorKind::DegenerateSplit, "no real lamination step from this datum");
  }
  const double root = std::sqrt(disc);
  const double tau_plus = -beta + root;
  const double tau_minus = -beta - root;

  Split out;
  out.normal_axis = normal_axis;
  const double span = tau_plus - tau_minus;  // = 2 * root > 0
  out.mu = -tau_minus / span;
  out.amp = dir * span;
  if (normal_axis == 2) {
    out.plus = Mat2(g.a, g.b + tau_plus * dir.x, g.c, g.d + tau_plus * dir.y);
    out.minus = Mat2(g.a, g.b + tau_minus * dir.x, g.c, g.d + tau_minus * dir.y);
  } else {
    out.plus = Mat2(g.a + tau_plus * dir.x, g.b, g.c + tau_plus * dir.y, g.d);
    out.minus = Mat2(g.a + tau_minus * dir.x, g.b, g.c + tau_minus * dir.y, g.d);
  }
  return out;
}

Split lamination_split(const Mat2& g, int normal_axis, const Wells& wells) {
  if (normal_axis != 1 && normal_axis != 2) {
    fail(ErrorKind::InvalidParameter, "lamination normal must be axis 1 or 2");
  }
  if (!finite_entries(g) || std::abs(g.det() - 1.0) > kDetTol) {
    fail(ErrorKind::InvalidParameter,
         "lamination input must have unit determinant");
  }
  if (!is_interior(g, wells.gamma)) {
    const Mat2 cg = g.gram();
    const double gamma2 = wells.gamma * wells.gamma;
    if (cg.a <= 1.0 + kDetTol && cg.d <= 1.0 + gamma2 + kDetTol) {
      fail(ErrorKind::DegenerateSplit,
           "datum sits on the hull boundary; no strict decrease possible");
    }
    fail(ErrorKind::OutsideHull, "datum lies outside the attainable hull");
  }
  return split_along(g, normal_axis, wells);
}

}  // namespace marten
