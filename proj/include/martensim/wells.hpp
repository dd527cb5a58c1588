#pragma once

#include "martensim/errors.hpp"
#include "martensim/mat2.hpp"

namespace marten {

// Energy wells of the incompressible two-variant shear problem: the two
// variants are the simple shear F0 = [[1,g],[0,1]] and its inverse, both with
// unit determinant. F1 is the rotation of F0inv that is rank-one connected to
// F0 across a vertical interface (normal e1).
struct Wells {
  double gamma = 0.5;
  Mat2 f0;
  Mat2 f0inv;
  Mat2 f1;
  Mat2 c_plus;   // f0^T f0
  Mat2 c_minus;  // f0inv^T f0inv
};

// Determinant tolerance shared by every det=1 invariant in the library.
inline constexpr double kDetTol = 1e-9;
// Renormalization no-op guard: matrices this close to det=1 are kept bit-for-bit.
inline constexpr double kRenormSkipTol = 1e-12;

Wells make_wells(double gamma);

// Scales the second row of a candidate boundary datum so that the determinant
// becomes one, then verifies interior membership. Idempotent on already
// normalized inputs.
Mat2 make_boundary_data(const Mat2& raw, const Wells& wells);

// Renormalization step alone (no membership requirement).
Mat2 renormalize_det(const Mat2& raw);

// Metric interior test: with C = M^T M and det M = 1, the matrix lies in the
// interior of the attainable hull iff C11 < 1 and C22 < 1 + gamma^2 (strictly).
bool is_interior(const Mat2& m, double gamma);

// Frobenius distance from C = M^T M to the nearer well's Cauchy-Green tensor.
double well_distance(const Mat2& m, const Wells& wells);

// +1 / -1 when C = M^T M is within tol of a well tensor (sign of C12), else 0.
int well_variant(const Mat2& m, const Wells& wells, double tol);

// One lamination step: g written as a convex combination of two matrices that
// differ by the rank-one matrix amp (x) e_n.
struct Split {
  Mat2 plus;            // child reached with the positive root
  Mat2 minus;           // child reached with the negative root
  double mu = 0.0;      // g = mu * plus + (1 - mu) * minus, mu in (0,1)
  Vec2 amp;             // plus - minus = amp (x) n
  int normal_axis = 2;  // 1 => n = e1, 2 => n = e2
};

// Requires a strictly interior datum. The children land on the hull boundary:
// normal e2 drives C22 to 1 + gamma^2, normal e1 drives C11 to 1.
Split lamination_split(const Mat2& g, int normal_axis, const Wells& wells);

// Same closed-form solver without the interior precondition; finishing step
// for matrices already sitting on a boundary curve (their children are wells).
Split split_along(const Mat2& g, int normal_axis, const Wells& wells);

}  // namespace marten
