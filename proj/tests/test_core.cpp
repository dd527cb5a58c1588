#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "martensim/rng.hpp"
#include "martensim/wells.hpp"
#include "test_helpers.hpp"

using marten::ErrorKind;
using marten::Mat2;
using marten::Vec2;
using marten::Wells;

TEST_CASE("wells at the default shear") {
  const Wells w = marten::make_wells(0.5);
  CHECK(w.f0.a == 1.0);
  CHECK(w.f0.b == 0.5);
  CHECK(w.f0.c == 0.0);
  CHECK(w.f0.d == 1.0);
  CHECK(w.f0inv.b == -0.5);
  // The two variants differ by the rank-one matrix (2 gamma e1) (x) e2.
  const Mat2 diff = w.f0 - w.f0inv;
  CHECK(diff.a == 0.0);
  CHECK(diff.b == 1.0);
  CHECK(diff.c == 0.0);
  CHECK(diff.d == 0.0);
  CHECK(marten::frob_dist(w.f0, w.f0inv) == 1.0);

  CHECK(w.c_plus.a == 1.0);
  CHECK(w.c_plus.b == 0.5);
  CHECK(w.c_plus.c == 0.5);
  CHECK(w.c_plus.d == 1.25);
  CHECK(w.c_minus.b == -0.5);

  // f1 is a rotation of the inverse variant (distance zero to the wells) that
  // differs from f0 only in its first column (interface normal e1).
  CHECK(std::abs(w.f1.det() - 1.0) < 1e-12);
  CHECK(marten::well_distance(w.f1, w) < 1e-12);
  CHECK(marten::well_variant(w.f1, w, 1e-9) == -1);
  const Mat2 twin = w.f0 - w.f1;
  CHECK(std::abs(twin.b) < 1e-12);
  CHECK(std::abs(twin.d) < 1e-12);
  CHECK(std::abs(twin.a) + std::abs(twin.c) > 0.1);
}

TEST_CASE("renormalized boundary datum") {
  const Wells w = marten::make_wells(0.5);
  const Mat2 m = marten::make_boundary_data(Mat2(0.939, 0.0, 0.0, 1.064), w);
  CHECK(std::abs(m.det() - 1.0) < 1e-12);
  CHECK(m.a == 0.939);
  CHECK(m.b == 0.0);
  CHECK(m.c == 0.0);
  const Mat2 cg = m.gram();
  CHECK(cg.a == doctest::Approx(0.881721).epsilon(1e-12));
  CHECK(cg.d == doctest::Approx(1.1341456).epsilon(1e-6));
  CHECK(marten::is_interior(m, 0.5));

  // Renormalizing an already normalized matrix keeps it bit for bit.
  const Mat2 again = marten::renormalize_det(m);
  CHECK(again.a == m.a);
  CHECK(again.b == m.b);
  CHECK(again.c == m.c);
  CHECK(again.d == m.d);
}

TEST_CASE("hull membership failures") {
  const Wells w = marten::make_wells(0.5);
  CHECK(error_kind_of([&] { marten::make_boundary_data(Mat2::identity(), w); }) ==
        ErrorKind::OutsideHull);
  CHECK(error_kind_of([&] { marten::make_boundary_data(Mat2(2.0, 0.0, 0.0, 0.5), w); }) ==
        ErrorKind::OutsideHull);
  // Identity sits on the closure boundary: no strict lamination step exists.
  CHECK(error_kind_of([&] { marten::lamination_split(Mat2::identity(), 2, w); }) ==
        ErrorKind::DegenerateSplit);
  CHECK(error_kind_of([&] { marten::lamination_split(Mat2(1.0, 0.0, 0.0, 2.0), 1, w); }) ==
        ErrorKind::InvalidParameter);
  CHECK(error_kind_of([&] { marten::lamination_split(Mat2(2.0, 0.0, 0.0, 0.5), 1, w); }) ==
        ErrorKind::OutsideHull);
  CHECK(error_kind_of([&] { marten::lamination_split(Mat2(0.95, 0.0, 0.0, 1.0 / 0.95), 3, w); }) ==
        ErrorKind::InvalidParameter);
}

namespace {

marten::Mat2 random_interior(std::uint64_t i) {
  const double u1 = marten::keyed_uniform(99, i, 0, 0);
  const double u2 = marten::keyed_uniform(99, i, 1, 0);
  const double u3 = marten::keyed_uniform(99, i, 2, 0);
  const double a = 0.935 + 0.06 * u1;
  const double b = -0.25 + 0.5 * u2;
  const double theta = -0.6 + 1.2 * u3;
  const Mat2 shear(a, b, 0.0, 1.0 / a);
  const Mat2 rot(std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta));
  return rot * shear;
}

}  // namespace

TEST_CASE("random interior laminations") {
  const Wells w = marten::make_wells(0.5);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Mat2 g = random_interior(i);
    REQUIRE(marten::is_interior(g, 0.5));
    const double base_dist = marten::well_distance(g, w);

    for (int axis : {1, 2}) {
      const marten::Split s = marten::lamination_split(g, axis, w);
      CHECK(s.mu > 0.0);
      CHECK(s.mu < 1.0);

      // Convex combination recovers the parent.
      const Mat2 comb = s.plus * s.mu + s.minus * (1.0 - s.mu);
      CHECK(marten::frob_dist(comb, g) < 1e-12);

      // The two children differ by amp (x) e_axis.
      const Vec2 n = axis == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
      const Mat2 rank_one = marten::outer(s.amp, n);
      CHECK(marten::frob_dist(s.plus - s.minus, rank_one) < 1e-9);
      CHECK(std::abs((s.plus - s.minus).det()) < 1e-9);

      // Determinant is preserved and both children sit strictly closer to
      // the wells than the parent.
      CHECK(std::abs(s.plus.det() - 1.0) < 1e-9);
      CHECK(std::abs(s.minus.det() - 1.0) < 1e-9);
      CHECK(marten::well_distance(s.plus, w) < base_dist);
      CHECK(marten::well_distance(s.minus, w) < base_dist);
    }

    // Two-level cascade: either axis order ends exactly on the wells.
    for (int first : {1, 2}) {
      const int second = 3 - first;
      const marten::Split s1 = marten::lamination_split(g, first, w);
      for (const Mat2& child : {s1.plus, s1.minus}) {
        const marten::Split s2 = marten::split_along(child, second, w);
        CHECK(marten::well_distance(s2.plus, w) < 1e-9);
        CHECK(marten::well_distance(s2.minus, w) < 1e-9);
        CHECK(marten::well_variant(s2.plus, w, 1e-6) != 0);
        CHECK(marten::well_variant(s2.minus, w, 1e-6) != 0);
      }
    }
  }
}

TEST_CASE("keyed randomness") {
  CHECK(marten::keyed_uniform(1, 2, 3, 4) == marten::keyed_uniform(1, 2, 3, 4));
  CHECK(marten::keyed_uniform(1, 2, 3, 4) != marten::keyed_uniform(1, 2, 3, 5));
  CHECK(marten::keyed_uniform(1, 2, 3, 4) != marten::keyed_uniform(2, 2, 3, 4));
  CHECK(marten::to_unit_interval(0) > 0.0);
  CHECK(marten::to_unit_interval(~0ull) < 1.0);
  double mean = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = marten::keyed_uniform(7, i, 0, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= 10000.0;
  CHECK(std::abs(mean - 0.5) < 0.01);
}
