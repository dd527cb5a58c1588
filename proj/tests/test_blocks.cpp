#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "martensim/blocks.hpp"
#include "martensim/rng.hpp"
#include "test_helpers.hpp"

using marten::BlockLibrary;
using marten::ErrorKind;
using marten::LabelFamily;
using marten::Mat2;
using marten::Microstructure;
using marten::Orientation;
using marten::Rect;
using marten::Region;
using marten::Vec2;
using marten::Wells;

namespace {

const Mat2 kRawDatum(0.939, 0.0, 0.0, 1.064);

double total_area(const Microstructure& ms) {
  double a = 0.0;
  for (const Region& r : ms.regions) a += r.shape.area();
  return a;
}

}  // namespace

TEST_CASE("depth zero block is a single unresolved region") {
  const Wells w = marten::make_wells(0.5);
  const Microstructure ms = marten::build_block(Orientation::Horizontal, kRawDatum, w, 0.4, 0);
  CHECK(ms.domain.l1 == 1.0);
  CHECK(ms.domain.l2 == 0.4);
  REQUIRE(ms.regions.size() == 1);
  CHECK(ms.regions[0].label.family == LabelFamily::Unresolved);
  const Mat2 datum = marten::make_boundary_data(kRawDatum, w);
  CHECK(marten::frob_dist(ms.regions[0].matrix, datum) == 0.0);
}

TEST_CASE("finite-depth block structure") {
  const BlockLibrary lib = marten::make_block_library(kRawDatum, 0.5, 0.4, 3);
  CHECK(lib.horizontal.domain.l1 == 1.0);
  CHECK(lib.horizontal.domain.l2 == 0.4);
  CHECK(lib.vertical.domain.l1 == 0.4);
  CHECK(lib.vertical.domain.l2 == 1.0);
  CHECK(&lib.block(1) == &lib.horizontal);
  CHECK(&lib.block(2) == &lib.vertical);

  for (const Microstructure* ms : {&lib.horizontal, &lib.vertical}) {
    CHECK(ms->regions.size() > 1000);
    CHECK(total_area(*ms) == doctest::Approx(ms->domain.area()).epsilon(1e-9));

    // The area-weighted average gradient is exactly the boundary datum and
    // the four unresolved corners hold 2^-(depth+2) of the area.
    const Mat2 avg = marten::average_matrix(*ms);
    CHECK(marten::frob_dist(avg, lib.m) < 1e-9);
    CHECK(marten::unresolved_fraction(*ms) ==
          doctest::Approx(std::ldexp(1.0, -5)).epsilon(1e-12));

    const LabelFamily resolved_family = ms == &lib.horizontal
                                            ? LabelFamily::Horizontal
                                            : LabelFamily::Vertical;
    for (const Region& r : ms->regions) {
      if (r.label.family == LabelFamily::Unresolved) {
        // Unresolved pieces carry the datum and sit past the last ring.
        CHECK(marten::frob_dist(r.matrix, lib.m) == 0.0);
        CHECK(r.label.depth == 5);
      } else {
        CHECK(r.label.family == resolved_family);
        CHECK(marten::well_distance(r.matrix, lib.wells) < 1e-9);
        CHECK(marten::well_variant(r.matrix, lib.wells, 1e-6) == r.label.variant);
        CHECK(r.label.depth >= 0);
      }
    }
  }
}

TEST_CASE("region index locates points") {
  const BlockLibrary lib = marten::make_block_library(kRawDatum, 0.5, 0.4, 2);
  const Microstructure& ms = lib.horizontal;
  const marten::RegionIndex index(ms, 64, 26);
  for (std::uint64_t i = 0; i < 500; ++i) {
    const Vec2 p(marten::keyed_uniform(17, i, 0, 0),
                 0.4 * marten::keyed_uniform(17, i, 1, 0));
    const int idx = index.locate(p);
    REQUIRE(idx >= 0);
    CHECK(ms.regions[static_cast<std::size_t>(idx)].shape.contains(p, 1e-9));
  }
  CHECK(index.locate(Vec2(2.0, 0.2)) == -1);
  CHECK(index.locate(Vec2(0.5, -0.3)) == -1);
}

TEST_CASE("block instantiation scales and stacks") {
  const BlockLibrary lib = marten::make_block_library(kRawDatum, 0.5, 0.4, 2);
  const Microstructure& block = lib.horizontal;

  // One copy at half scale.
  const Rect one(0.1, 0.3, 0.5, 0.2);
  const Microstructure inst = marten::instantiate_block(block, one, 1);
  CHECK(inst.regions.size() == block.regions.size());
  CHECK(total_area(inst) == doctest::Approx(one.area()).epsilon(1e-9));
  CHECK(marten::frob_dist(marten::average_matrix(inst), lib.m) < 1e-9);
  for (const Region& r : inst.regions) {
    CHECK(one.contains_rect(r.shape.bbox(), 1e-9));
  }

  // Three copies along the long axis.
  const Rect three(0.0, 0.0, 1.5, 0.2);
  const Microstructure stack = marten::instantiate_block(block, three, 3);
  CHECK(stack.regions.size() == 3 * block.regions.size());
  CHECK(total_area(stack) == doctest::Approx(three.area()).epsilon(1e-9));

  // Extent mismatch is rejected.
  CHECK(error_kind_of([&] {
          marten::instantiate_block(block, Rect(0.1, 0.3, 0.6, 0.2), 1);
        }) == ErrorKind::InvalidPlacement);
  CHECK(error_kind_of([&] { marten::instantiate_block(block, one, 0); }) ==
        ErrorKind::InvalidPlacement);

  // Free-form stretching keeps the area and the labels.
  const Rect odd(0.2, 0.2, 0.3, 0.45);
  const Microstructure stretched = marten::stretch_block(block, odd);
  CHECK(stretched.regions.size() == block.regions.size());
  CHECK(total_area(stretched) == doctest::Approx(odd.area()).epsilon(1e-9));
}

TEST_CASE("scale census") {
  const Wells w = marten::make_wells(0.5);
  const Mat2 datum = marten::make_boundary_data(kRawDatum, w);
  const Microstructure census =
      marten::census_block(Orientation::Horizontal, datum, 0.4, 0.05);
  // Rings 1..3 have long axes 0.25, 0.125, 0.0625 >= 0.05; ring 4 would drop
  // to 0.03125 and is excluded.
  CHECK(census.depth == 3);
  std::size_t diamonds = 0;
  double min_axis = 1e9;
  for (const Region& r : census.regions) {
    CHECK(r.label.family == LabelFamily::Unresolved);
    CHECK(marten::frob_dist(r.matrix, datum) == 0.0);
    if (r.shape.type == marten::ShapeType::Diamond) {
      ++diamonds;
      min_axis = std::min(min_axis, r.shape.diamond.long_axis());
    }
  }
  CHECK(diamonds == 57);
  CHECK(min_axis == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(total_area(census) == doctest::Approx(census.domain.area()).epsilon(1e-12));
}

TEST_CASE("assembled state tiles the square") {
  marten::SimConfig cfg;
  cfg.seed = 1;
  cfg.stop.max_steps = 2;
  cfg.block_depth = 1;
  const marten::SimResult result = marten::run_simulation(cfg);
  const BlockLibrary lib = marten::make_block_library(cfg.m, cfg.gamma, cfg.delta, 1);
  const Microstructure state = marten::assemble_state(result, lib);
  CHECK(total_area(state) == doctest::Approx(1.0).epsilon(1e-9));
  const Rect unit(0.0, 0.0, 1.0, 1.0);
  for (const Region& r : state.regions) {
    CHECK(unit.contains_rect(r.shape.bbox(), 1e-9));
  }
}
