#pragma once

#include <cstdint>
#include <vector>

#include "martensim/fragment.hpp"
#include "martensim/geometry.hpp"
#include "martensim/wells.hpp"

namespace marten {

// Horizontal blocks live on (0,1) x (0,delta), vertical ones on the transpose.
enum class Orientation { Horizontal, Vertical };

enum class LabelFamily { Horizontal, Vertical, Unresolved };

struct GradientLabel {
  LabelFamily family = LabelFamily::Unresolved;
  int variant = 0;  // sign of the off-diagonal metric entry for resolved wells
  int depth = 0;    // refinement generation the piece belongs to
};

struct Region {
  Shape shape;
  Mat2 matrix;
  GradientLabel label;
};

struct Microstructure {
  Rect domain;
  std::vector<Region> regions;
  int depth = 0;
};

// Finite-depth building block: a diamond packing of the domain where every
// packed diamond carries a two-level laminate refining toward its boundary,
// while the rectangle corners left by `depth+1` packing rings stay unresolved
// with the boundary datum. The area-weighted average gradient equals m.
Microstructure build_block(Orientation orient, const Mat2& m, const Wells& wells,
                           double delta, int depth);

struct BlockLibrary {
  Wells wells;
  Mat2 m;  // normalized boundary datum
  double delta = 0.4;
  int depth = 3;
  Microstructure horizontal;
  Microstructure vertical;

  const Microstructure& block(int long_axis) const {
    return long_axis == 1 ? horizontal : vertical;
  }
};

BlockLibrary make_block_library(const Mat2& m_raw, double gamma, double delta, int depth);

// Scales the block by lambda = perp_extent / block_perp and lays n_copies of it
// along the long axis of `target`, which must equal n * lambda * block_long
// within 1e-9. Labels and matrices are unchanged.
Microstructure instantiate_block(const Microstructure& block, const Rect& target,
                                 int n_copies);

// Orientation-preserving map of the block onto an arbitrary rectangle with
// independent axis scalings. Only suitable for drawing unscalable placements;
// never used in any quantitative path.
Microstructure stretch_block(const Microstructure& block, const Rect& target);

// Unrefined packing of the block domain down to diamonds of long axis
// >= min_scale; every region keeps the boundary datum. Used for scale counts.
Microstructure census_block(Orientation orient, const Mat2& m, double delta,
                            double min_scale);

// Whole-state picture for one simulation result: every recorded placement
// instantiated (stretched when not block-shaped) plus the surviving components
// as unresolved rectangles.
Microstructure assemble_state(const SimResult& result, const BlockLibrary& lib);

// Uniform-grid point location over a microstructure; ties go to the earliest
// region, misses return -1. The microstructure must outlive the index.
class RegionIndex {
 public:
  RegionIndex() = default;
  RegionIndex(const Microstructure& ms, int nx, int ny);
  int locate(const Vec2& p) const;

 private:
  const Microstructure* ms_ = nullptr;
  Rect bounds_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::int32_t>> cells_;
};

double unresolved_fraction(const Microstructure& ms);
Mat2 average_matrix(const Microstructure& ms);

}  // namespace marten
