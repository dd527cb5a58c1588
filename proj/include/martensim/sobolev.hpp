#pragma once

#include <cstdint>
#include <vector>

#include "martensim/blocks.hpp"

namespace marten {

// Norms of a piecewise-constant matrix field given by a region decomposition.
struct BvResult {
  double interface_total = 0.0;  // sum of |jump|_F * length over interfaces
  double l1 = 0.0;               // integral of |field|_F
  double linf = 0.0;             // essential sup of |field|_F
};

// Exact interface sweep. Every elementary boundary piece must be shared by
// exactly two regions on opposite sides, or lie on the domain boundary
// (contributing nothing); anything else raises a geometry error.
BvResult bv_norm(const Microstructure& ms);

// Same sweep for a field extended by the constant `ambient` outside the
// regions: single-owner pieces jump against the ambient matrix instead.
BvResult bv_norm_extended(const Microstructure& ms, const Mat2& ambient);

struct SobolevParams {
  double s = 0.5;
  double p = 1.0;
  double r_min = 1e-4;  // near-diagonal truncation radius
  std::uint64_t n_samples = 200000;
  std::uint64_t seed = 12345;

  double sp() const { return s * p; }
  void validate() const;
};

// Abstract matrix field on a rectangular domain.
class FieldEval {
 public:
  virtual ~FieldEval() = default;
  virtual Mat2 eval(const Vec2& p) const = 0;
  virtual Rect domain() const = 0;
};

// Piecewise-constant field: located region's matrix minus a reference,
// zero wherever no region claims the point.
class MicrostructureField : public FieldEval {
 public:
  MicrostructureField(const Microstructure& ms, const Mat2& reference);
  Mat2 eval(const Vec2& p) const override;
  Rect domain() const override { return ms_->domain; }

 private:
  const Microstructure* ms_;
  Mat2 ref_;
  RegionIndex index_;
};

struct GagliardoEstimate {
  double estimate = 0.0;   // truncated double integral (pair distance >= r_min)
  double std_error = 0.0;
  double cutoff_bound = 0.0;  // analytic bound on the discarded near-diagonal part
  double upper() const { return estimate + 3.0 * std_error + cutoff_bound; }
};

// Importance-sampled estimate of the fractional seminorm integral
// SS |v(x)-v(y)|^p / |x-y|^(2+sp) over domain pairs at distance >= r_min;
// `stats` supplies the total variation and sup norm for the cutoff bound.
GagliardoEstimate gagliardo_seminorm(const FieldEval& field, const BvResult& stats,
                                     const SobolevParams& prm);

// sup^(1-1/p) * (l1^(1-sp) * (l1+interface)^(sp))^(1/p): the constant-free
// interpolation expression combining sup, integrability and total variation.
double interpolation_bound(const BvResult& stats, double s, double p);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Deterministic oracle for the jump field J * [above the horizontal midline]
// on the unit square: polar-coordinate quadrature of the truncated seminorm
// at two resolutions with Richardson extrapolation.
QuadratureResult halfplane_seminorm_quadrature(double jump_norm, double s, double p,
                                               double r_min, int n_base);

// Whole-block norm aggregates of (field - reference), split into the pieces
// needed to assemble band norms analytically under scaling and stacking.
struct BlockAggregates {
  double area = 0.0;
  double l1 = 0.0;    // integral of |G - ref|
  double lp = 0.0;    // integral of |G - ref|^p
  double linf = 0.0;
  double interface_internal = 0.0;  // interior interfaces only
  double end_jump = 0.0;            // |G - ref| * length on the two long-axis ends
  double side_jump = 0.0;           // same on the two sides parallel to the long axis
  double stack_interface = 0.0;     // jump across the seam of two stacked copies
};

BlockAggregates block_aggregates(const Microstructure& block, const Mat2& reference,
                                 double p);

struct StepDifferenceRow {
  int k = 0;              // difference between states k and k+1
  double removed = 0.0;   // area covered by the step's placements
  double lp_term = 0.0;   // integral of |v_k|^p
  double l1 = 0.0;        // integral of |v_k|
  double linf = 0.0;
  double interface_total = 0.0;  // assembled analytically from block aggregates
  double gagliardo = 0.0;
  double std_error = 0.0;
  double cutoff_bound = 0.0;
  double norm_estimate = 0.0;  // (lp_term + gagliardo)^(1/p)
  double bound_rhs = 0.0;      // budget_c * 2^(k*sp) * (removed^(1-sp) + vol_k^(1-sp))
};

// One row per simulation step; every placement must be block-shaped.
std::vector<StepDifferenceRow> step_difference_series(const SimResult& result,
                                                      const BlockLibrary& lib,
                                                      const SobolevParams& prm,
                                                      double budget_c);

}  // namespace marten
