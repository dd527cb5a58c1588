#include "martensim/blocks.hpp"

#include <algorithm>
#include <cmath>

namespace marten {

namespace {

using Poly = std::vector<Vec2>;

double coord(const Vec2& p, int axis) { return axis == 1 ? p.x : p.y; }

Vec2 axis_vec(int axis, double v) { return axis == 1 ? Vec2(v, 0.0) : Vec2(0.0, v); }

double poly_area(const Poly& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    s += a.cross(b);
  }
  return 0.5 * s;
}

Poly clip_half(const Poly& p, int axis, double c, bool keep_below) {
  Poly out;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = p[i];
    const Vec2& nxt = p[(i + 1) % n];
    const double cc = coord(cur, axis);
    const double cn = coord(nxt, axis);
    const bool in_cur = keep_below ? cc <= c : cc >= c;
    const bool in_nxt = keep_below ? cn <= c : cn >= c;
    if (in_cur) {
      out.push_back(cur);
    }
    if (in_cur != in_nxt) {
      const double t = (c - cc) / (cn - cc);
      out.push_back(Vec2(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)));
    }
  }
  return out;
}

// Cross-section length of a convex polygon at axis-coordinate c.
double chord_width(const Poly& p, int axis, double c) {
  const int other = 3 - axis;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    const double ca = coord(a, axis);
    const double cb = coord(b, axis);
    auto push = [&](double v) {
      if (!any) {
        lo = hi = v;
        any = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    };
    if (ca == c) push(coord(a, other));
    if ((ca - c) * (cb - c) < 0.0) {
      const double t = (c - ca) / (cb - ca);
      push(coord(a, other) + t * (coord(b, other) - coord(a, other)));
    }
  }
  return any ? hi - lo : 0.0;
}

// Coordinate along `axis` splitting the convex polygon into a below-piece of
// the given area fraction. Piecewise-quadratic area profile solved exactly.
double cut_coordinate(const Poly& p, int axis, double frac) {
  std::vector<double> cs;
  cs.reserve(p.size());
  for (const Vec2& v : p) cs.push_back(coord(v, axis));
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  if (cs.size() < 2) {
    return cs.empty() ? 0.0 : cs.front();
  }
  double total = 0.0;
  std::vector<double> widths(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) widths[i] = chord_width(p, axis, cs[i]);
  for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
    total += 0.5 * (widths[i] + widths[i + 1]) * (cs[i + 1] - cs[i]);
  }
  double target = frac * total;
  for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
    const double dc = cs[i + 1] - cs[i];
    const double seg = 0.5 * (widths[i] + widths[i + 1]) * dc;
    if (target > seg) {
      target -= seg;
      continue;
    }
    if (seg <= 0.0 || dc <= 0.0) continue;
    const double w0 = widths[i];
    const double slope = (widths[i + 1] - w0) / dc;
    double t;
    if (std::abs(slope) * dc < 1e-12 * std::max(w0, 1e-300)) {
      t = w0 > 0.0 ? target / w0 : 0.0;
    } else {
      const double disc = w0 * w0 + 2.0 * slope * target;
      t = (-w0 + std::sqrt(std::max(disc, 0.0))) / slope;
    }
    return cs[i] + std::min(std::max(t, 0.0), dc);
  }
  return cs.back();
}

struct CascadeCtx {
  int stack_axis = 2;  // normal of the coarse laminate layers
  int cut_axis = 1;
  LabelFamily family = LabelFamily::Horizontal;
  Split s1;
  Split s2_plus;
  Split s2_minus;
  int var_pp = 0, var_pm = 0, var_mp = 0, var_mm = 0;
  std::vector<Region>* out = nullptr;
};

Rect rect_from_ranges(int cut_axis, double clo, double chi, double slo, double shi) {
  if (cut_axis == 1) return Rect(clo, slo, chi - clo, shi - slo);
  return Rect(slo, clo, shi - slo, chi - clo);
}

void emit_rect(CascadeCtx& ctx, const Rect& r, const Mat2& g, int variant, int depth) {
  if (!(r.l1 > 0.0) || !(r.l2 > 0.0)) return;
  Region reg;
  reg.shape = Shape::of(r);
  reg.matrix = g;
  reg.label = {ctx.family, variant, depth};
  ctx.out->push_back(reg);
}

void fan_emit(CascadeCtx& ctx, const Poly& poly, const Mat2& g, int variant, int depth) {
  Poly q;
  double span = 0.0;
  for (const Vec2& v : poly) {
    span = std::max({span, std::abs(v.x), std::abs(v.y)});
  }
  const double eps = 1e-14 * std::max(span, 1e-12);
  for (const Vec2& v : poly) {
    if (q.empty() || (v - q.back()).norm() > eps) q.push_back(v);
  }
  while (q.size() > 2 && (q.front() - q.back()).norm() <= eps) q.pop_back();
  if (q.size() < 3) return;
  if (poly_area(q) < 0.0) std::reverse(q.begin(), q.end());
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    Triangle t(q[0], q[i], q[i + 1]);
    if (t.area() <= 0.0) continue;
    Region reg;
    reg.shape = Shape::of(t);
    reg.matrix = g;
    reg.label = {ctx.family, variant, depth};
    ctx.out->push_back(reg);
  }
}

// One laminate cell: coarse layers along the stack axis in exact fractions
// (mu, 1-mu), each refined along the cut axis into the two wells.
void emit_pair(CascadeCtx& ctx, double clo, double chi, double slo, double shi,
               const Split& s2, int var_lo, int var_hi) {
  const double c_mid = clo + s2.mu * (chi - clo);
  // depth recorded by caller through emit depth parameter; reuse var fields
  emit_rect(ctx, rect_from_ranges(ctx.cut_axis, clo, c_mid, slo, shi), s2.plus, var_lo, 0);
  emit_rect(ctx, rect_from_ranges(ctx.cut_axis, c_mid, chi, slo, shi), s2.minus, var_hi, 0);
}

void emit_laminate_cell(CascadeCtx& ctx, double clo, double chi, double slo, double shi,
                        int depth) {
  const double s_mid = slo + ctx.s1.mu * (shi - slo);
  const std::size_t first = ctx.out->size();
  emit_pair(ctx, clo, chi, slo, s_mid, ctx.s2_plus, ctx.var_pp, ctx.var_pm);
  emit_pair(ctx, clo, chi, s_mid, shi, ctx.s2_minus, ctx.var_mp, ctx.var_mm);
  for (std::size_t i = first; i < ctx.out->size(); ++i) {
    (*ctx.out)[i].label.depth = depth;
  }
}

void direct_laminate(CascadeCtx& ctx, const Poly& poly, int depth) {
  if (std::abs(poly_area(poly)) <= 0.0) return;
  const double s_mid = cut_coordinate(poly, ctx.stack_axis, ctx.s1.mu);
  const Poly lower = clip_half(poly, ctx.stack_axis, s_mid, true);
  const Poly upper = clip_half(poly, ctx.stack_axis, s_mid, false);
  const struct {
    const Poly* part;
    const Split* s2;
    int var_lo, var_hi;
  } layers[2] = {{&lower, &ctx.s2_plus, ctx.var_pp, ctx.var_pm},
                 {&upper, &ctx.s2_minus, ctx.var_mp, ctx.var_mm}};
  for (const auto& layer : layers) {
    if (layer.part->size() < 3) continue;
    const double c_mid = cut_coordinate(*layer.part, ctx.cut_axis, layer.s2->mu);
    fan_emit(ctx, clip_half(*layer.part, ctx.cut_axis, c_mid, true), layer.s2->plus,
             layer.var_lo, depth);
    fan_emit(ctx, clip_half(*layer.part, ctx.cut_axis, c_mid, false), layer.s2->minus,
             layer.var_hi, depth);
  }
}

struct Notch {
  Vec2 bm;  // base midpoint
  Vec2 hb;  // half-base vector (axis-aligned)
  Vec2 ao;  // apex offset, perpendicular to the base
};

void cascade_diamond(CascadeCtx& ctx, const Vec2& c, double semi_cut, double semi_st,
                     int g, int depth);

void cascade_notch(CascadeCtx& ctx, const Notch& n, int g, int depth) {
  if (g >= 2) {
    const Vec2 child_center = n.bm + n.ao * 0.5;
    const double hb_len = std::max(std::abs(n.hb.x), std::abs(n.hb.y));
    const double ao_len = std::max(std::abs(n.ao.x), std::abs(n.ao.y));
    const bool hb_along_stack = (ctx.stack_axis == 1) ? n.hb.x != 0.0 : n.hb.y != 0.0;
    const double semi_st = 0.5 * (hb_along_stack ? hb_len : ao_len);
    const double semi_cut = 0.5 * (hb_along_stack ? ao_len : hb_len);
    cascade_diamond(ctx, child_center, semi_cut, semi_st, g - 1, depth + 1);
    cascade_notch(ctx, {n.bm - n.hb * 0.5, n.hb * 0.5, n.ao * 0.5}, g - 1, depth + 1);
    cascade_notch(ctx, {n.bm + n.hb * 0.5, n.hb * 0.5, n.ao * 0.5}, g - 1, depth + 1);
    return;
  }
  direct_laminate(ctx, {n.bm - n.hb, n.bm + n.hb, n.bm + n.ao}, depth);
}

// Fully resolves one packed diamond: a striped midpoint rectangle whose layer
// thickness halves toward the tips, plus four recursively refined tip notches.
void cascade_diamond(CascadeCtx& ctx, const Vec2& c, double semi_cut, double semi_st,
                     int g, int depth) {
  const double cst = coord(c, ctx.stack_axis);
  const double ccut = coord(c, ctx.cut_axis);
  const double clo = ccut - 0.5 * semi_cut;
  const double chi = ccut + 0.5 * semi_cut;
  const double half = 0.5 * semi_st;
  if (g <= 1) {
    emit_laminate_cell(ctx, clo, chi, cst - half, cst + half, depth);
  } else {
    std::vector<double> bnd;
    bnd.push_back(cst - half);
    for (int i = g - 1; i >= 1; --i) {
      bnd.push_back(cst - (1.0 - std::ldexp(1.0, -i)) * half);
    }
    for (int i = 1; i <= g - 1; ++i) {
      bnd.push_back(cst + (1.0 - std::ldexp(1.0, -i)) * half);
    }
    bnd.push_back(cst + half);
    for (std::size_t j = 0; j + 1 < bnd.size(); ++j) {
      emit_laminate_cell(ctx, clo, chi, bnd[j], bnd[j + 1], depth);
    }
  }
  cascade_notch(ctx,
                {c + axis_vec(ctx.cut_axis, -0.5 * semi_cut), axis_vec(ctx.stack_axis, 0.5 * semi_st),
                 axis_vec(ctx.cut_axis, -0.5 * semi_cut)},
                g, depth);
  cascade_notch(ctx,
                {c + axis_vec(ctx.cut_axis, 0.5 * semi_cut), axis_vec(ctx.stack_axis, 0.5 * semi_st),
                 axis_vec(ctx.cut_axis, 0.5 * semi_cut)},
                g, depth);
  cascade_notch(ctx,
                {c + axis_vec(ctx.stack_axis, -0.5 * semi_st), axis_vec(ctx.cut_axis, 0.5 * semi_cut),
                 axis_vec(ctx.stack_axis, -0.5 * semi_st)},
                g, depth);
  cascade_notch(ctx,
                {c + axis_vec(ctx.stack_axis, 0.5 * semi_st), axis_vec(ctx.cut_axis, 0.5 * semi_cut),
                 axis_vec(ctx.stack_axis, 0.5 * semi_st)},
                g, depth);
}

Rect block_domain(Orientation orient, double delta) {
  return orient == Orientation::Horizontal ? Rect(0.0, 0.0, 1.0, delta)
                                           : Rect(0.0, 0.0, delta, 1.0);
}

}  // namespace

Microstructure build_block(Orientation orient, const Mat2& m, const Wells& wells,
                           double delta, int depth) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    fail(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  }
  if (depth < 0 || depth > 12) {
    fail(ErrorKind::InvalidParameter, "block depth out of range [0, 12]");
  }
  const Mat2 datum = make_boundary_data(m, wells);

  Microstructure ms;
  ms.depth = depth;
  ms.domain = block_domain(orient, delta);

  if (depth == 0) {
    Region reg;
    reg.shape = Shape::of(ms.domain);
    reg.matrix = datum;
    reg.label = {LabelFamily::Unresolved, 0, 0};
    ms.regions.push_back(reg);
    return ms;
  }

  CascadeCtx ctx;
  ctx.stack_axis = orient == Orientation::Horizontal ? 2 : 1;
  ctx.cut_axis = 3 - ctx.stack_axis;
  ctx.family = orient == Orientation::Horizontal ? LabelFamily::Horizontal
                                                 : LabelFamily::Vertical;
  ctx.s1 = lamination_split(datum, ctx.stack_axis, wells);
  ctx.s2_plus = split_along(ctx.s1.plus, ctx.cut_axis, wells);
  ctx.s2_minus = split_along(ctx.s1.minus, ctx.cut_axis, wells);
  ctx.var_pp = well_variant(ctx.s2_plus.plus, wells, 1e-6);
  ctx.var_pm = well_variant(ctx.s2_plus.minus, wells, 1e-6);
  ctx.var_mp = well_variant(ctx.s2_minus.plus, wells, 1e-6);
  ctx.var_mm = well_variant(ctx.s2_minus.minus, wells, 1e-6);
  if (ctx.var_pp == 0 || ctx.var_pm == 0 || ctx.var_mp == 0 || ctx.var_mm == 0) {
    fail(ErrorKind::GeometryError, "two-level refinement did not reach the wells");
  }
  ctx.out = &ms.regions;

  const DiamondPacking pack = dyadic_diamond_packing(ms.domain, depth + 1);
  for (const Diamond& d : pack.diamonds) {
    const int g = std::max(1, depth - d.scale_index);
    const double semi_cut = 0.5 * (ctx.cut_axis == 1 ? d.d1 : d.d2);
    const double semi_st = 0.5 * (ctx.cut_axis == 1 ? d.d2 : d.d1);
    cascade_diamond(ctx, d.center, semi_cut, semi_st, g, d.scale_index);
  }
  for (std::size_t i = 0; i < pack.frontier.size(); ++i) {
    Region reg;
    reg.shape = Shape::of(pack.frontier[i]);
    reg.matrix = datum;
    reg.label = {LabelFamily::Unresolved, 0, pack.frontier_depth[i]};
    ms.regions.push_back(reg);
  }
  return ms;
}

BlockLibrary make_block_library(const Mat2& m_raw, double gamma, double delta, int depth) {
  BlockLibrary lib;
  lib.wells = make_wells(gamma);
  lib.m = make_boundary_data(m_raw, lib.wells);
  lib.delta = delta;
  lib.depth = depth;
  lib.horizontal = build_block(Orientation::Horizontal, lib.m, lib.wells, delta, depth);
  lib.vertical = build_block(Orientation::Vertical, lib.m, lib.wells, delta, depth);
  return lib;
}

Microstructure instantiate_block(const Microstructure& block, const Rect& target,
                                 int n_copies) {
  if (n_copies < 1) {
    fail(ErrorKind::InvalidPlacement, "copy count must be at least 1");
  }
  const int la = block.domain.l1 >= block.domain.l2 ? 1 : 2;
  const int perp = 3 - la;
  const double lambda = target.side(perp) / block.domain.side(perp);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidPlacement, "target thickness must be positive");
  }
  const double want_long = n_copies * lambda * block.domain.side(la);
  if (std::abs(target.side(la) - want_long) > 1e-9) {
    fail(ErrorKind::InvalidPlacement,
         "target extent does not match the scaled copy stack");
  }

  Microstructure out;
  out.domain = target;
  out.depth = block.depth;
  out.regions.reserve(block.regions.size() * static_cast<std::size_t>(n_copies));
  const double step = lambda * block.domain.side(la);
  for (int j = 0; j < n_copies; ++j) {
    const double ox = target.x0 + (la == 1 ? j * step : 0.0) - lambda * block.domain.x0;
    const double oy = target.y0 + (la == 2 ? j * step : 0.0) - lambda * block.domain.y0;
    auto map_pt = [&](const Vec2& p) { return Vec2(ox + lambda * p.x, oy + lambda * p.y); };
    for (const Region& r : block.regions) {
      Region reg = r;
      switch (r.shape.type) {
        case ShapeType::Rect: {
          const Rect& s = r.shape.rect;
          reg.shape = Shape::of(
              Rect(ox + lambda * s.x0, oy + lambda * s.y0, lambda * s.l1, lambda * s.l2));
          break;
        }
        case ShapeType::Diamond: {
          Diamond d = r.shape.diamond;
          d.center = map_pt(d.center);
          d.d1 *= lambda;
          d.d2 *= lambda;
          reg.shape = Shape::of(d);
          break;
        }
        case ShapeType::Triangle: {
          const Triangle& t = r.shape.tri;
          reg.shape = Shape::of(Triangle(map_pt(t.a), map_pt(t.b), map_pt(t.c)));
          break;
        }
      }
      out.regions.push_back(reg);
    }
  }
  return out;
}

Microstructure stretch_block(const Microstructure& block, const Rect& target) {
  if (!(target.l1 > 0.0) || !(target.l2 > 0.0)) {
    fail(ErrorKind::InvalidPlacement, "target must have positive sides");
  }
  const double lx = target.l1 / block.domain.l1;
  const double ly = target.l2 / block.domain.l2;
  auto map_pt = [&](const Vec2& p) {
    return Vec2(target.x0 + lx * (p.x - block.domain.x0),
                target.y0 + ly * (p.y - block.domain.y0));
  };
  Microstructure out;
  out.domain = target;
  out.depth = block.depth;
  out.regions.reserve(block.regions.size());
  for (const Region& r : block.regions) {
    Region reg = r;
    switch (r.shape.type) {
      case ShapeType::Rect: {
        const Rect& s = r.shape.rect;
        reg.shape = Shape::of(Rect(target.x0 + lx * (s.x0 - block.domain.x0),
                                   target.y0 + ly * (s.y0 - block.domain.y0), lx * s.l1,
                                   ly * s.l2));
        break;
      }
      case ShapeType::Diamond: {
        Diamond d = r.shape.diamond;
        d.center = map_pt(d.center);
        d.d1 *= lx;
        d.d2 *= ly;
        reg.shape = Shape::of(d);
        break;
      }
      case ShapeType::Triangle: {
        const Triangle& t = r.shape.tri;
        reg.shape = Shape::of(Triangle(map_pt(t.a), map_pt(t.b), map_pt(t.c)));
        break;
      }
    }
    out.regions.push_back(reg);
  }
  return out;
}

Microstructure census_block(Orientation orient, const Mat2& m, double delta,
                            double min_scale) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    fail(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  }
  Microstructure ms;
  ms.domain = block_domain(orient, delta);
  const DiamondPacking pack = dyadic_diamond_packing_to_scale(ms.domain, min_scale);
  ms.depth = pack.rings;
  ms.regions.reserve(pack.diamonds.size() + pack.frontier.size());
  for (const Diamond& d : pack.diamonds) {
    Region reg;
    reg.shape = Shape::of(d);
    reg.matrix = m;
    reg.label = {LabelFamily::Unresolved, 0, d.scale_index};
    ms.regions.push_back(reg);
  }
  for (std::size_t i = 0; i < pack.frontier.size(); ++i) {
    Region reg;
    reg.shape = Shape::of(pack.frontier[i]);
    reg.matrix = m;
    reg.label = {LabelFamily::Unresolved, 0, pack.frontier_depth[i]};
    ms.regions.push_back(reg);
  }
  return ms;
}

Microstructure assemble_state(const SimResult& result, const BlockLibrary& lib) {
  Microstructure out;
  out.domain = Rect(0.0, 0.0, 1.0, 1.0);
  out.depth = lib.depth;
  for (const SimEvent& ev : result.events) {
    const Placement& pl = ev.placement;
    const Microstructure& block = lib.block(pl.long_axis);
    Microstructure piece;
    if (pl.whole_component) {
      piece = stretch_block(block, pl.band);
    } else {
      piece = instantiate_block(block, pl.band, pl.n_copies);
    }
    out.regions.insert(out.regions.end(), piece.regions.begin(), piece.regions.end());
  }
  for (const Rect& comp : result.final_components) {
    Region reg;
    reg.shape = Shape::of(comp);
    reg.matrix = lib.m;
    reg.label = {LabelFamily::Unresolved, 0, 0};
    out.regions.push_back(reg);
  }
  return out;
}

RegionIndex::RegionIndex(const Microstructure& ms, int nx, int ny)
    : ms_(&ms), bounds_(ms.domain), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) {
    fail(ErrorKind::InvalidParameter, "grid resolution must be positive");
  }
  cells_.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  const double pad = 1e-12 * std::max(bounds_.l1, bounds_.l2);
  for (std::size_t i = 0; i < ms.regions.size(); ++i) {
    const Rect bb = ms.regions[i].shape.bbox();
    auto cell_lo = [&](double v, double lo, double len, int n) {
      const int c = static_cast<int>(std::floor((v - pad - lo) / len * n));
      return std::min(std::max(c, 0), n - 1);
    };
    auto cell_hi = [&](double v, double lo, double len, int n) {
      const int c = static_cast<int>(std::floor((v + pad - lo) / len * n));
      return std::min(std::max(c, 0), n - 1);
    };
    const int ix0 = cell_lo(bb.x0, bounds_.x0, bounds_.l1, nx_);
    const int ix1 = cell_hi(bb.x1(), bounds_.x0, bounds_.l1, nx_);
    const int iy0 = cell_lo(bb.y0, bounds_.y0, bounds_.l2, ny_);
    const int iy1 = cell_hi(bb.y1(), bounds_.y0, bounds_.l2, ny_);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(
            static_cast<std::int32_t>(i));
      }
    }
  }
}

int RegionIndex::locate(const Vec2& p) const {
  if (ms_ == nullptr) {
    return -1;
  }
  const double pad = 1e-12 * std::max(bounds_.l1, bounds_.l2);
  if (!bounds_.contains(p, pad)) {
    return -1;
  }
  auto cell_of = [&](double v, double lo, double len, int n) {
    const int c = static_cast<int>(std::floor((v - lo) / len * n));
    return std::min(std::max(c, 0), n - 1);
  };
  const int ix = cell_of(p.x, bounds_.x0, bounds_.l1, nx_);
  const int iy = cell_of(p.y, bounds_.y0, bounds_.l2, ny_);
  for (std::int32_t idx : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) {
    if (ms_->regions[static_cast<std::size_t>(idx)].shape.contains(p, pad)) {
      return idx;
    }
  }
  return -1;
}

double unresolved_fraction(const Microstructure& ms) {
  double unresolved = 0.0;
  for (const Region& r : ms.regions) {
    if (r.label.family == LabelFamily::Unresolved) {
      unresolved += r.shape.area();
    }
  }
  return unresolved / ms.domain.area();
}

Mat2 average_matrix(const Microstructure& ms) {
  Mat2 acc;
  for (const Region& r : ms.regions) {
    acc = acc + r.matrix * r.shape.area();
  }
  return acc * (1.0 / ms.domain.area());
}

}  // namespace marten
