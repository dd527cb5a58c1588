#include "martensim/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "martensim/rng.hpp"

namespace marten {

namespace {

constexpr double kLineTol = 1e-9;       // clustering edges into shared lines
constexpr double kParamMergeTol = 1e-10;  // merging breakpoints along one line
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kTagSobolev = 83;
constexpr std::uint64_t kTagSeriesSeed = 911;

// One polygon edge lifted onto its supporting line n.p = c with |n| = 1 and a
// canonical normal sign; t parameterizes the line along d = (-ny, nx).
struct LineEdge {
  double nx, ny, c;
  double t0, t1;
  int owner;
  int side;  // +1 when the owner's interior lies on the +n side
};

struct ElemPiece {
  double u, v;
  const LineEdge* e0;
  const LineEdge* e1;  // null when single-owner
};

// A polygon edge before line assignment: endpoints plus the canonically signed
// unit normal.  side records whether the owner's interior still lies on the +n
// side after the sign canonicalization.
struct RawEdge {
  double ax, ay, bx, by;
  double nx, ny;
  int owner;
  int side;
};

void collect_edges(const Microstructure& ms, std::vector<RawEdge>& out) {
  for (std::size_t i = 0; i < ms.regions.size(); ++i) {
    std::vector<Vec2> poly = ms.regions[i].shape.vertices();
    if (poly.size() < 3) continue;
    double twice_area = 0.0;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Vec2& a = poly[j];
      const Vec2& b = poly[(j + 1) % poly.size()];
      twice_area += a.x * b.y - b.x * a.y;
    }
    if (std::abs(twice_area) < 1e-300) continue;
    if (twice_area < 0.0) std::reverse(poly.begin(), poly.end());
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Vec2& a = poly[j];
      const Vec2& b = poly[(j + 1) % poly.size()];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double len = std::hypot(dx, dy);
      if (len <= 1e-13) continue;
      double nx = -dy / len;  // interior of a CCW polygon lies left of a->b
      double ny = dx / len;
      int side = 1;
      if (nx < -1e-12 || (std::abs(nx) <= 1e-12 && ny < 0.0)) {
        nx = -nx;
        ny = -ny;
        side = -1;
      }
      if (std::abs(nx) <= 1e-12) {
        nx = 0.0;
        ny = 1.0;
      } else if (std::abs(ny) <= 1e-12) {
        nx = 1.0;
        ny = 0.0;
      }
      out.push_back({a.x, a.y, b.x, b.y, nx, ny, static_cast<int>(i), side});
    }
  }
}

int snap_index(const std::vector<double>& merged, double value) {
  auto it = std::lower_bound(merged.begin(), merged.end(), value);
  if (it == merged.end()) return static_cast<int>(merged.size()) - 1;
  if (it == merged.begin()) return 0;
  const double hi = *it;
  const double lo = *(it - 1);
  return (value - lo <= hi - value) ? static_cast<int>(it - merged.begin()) - 1
                                    : static_cast<int>(it - merged.begin());
}

// Splits one line's edges at all breakpoints and reports every elementary
// interval together with the edges covering it (after overlap validation).
template <typename Handler>
void process_line(const std::vector<LineEdge>& edges, std::size_t lo, std::size_t hi,
                  Handler&& handler) {
  std::vector<double> bp;
  bp.reserve(2 * (hi - lo));
  for (std::size_t k = lo; k < hi; ++k) {
    bp.push_back(edges[k].t0);
    bp.push_back(edges[k].t1);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> merged;
  merged.reserve(bp.size());
  for (double v : bp) {
    if (merged.empty() || v - merged.back() > kParamMergeTol) merged.push_back(v);
  }
  if (merged.size() < 2) return;

  struct SegI {
    int i0, i1;
    const LineEdge* e;
  };
  std::vector<SegI> segs;
  segs.reserve(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) {
    const int i0 = snap_index(merged, edges[k].t0);
    const int i1 = snap_index(merged, edges[k].t1);
    if (i1 > i0) segs.push_back({i0, i1, &edges[k]});
  }
  std::sort(segs.begin(), segs.end(),
            [](const SegI& a, const SegI& b) { return a.i0 < b.i0; });

  std::vector<SegI> active;
  std::size_t next = 0;
  for (int e = 0; e + 1 < static_cast<int>(merged.size()); ++e) {
    while (next < segs.size() && segs[next].i0 <= e) active.push_back(segs[next++]);
    std::size_t keep = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (active[a].i1 >= e + 1) active[keep++] = active[a];
    }
    active.resize(keep);
    if (active.empty()) continue;
    if (active.size() > 2) {
      fail(ErrorKind::GeometryError,
           "more than two regions meet along a boundary piece");
    }
    ElemPiece piece{merged[static_cast<std::size_t>(e)],
                    merged[static_cast<std::size_t>(e) + 1], active[0].e,
                    active.size() == 2 ? active[1].e : nullptr};
    if (piece.e1 != nullptr && piece.e0->side == piece.e1->side) {
      fail(ErrorKind::GeometryError, "regions overlap along a shared boundary");
    }
    handler(piece);
  }
}

// Edges are produced with normals recomputed per edge, so collinear edges can
// carry normals a few ulps apart.  Clustering happens in two stages to keep
// that noise from splitting a shared line: first the normals themselves are
// grouped into direction families, then every edge is re-projected onto its
// family's representative frame (shared nx, ny) before the line constants are
// compared.  Within one frame, collinear edges agree to machine precision.
template <typename Handler>
void sweep_lines(const Microstructure& ms, Handler&& handler) {
  std::vector<RawEdge> raw;
  collect_edges(ms, raw);
  // Sort directions by angle so that the ulp-level noise of one family stays
  // contiguous; a lexicographic (nx, ny) sort would interleave the ny > 0 and
  // ny < 0 branches whenever nx wobbles in its last bits.
  std::vector<double> angle(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    angle[i] = std::atan2(raw[i].ny, raw[i].nx);
  }
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return angle[a] < angle[b];
  });

  std::vector<LineEdge> edges;
  edges.reserve(raw.size());
  std::size_t f = 0;
  while (f < order.size()) {
    const double rx = raw[order[f]].nx;
    const double ry = raw[order[f]].ny;
    std::size_t g = f;
    while (g < order.size() && std::abs(angle[order[g]] - angle[order[f]]) <= kLineTol) {
      ++g;
    }
    const std::size_t family_begin = edges.size();
    const double dirx = -ry;
    const double diry = rx;
    for (std::size_t k = f; k < g; ++k) {
      const RawEdge& e = raw[order[k]];
      const double ta = dirx * e.ax + diry * e.ay;
      const double tb = dirx * e.bx + diry * e.by;
      const double c = rx * 0.5 * (e.ax + e.bx) + ry * 0.5 * (e.ay + e.by);
      edges.push_back({rx, ry, c, std::min(ta, tb), std::max(ta, tb), e.owner,
                       e.side});
    }
    std::sort(edges.begin() + static_cast<std::ptrdiff_t>(family_begin),
              edges.end(), [](const LineEdge& a, const LineEdge& b) {
                if (a.c != b.c) return a.c < b.c;
                return a.t0 < b.t0;
              });
    std::size_t i = family_begin;
    while (i < edges.size()) {
      std::size_t j = i;
      while (j < edges.size() && std::abs(edges[j].c - edges[i].c) <= kLineTol) {
        ++j;
      }
      process_line(edges, i, j, handler);
      i = j;
    }
    f = g;
  }
}

// Domain side indices: 0 = x-low, 1 = x-high, 2 = y-low, 3 = y-high, -1 = none.
int classify_domain_side(const LineEdge& e, double u, double v, const Rect& dom) {
  if (std::abs(e.nx - 1.0) <= kLineTol && std::abs(e.ny) <= kLineTol) {
    // vertical line x = c, parameterized by t = y
    if (u < dom.y0 - kLineTol || v > dom.y1() + kLineTol) return -1;
    if (std::abs(e.c - dom.x0) <= kLineTol) return 0;
    if (std::abs(e.c - dom.x1()) <= kLineTol) return 1;
    return -1;
  }
  if (std::abs(e.ny - 1.0) <= kLineTol && std::abs(e.nx) <= kLineTol) {
    // horizontal line y = c, parameterized by t = -x
    if (u < -dom.x1() - kLineTol || v > -dom.x0 + kLineTol) return -1;
    if (std::abs(e.c - dom.y0) <= kLineTol) return 2;
    if (std::abs(e.c - dom.y1()) <= kLineTol) return 3;
    return -1;
  }
  return -1;
}

void accumulate_bulk(const Microstructure& ms, const Mat2& ref, double p, double* area,
                     double* l1, double* lp, double* linf) {
  for (const Region& r : ms.regions) {
    const double a = r.shape.area();
    if (a <= 0.0) continue;
    const double d = frob_dist(r.matrix, ref);
    if (area != nullptr) *area += a;
    *l1 += a * d;
    if (lp != nullptr) *lp += a * std::pow(d, p);
    if (d > *linf) *linf = d;
  }
}

struct ProfileSeg {
  double u, v;
  Mat2 g;
};

double overlay_profiles(std::vector<ProfileSeg> lo, std::vector<ProfileSeg> hi) {
  auto by_u = [](const ProfileSeg& a, const ProfileSeg& b) { return a.u < b.u; };
  std::sort(lo.begin(), lo.end(), by_u);
  std::sort(hi.begin(), hi.end(), by_u);
  std::vector<double> bp;
  for (const ProfileSeg& s : lo) {
    bp.push_back(s.u);
    bp.push_back(s.v);
  }
  for (const ProfileSeg& s : hi) {
    bp.push_back(s.u);
    bp.push_back(s.v);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> merged;
  for (double v : bp) {
    if (merged.empty() || v - merged.back() > kParamMergeTol) merged.push_back(v);
  }
  auto find_cover = [](const std::vector<ProfileSeg>& segs, double u,
                       double v) -> const ProfileSeg* {
    for (const ProfileSeg& s : segs) {
      if (s.u <= u + kParamMergeTol && s.v >= v - kParamMergeTol) return &s;
      if (s.u > u + kParamMergeTol) break;
    }
    return nullptr;
  };
  double total = 0.0;
  for (std::size_t e = 0; e + 1 < merged.size(); ++e) {
    const double u = merged[e];
    const double v = merged[e + 1];
    const ProfileSeg* a = find_cover(lo, u, v);
    const ProfileSeg* b = find_cover(hi, u, v);
    if (a == nullptr || b == nullptr) {
      fail(ErrorKind::GeometryError, "opposite block ends are tiled differently");
    }
    total += frob_dist(a->g, b->g) * (v - u);
  }
  return total;
}

double near_diagonal_bound(const BvResult& stats, double s, double p, double r_min) {
  if (stats.interface_total <= 0.0) return 0.0;
  const double sp = s * p;
  return kTwoPi * std::pow(2.0 * stats.linf, p - 1.0) * stats.interface_total *
         std::pow(r_min, 1.0 - sp) / (1.0 - sp);
}

}  // namespace

BvResult bv_norm(const Microstructure& ms) {
  BvResult out;
  accumulate_bulk(ms, Mat2{}, 1.0, nullptr, &out.l1, nullptr, &out.linf);
  sweep_lines(ms, [&](const ElemPiece& piece) {
    const double len = piece.v - piece.u;
    if (piece.e1 != nullptr) {
      out.interface_total +=
          frob_dist(ms.regions[static_cast<std::size_t>(piece.e0->owner)].matrix,
                    ms.regions[static_cast<std::size_t>(piece.e1->owner)].matrix) *
          len;
      return;
    }
    if (classify_domain_side(*piece.e0, piece.u, piece.v, ms.domain) < 0) {
      fail(ErrorKind::GeometryError,
           "field decomposition has a gap at an interior boundary");
    }
  });
  return out;
}

BvResult bv_norm_extended(const Microstructure& ms, const Mat2& ambient) {
  BvResult out;
  double covered = 0.0;
  accumulate_bulk(ms, Mat2{}, 1.0, &covered, &out.l1, nullptr, &out.linf);
  const double uncovered = std::max(0.0, ms.domain.area() - covered);
  const double amb = ambient.frobenius();
  out.l1 += uncovered * amb;
  if (uncovered > 1e-12 * std::max(1.0, ms.domain.area()) && amb > out.linf) {
    out.linf = amb;
  }
  sweep_lines(ms, [&](const ElemPiece& piece) {
    const double len = piece.v - piece.u;
    const Mat2& g0 = ms.regions[static_cast<std::size_t>(piece.e0->owner)].matrix;
    if (piece.e1 != nullptr) {
      out.interface_total +=
          frob_dist(g0, ms.regions[static_cast<std::size_t>(piece.e1->owner)].matrix) *
          len;
    } else {
      out.interface_total += frob_dist(g0, ambient) * len;
    }
  });
  return out;
}

void SobolevParams::validate() const {
  if (!(s > 0.0) || !(s < 1.0)) {
    fail(ErrorKind::InvalidParameter, "smoothness order must lie in (0, 1)");
  }
  if (!(p >= 1.0)) {
    fail(ErrorKind::InvalidParameter, "integrability exponent must be >= 1");
  }
  if (!(s * p < 1.0)) {
    fail(ErrorKind::InvalidParameter,
         "the product of smoothness and integrability must stay below 1");
  }
  if (!(r_min > 0.0)) {
    fail(ErrorKind::InvalidParameter, "truncation radius must be positive");
  }
  if (n_samples == 0) {
    fail(ErrorKind::InvalidParameter, "sample count must be positive");
  }
}

MicrostructureField::MicrostructureField(const Microstructure& ms, const Mat2& reference)
    : ms_(&ms), ref_(reference) {
  int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(
              ms.regions.size() + 1)))) +
          1;
  n = std::max(8, std::min(192, n));
  index_ = RegionIndex(ms, n, n);
}

Mat2 MicrostructureField::eval(const Vec2& p) const {
  const int idx = index_.locate(p);
  if (idx < 0) return Mat2{};
  return ms_->regions[static_cast<std::size_t>(idx)].matrix - ref_;
}

GagliardoEstimate gagliardo_seminorm(const FieldEval& field, const BvResult& stats,
                                     const SobolevParams& prm) {
  prm.validate();
  const Rect dom = field.domain();
  if (!(dom.l1 > 0.0) || !(dom.l2 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "field domain is empty");
  }
  const double diam = std::hypot(dom.l1, dom.l2);
  if (!(prm.r_min < diam)) {
    fail(ErrorKind::InvalidParameter,
         "truncation radius must be below the domain diameter");
  }
  const double sp = prm.sp();
  const double a_pow = std::pow(prm.r_min, -sp);
  const double b_pow = std::pow(diam, -sp);
  const double z_mass = (a_pow - b_pow) / sp;
  const double weight0 = dom.area() * kTwoPi * z_mass;

  double sum = 0.0;
  double sumsq = 0.0;
  for (std::uint64_t i = 0; i < prm.n_samples; ++i) {
    const double ux = keyed_uniform(prm.seed, i, 0, kTagSobolev);
    const double uy = keyed_uniform(prm.seed, i, 1, kTagSobolev);
    const double ur = keyed_uniform(prm.seed, i, 2, kTagSobolev);
    const double ut = keyed_uniform(prm.seed, i, 3, kTagSobolev);
    const Vec2 x(dom.x0 + ux * dom.l1, dom.y0 + uy * dom.l2);
    const double r = std::pow(a_pow - ur * (a_pow - b_pow), -1.0 / sp);
    const double th = kTwoPi * ut;
    const Vec2 y(x.x + r * std::cos(th), x.y + r * std::sin(th));
    double w = 0.0;
    if (y.x >= dom.x0 && y.x <= dom.x1() && y.y >= dom.y0 && y.y <= dom.y1()) {
      const double d = frob_dist(field.eval(x), field.eval(y));
      if (d > 0.0) w = weight0 * std::pow(d, prm.p);
    }
    sum += w;
    sumsq += w * w;
  }
  const double n = static_cast<double>(prm.n_samples);
  GagliardoEstimate out;
  out.estimate = sum / n;
  if (prm.n_samples > 1) {
    const double var = std::max(0.0, (sumsq - n * out.estimate * out.estimate) /
                                         (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  out.cutoff_bound = near_diagonal_bound(stats, prm.s, prm.p, prm.r_min);
  return out;
}

double interpolation_bound(const BvResult& stats, double s, double p) {
  if (!(s > 0.0) || !(s < 1.0) || !(p >= 1.0) || !(s * p < 1.0)) {
    fail(ErrorKind::InvalidParameter, "invalid interpolation exponents");
  }
  if (stats.l1 <= 0.0) return 0.0;
  const double sp = s * p;
  const double bv = stats.l1 + stats.interface_total;
  return std::pow(stats.linf, 1.0 - 1.0 / p) *
         std::pow(std::pow(stats.l1, 1.0 - sp) * std::pow(bv, sp), 1.0 / p);
}

QuadratureResult halfplane_seminorm_quadrature(double jump_norm, double s, double p,
                                               double r_min, int n_base) {
  if (!(s > 0.0) || !(s < 1.0) || !(p >= 1.0) || !(s * p < 1.0)) {
    fail(ErrorKind::InvalidParameter, "invalid quadrature exponents");
  }
  if (!(r_min > 0.0) || !(r_min < std::sqrt(2.0))) {
    fail(ErrorKind::InvalidParameter, "truncation radius out of range");
  }
  if (n_base < 8) fail(ErrorKind::InvalidParameter, "quadrature resolution too low");
  const double sp = s * p;
  // Separated pair integral for the field jump_norm * [upper half of the unit
  // square]: with horizontal offset t and vertical separation d > 0,
  //   value = 2 J^p  integral over {0 < d, |t| < 1, r_min <= rho <= sqrt(2)}
  //           of overlap(t) * crossing(d) * rho^(-2-sp) dA,
  // where overlap(t) = 1 - |t|, crossing(d) = min(d, 1 - d) on (0, 1), and the
  // domain clip d <= 1 is enforced explicitly. Evaluated in polar coordinates
  // with a log-radial midpoint rule.
  auto resolve = [&](int n) {
    const double u0 = std::log(r_min);
    const double u1 = 0.5 * std::log(2.0);
    const int nr = n;
    const int nphi = n;
    const double hu = (u1 - u0) / nr;
    const double hphi = 3.14159265358979323846 / nphi;
    double total = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double u = u0 + (i + 0.5) * hu;
      const double rho = std::exp(u);
      double ang = 0.0;
      for (int k = 0; k < nphi; ++k) {
        const double phi = -0.5 * 3.14159265358979323846 + (k + 0.5) * hphi;
        const double d = rho * std::cos(phi);
        const double t = rho * std::sin(phi);
        if (d <= 0.0 || d > 1.0 || std::abs(t) >= 1.0) continue;
        const double crossing = d <= 0.5 ? d : 1.0 - d;
        ang += crossing * (1.0 - std::abs(t));
      }
      total += hu * std::exp(-sp * u) * ang * hphi;
    }
    return 2.0 * std::pow(jump_norm, p) * total;
  };
  const double coarse = resolve(n_base);
  const double fine = resolve(2 * n_base);
  QuadratureResult out;
  out.value = fine + (fine - coarse) / 3.0;
  out.error_estimate = std::abs(fine - coarse);
  return out;
}

BlockAggregates block_aggregates(const Microstructure& block, const Mat2& reference,
                                 double p) {
  if (!(p >= 1.0)) {
    fail(ErrorKind::InvalidParameter, "integrability exponent must be >= 1");
  }
  BlockAggregates out;
  accumulate_bulk(block, reference, p, &out.area, &out.l1, &out.lp, &out.linf);
  const int long_axis = block.domain.l1 >= block.domain.l2 ? 1 : 2;
  std::vector<ProfileSeg> low_end;
  std::vector<ProfileSeg> high_end;
  sweep_lines(block, [&](const ElemPiece& piece) {
    const double len = piece.v - piece.u;
    const Mat2& g0 = block.regions[static_cast<std::size_t>(piece.e0->owner)].matrix;
    if (piece.e1 != nullptr) {
      out.interface_internal +=
          frob_dist(g0,
                    block.regions[static_cast<std::size_t>(piece.e1->owner)].matrix) *
          len;
      return;
    }
    const int side = classify_domain_side(*piece.e0, piece.u, piece.v, block.domain);
    if (side < 0) {
      fail(ErrorKind::GeometryError, "block boundary has a non-conforming piece");
    }
    const double jump = frob_dist(g0, reference) * len;
    const bool is_end = (long_axis == 1) ? (side == 0 || side == 1)
                                         : (side == 2 || side == 3);
    if (is_end) {
      out.end_jump += jump;
      const bool low = (long_axis == 1) ? (side == 0) : (side == 2);
      (low ? low_end : high_end).push_back({piece.u, piece.v, g0});
    } else {
      out.side_jump += jump;
    }
  });
  out.stack_interface = overlay_profiles(std::move(low_end), std::move(high_end));
  return out;
}

namespace {

struct BandRef {
  Rect band;
  int long_axis;
  int n_copies;
  double lambda;
};

// Difference field of one simulation step: block gradients minus the datum on
// that step's bands, zero elsewhere.
class StepDifferenceField : public FieldEval {
 public:
  StepDifferenceField(const Rect& dom, std::vector<BandRef> bands,
                      const BlockLibrary& lib, const RegionIndex& idx_h,
                      const RegionIndex& idx_v)
      : dom_(dom), bands_(std::move(bands)), lib_(&lib), idx_h_(&idx_h),
        idx_v_(&idx_v) {}

  Mat2 eval(const Vec2& p) const override {
    for (const BandRef& b : bands_) {
      if (p.x < b.band.x0 || p.x > b.band.x1() || p.y < b.band.y0 ||
          p.y > b.band.y1()) {
        continue;
      }
      const bool along_x = b.long_axis == 1;
      const double tl = (along_x ? p.x - b.band.x0 : p.y - b.band.y0) / b.lambda;
      const double tp = (along_x ? p.y - b.band.y0 : p.x - b.band.x0) / b.lambda;
      double copy = std::floor(tl);  // the block long side is exactly 1
      copy = std::max(0.0, std::min(static_cast<double>(b.n_copies - 1), copy));
      const double local_long = tl - copy;
      const Vec2 q = along_x ? Vec2(local_long, tp) : Vec2(tp, local_long);
      const RegionIndex& idx = along_x ? *idx_h_ : *idx_v_;
      const Microstructure& blk = along_x ? lib_->horizontal : lib_->vertical;
      const int r = idx.locate(q);
      if (r < 0) return Mat2{};
      return blk.regions[static_cast<std::size_t>(r)].matrix - lib_->m;
    }
    return Mat2{};
  }

  Rect domain() const override { return dom_; }

 private:
  Rect dom_;
  std::vector<BandRef> bands_;
  const BlockLibrary* lib_;
  const RegionIndex* idx_h_;
  const RegionIndex* idx_v_;
};

int block_grid_size(const Microstructure& ms) {
  int n = static_cast<int>(
              std::lround(std::sqrt(static_cast<double>(ms.regions.size() + 1)))) +
          1;
  return std::max(8, std::min(192, n));
}

}  // namespace

std::vector<StepDifferenceRow> step_difference_series(const SimResult& result,
                                                      const BlockLibrary& lib,
                                                      const SobolevParams& prm,
                                                      double budget_c) {
  prm.validate();
  const double p = prm.p;
  const double sp = prm.sp();
  const BlockAggregates agg_h = block_aggregates(lib.horizontal, lib.m, p);
  const BlockAggregates agg_v = block_aggregates(lib.vertical, lib.m, p);
  const RegionIndex idx_h(lib.horizontal, block_grid_size(lib.horizontal),
                          block_grid_size(lib.horizontal));
  const RegionIndex idx_v(lib.vertical, block_grid_size(lib.vertical),
                          block_grid_size(lib.vertical));
  const Rect dom = result.records.empty() ? Rect(0.0, 0.0, 1.0, 1.0)
                                          : result.records[0].rect;

  std::vector<StepDifferenceRow> rows;
  std::size_t pos = 0;
  for (int step = 1; step <= result.steps_run; ++step) {
    const std::size_t begin = pos;
    while (pos < result.events.size() && result.events[pos].step == step) ++pos;
    if (begin == pos) continue;

    StepDifferenceRow row;
    row.k = step - 1;
    double l1 = 0.0;
    double lp = 0.0;
    double linf = 0.0;
    double iface = 0.0;
    double removed = 0.0;
    std::vector<BandRef> bands;
    bands.reserve(pos - begin);
    for (std::size_t e = begin; e < pos; ++e) {
      const Placement& pl = result.events[e].placement;
      if (pl.whole_component) {
        fail(ErrorKind::InvalidPlacement,
             "whole-component placements admit no block-shaped difference field");
      }
      const BlockAggregates& agg = pl.long_axis == 1 ? agg_h : agg_v;
      const int n = pl.n_copies;
      const double lambda = pl.extent() / n;
      removed += pl.band.area();
      l1 += n * lambda * lambda * agg.l1;
      lp += n * lambda * lambda * agg.lp;
      linf = std::max(linf, agg.linf);
      iface += lambda * (n * agg.interface_internal + (n - 1) * agg.stack_interface +
                         agg.end_jump + n * agg.side_jump);
      bands.push_back({pl.band, pl.long_axis, n, lambda});
    }
    row.removed = removed;
    row.lp_term = lp;
    row.l1 = l1;
    row.linf = linf;
    row.interface_total = iface;

    const BvResult stats{iface, l1, linf};
    StepDifferenceField field(dom, std::move(bands), lib, idx_h, idx_v);
    SobolevParams local = prm;
    local.seed = keyed_hash(prm.seed, static_cast<std::uint64_t>(row.k), 0,
                            kTagSeriesSeed);
    const GagliardoEstimate est = gagliardo_seminorm(field, stats, local);
    row.gagliardo = est.estimate;
    row.std_error = est.std_error;
    row.cutoff_bound = est.cutoff_bound;
    row.norm_estimate = std::pow(lp + est.estimate, 1.0 / p);
    const double vol_k = result.series[static_cast<std::size_t>(row.k)].volume;
    row.bound_rhs = budget_c * std::exp2(row.k * sp) *
                    (std::pow(removed, 1.0 - sp) + std::pow(vol_k, 1.0 - sp));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace marten
