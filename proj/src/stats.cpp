#include "martensim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace marten {

double Histogram::center(std::size_t i) const {
  return std::sqrt(edges[i] * edges[i + 1]);
}

Histogram make_log_histogram(double lo, double hi, int bins_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    fail(ErrorKind::InvalidParameter, "histogram range must satisfy 0 < lo < hi");
  }
  if (bins_per_decade < 1 || bins_per_decade > 10000) {
    fail(ErrorKind::InvalidParameter, "bins per decade out of range");
  }
  const double decades = std::log10(hi / lo);
  int n = static_cast<int>(std::ceil(decades * bins_per_decade - 1e-9));
  n = std::max(n, 1);
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    h.edges[static_cast<std::size_t>(i)] =
        lo * std::pow(10.0, static_cast<double>(i) / bins_per_decade);
  }
  h.edges.front() = lo;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(n), 0);
  return h;
}

void hist_add_count(Histogram& h, double value, std::uint64_t count) {
  if (!std::isfinite(value) || value < h.edges.front() || value >= h.edges.back()) {
    h.dropped += count;
    return;
  }
  const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), value);
  const auto bin = static_cast<std::size_t>(it - h.edges.begin()) - 1;
  h.counts[std::min(bin, h.counts.size() - 1)] += count;
  h.total += count;
}

void hist_add(Histogram& h, double value) { hist_add_count(h, value, 1); }

Histogram hist_merge(const Histogram& a, const Histogram& b) {
  if (a.edges.size() != b.edges.size()) {
    fail(ErrorKind::InvalidParameter, "histograms have different binnings");
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const double scale = std::max(std::abs(a.edges[i]), 1e-300);
    if (std::abs(a.edges[i] - b.edges[i]) > 1e-12 * scale) {
      fail(ErrorKind::InvalidParameter, "histograms have different binnings");
    }
  }
  Histogram out = a;
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    out.counts[i] += b.counts[i];
  }
  out.total += b.total;
  out.dropped += b.dropped;
  return out;
}

PowerLawFit fit_power_law(const Histogram& h, double fit_lo, double fit_hi,
                          bool use_density) {
  if (!(fit_lo > 0.0) || !(fit_hi > fit_lo)) {
    fail(ErrorKind::InvalidParameter, "fit window must satisfy 0 < lo < hi");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] == 0) continue;
    const double c = h.center(i);
    if (c < fit_lo || c > fit_hi) continue;
    const double y = use_density ? h.density(i) : static_cast<double>(h.counts[i]);
    xs.push_back(std::log(c));
    ys.push_back(std::log(y));
  }
  if (xs.size() < 3) {
    fail(ErrorKind::InsufficientData, "fewer than 3 non-empty bins in the fit window");
  }
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    fail(ErrorKind::InsufficientData, "degenerate abscissa in the fit window");
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.amplitude = std::exp(intercept);
  fit.exponent = -slope;
  fit.fit_lo = fit_lo;
  fit.fit_hi = fit_hi;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.n_bins = static_cast<int>(xs.size());
  return fit;
}

Histogram length_histogram(const SimResult& result, LengthMeasure measure,
                           const Histogram& binspec) {
  Histogram h = binspec;
  h.counts.assign(h.counts.size(), 0);
  h.total = 0;
  h.dropped = 0;
  if (measure != LengthMeasure::BandLongSide) {
    fail(ErrorKind::InvalidParameter,
         "simulation results carry band lengths, not diamond scales");
  }
  for (const SimEvent& ev : result.events) {
    hist_add(h, ev.placement.band.long_side());
  }
  return h;
}

Histogram length_histogram(const Microstructure& ms, LengthMeasure measure,
                           const Histogram& binspec) {
  Histogram h = binspec;
  h.counts.assign(h.counts.size(), 0);
  h.total = 0;
  h.dropped = 0;
  if (measure != LengthMeasure::DiamondLongAxis) {
    fail(ErrorKind::InvalidParameter,
         "microstructures carry diamond scales, not band lengths");
  }
  for (const Region& r : ms.regions) {
    if (r.shape.type == ShapeType::Diamond) {
      hist_add(h, r.shape.diamond.long_axis());
    }
  }
  return h;
}

BucketStats bucket_volumes(const std::vector<Rect>& components,
                           const BucketParams& params) {
  BucketStats out;
  out.params = params;
  for (const Rect& r : components) {
    if (!(r.l1 > 0.0) || !(r.l2 > 0.0)) continue;
    const int j = rect_class(r.aspect(), params);
    out.volumes[j] += r.area();
    out.total += r.area();
  }
  return out;
}

double tail_fraction(const BucketStats& stats, int j1) {
  if (!(stats.total > 0.0)) {
    return 0.0;
  }
  double tail = 0.0;
  for (const auto& [j, vol] : stats.volumes) {
    if (j <= j1) tail += vol;
  }
  return tail / stats.total;
}

CombinedLawPrediction combine_power_laws(double a_outer, double b_inner) {
  CombinedLawPrediction out;
  if (std::abs(a_outer + 1.0 - b_inner) <= 1e-9) {
    out.exponent = b_inner;
    out.log_correction = true;
    return out;
  }
  out.exponent = std::min(a_outer + 1.0, b_inner);
  return out;
}

double power_convolution_closed_form(double a_outer, double b_inner, double x) {
  if (!(x > 0.0) || !(x < 1.0)) {
    fail(ErrorKind::InvalidParameter, "closed form is defined on (0,1)");
  }
  const double e = a_outer + 1.0 - b_inner;
  if (std::abs(e) <= 1e-12) {
    return std::pow(x, b_inner) * std::log(1.0 / x);
  }
  return std::pow(x, b_inner) * (1.0 - std::pow(x, e)) / e;
}

std::vector<double> convolve_power_histograms(const Histogram& f, const Histogram& g,
                                              const std::vector<double>& eval_points) {
  // Log-linear interpolation of g's density between bin centers; zero outside.
  auto g_density = [&](double z) -> double {
    if (!(z > 0.0) || z < g.edges.front() || z >= g.edges.back()) return 0.0;
    const auto it = std::upper_bound(g.edges.begin(), g.edges.end(), z);
    const auto bin =
        std::min(static_cast<std::size_t>(it - g.edges.begin()) - 1, g.bins() - 1);
    const double c = g.center(bin);
    std::size_t lo = bin, hi = bin;
    if (z < c) {
      lo = bin == 0 ? bin : bin - 1;
      hi = bin;
    } else {
      lo = bin;
      hi = bin + 1 < g.bins() ? bin + 1 : bin;
    }
    const double dlo = g.density(lo);
    const double dhi = g.density(hi);
    if (lo == hi || dlo <= 0.0 || dhi <= 0.0) return g.density(bin);
    const double t = (std::log(z) - std::log(g.center(lo))) /
                     (std::log(g.center(hi)) - std::log(g.center(lo)));
    return std::exp(std::log(dlo) + t * (std::log(dhi) - std::log(dlo)));
  };

  std::vector<double> out;
  out.reserve(eval_points.size());
  for (const double x : eval_points) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.bins(); ++i) {
      if (f.counts[i] == 0) continue;
      const double y = f.center(i);
      if (y < x) continue;  // inner pieces are no larger than their parent
      acc += f.density(i) * g_density(x / y) * f.width(i);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace marten
