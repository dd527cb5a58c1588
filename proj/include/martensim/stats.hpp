#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "martensim/blocks.hpp"
#include "martensim/fragment.hpp"
#include "martensim/geometry.hpp"

namespace marten {

// Log-spaced histogram; values outside [edges.front(), edges.back()) are
// counted in `dropped` and reported, never silently discarded.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t dropped = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const;  // geometric bin center
  double density(std::size_t i) const { return static_cast<double>(counts[i]) / width(i); }
};

Histogram make_log_histogram(double lo, double hi, int bins_per_decade);
void hist_add(Histogram& h, double value);
void hist_add_count(Histogram& h, double value, std::uint64_t count);
Histogram hist_merge(const Histogram& a, const Histogram& b);

// Least-squares power law through log density vs log center:
// density ~ amplitude * x^(-exponent).
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double r_squared = 0.0;
  int n_bins = 0;
};

// Fits over non-empty bins whose centers lie in [fit_lo, fit_hi]; needs at
// least 3 such bins. use_density=false fits raw counts instead.
PowerLawFit fit_power_law(const Histogram& h, double fit_lo, double fit_hi,
                          bool use_density = true);

enum class LengthMeasure { BandLongSide, DiamondLongAxis };

Histogram length_histogram(const SimResult& result, LengthMeasure measure,
                           const Histogram& binspec);
Histogram length_histogram(const Microstructure& ms, LengthMeasure measure,
                           const Histogram& binspec);

// Component volume per aspect-ratio class.
struct BucketStats {
  BucketParams params;
  std::map<int, double> volumes;
  double total = 0.0;
};

BucketStats bucket_volumes(const std::vector<Rect>& components,
                           const BucketParams& params);

// Fraction of the total volume sitting in classes j <= j1 (the most elongated
// components); zero when there is no volume at all.
double tail_fraction(const BucketStats& stats, int j1);

// Composition of two power-law populations f(y) ~ y^a (outer sizes on (0,1])
// and g(z) ~ z^b (inner sizes relative to the outer one): the combined density
// h(x) = S f(y) g(x/y) dy behaves like x^min(a+1, b), with a logarithmic
// correction exactly at a + 1 = b.
struct CombinedLawPrediction {
  double exponent = 0.0;
  bool log_correction = false;
};

CombinedLawPrediction combine_power_laws(double a_outer, double b_inner);

// Numeric composition on a shared log grid; g is evaluated by log-linear
// interpolation between bin centers so exact power laws suffer no binning bias.
std::vector<double> convolve_power_histograms(const Histogram& f, const Histogram& g,
                                              const std::vector<double>& eval_points);

// Closed form of the composition for exact power laws on (0,1].
double power_convolution_closed_form(double a_outer, double b_inner, double x);

}  // namespace marten
