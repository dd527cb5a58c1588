#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "martensim/stats.hpp"
#include "test_helpers.hpp"

using marten::BucketParams;
using marten::BucketStats;
using marten::ErrorKind;
using marten::Histogram;
using marten::PowerLawFit;
using marten::Rect;

namespace {

// Bin counts that realize an exact power-law density amplitude * x^expo.
Histogram power_histogram(double lo, double hi, int bins_per_decade, double expo,
                          double amplitude) {
  Histogram h = marten::make_log_histogram(lo, hi, bins_per_decade);
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double want = amplitude * std::pow(h.center(i), expo) * h.width(i);
    const auto count = static_cast<std::uint64_t>(std::llround(want));
    h.counts[i] = count;
    h.total += count;
  }
  return h;
}

}  // namespace

TEST_CASE("log histogram bookkeeping") {
  Histogram h = marten::make_log_histogram(1e-4, 1.0, 16);
  CHECK(h.bins() == 64);
  CHECK(h.edges.front() == 1e-4);
  CHECK(h.edges.back() == 1.0);

  marten::hist_add(h, 1e-4);   // lower edge is inclusive
  marten::hist_add(h, 0.5);
  marten::hist_add(h, 1.0);    // upper edge is exclusive -> dropped
  marten::hist_add(h, 5e-5);   // below range -> dropped
  marten::hist_add(h, 2.0);    // above range -> dropped
  CHECK(h.total == 2);
  CHECK(h.dropped == 3);
  CHECK(h.counts[0] == 1);

  const Histogram merged = marten::hist_merge(h, h);
  CHECK(merged.total == 4);
  CHECK(merged.dropped == 6);
  CHECK(merged.counts[0] == 2);

  const Histogram other = marten::make_log_histogram(1e-3, 1.0, 16);
  CHECK(error_kind_of([&] { marten::hist_merge(h, other); }) ==
        ErrorKind::InvalidParameter);
}

TEST_CASE("power-law fit recovers synthetic slopes") {
  const Histogram steep = power_histogram(1e-3, 1.0, 25, -2.0, 1e9);
  const PowerLawFit fit = marten::fit_power_law(steep, 1e-3, 1.0);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(fit.r_squared > 0.9999);
  CHECK(fit.n_bins > 50);

  const Histogram flat = power_histogram(1e-3, 1.0, 25, 0.0, 1e9);
  const PowerLawFit fit0 = marten::fit_power_law(flat, 1e-3, 1.0);
  CHECK(fit0.exponent == doctest::Approx(0.0).epsilon(1e-3));

  // Raw-count fitting differs from density fitting by one power of the bin
  // width, i.e. one power of x on a log grid.
  const PowerLawFit raw = marten::fit_power_law(steep, 1e-3, 1.0, false);
  CHECK(raw.exponent == doctest::Approx(1.0).epsilon(5e-3));

  Histogram sparse = marten::make_log_histogram(1e-3, 1.0, 25);
  sparse.counts[3] = 5;
  sparse.counts[10] = 5;
  CHECK(error_kind_of([&] { marten::fit_power_law(sparse, 1e-3, 1.0); }) ==
        ErrorKind::InsufficientData);
}

TEST_CASE("bucket volumes partition the components") {
  const BucketParams params = BucketParams::from_delta(1.1, 0.1);
  const std::vector<Rect> comps = {Rect(0.0, 0.0, 0.5, 0.05), Rect(0.0, 0.0, 0.3, 0.3),
                                   Rect(0.0, 0.0, 0.01, 0.3), Rect(0.0, 0.0, 0.2, 0.1)};
  const BucketStats stats = marten::bucket_volumes(comps, params);
  double total = 0.0;
  for (const Rect& r : comps) total += r.area();
  CHECK(stats.total == doctest::Approx(total).epsilon(1e-12));
  double classed = 0.0;
  for (const auto& [j, v] : stats.volumes) classed += v;
  CHECK(classed == doctest::Approx(total).epsilon(1e-12));
  for (const Rect& r : comps) {
    const int j = marten::rect_class(r.aspect(), params);
    CHECK(stats.volumes.count(j) == 1);
  }
}

TEST_CASE("tail fraction sums the most elongated classes") {
  BucketStats stats;
  stats.volumes[-100] = 0.2;
  stats.volumes[-98] = 0.3;
  stats.volumes[0] = 0.5;
  stats.total = 1.0;
  CHECK(marten::tail_fraction(stats, -98) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(marten::tail_fraction(stats, -99) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(marten::tail_fraction(stats, -101) == 0.0);
  CHECK(marten::tail_fraction(stats, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marten::tail_fraction(BucketStats{}, 0) == 0.0);
}

TEST_CASE("combined power-law prediction") {
  const auto steep = marten::combine_power_laws(-3.0, -1.0);
  CHECK(steep.exponent == -2.0);
  CHECK(!steep.log_correction);

  const auto tie = marten::combine_power_laws(-1.0, 0.0);
  CHECK(tie.exponent == 0.0);
  CHECK(tie.log_correction);

  const auto inner = marten::combine_power_laws(0.0, -1.0);
  CHECK(inner.exponent == -1.0);
  CHECK(!inner.log_correction);
}

TEST_CASE("closed-form composition") {
  // a = -3, b = -1: S_x^1 y^-3 (x/y)^-1 dy = x^-1 (1/x - 1).
  CHECK(marten::power_convolution_closed_form(-3.0, -1.0, 0.1) ==
        doctest::Approx(90.0).epsilon(1e-12));
  // Tie case integrates to x^b log(1/x).
  CHECK(marten::power_convolution_closed_form(-1.0, 0.0, 0.25) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(error_kind_of([&] { marten::power_convolution_closed_form(-3.0, -1.0, 1.5); }) ==
        ErrorKind::InvalidParameter);
}

TEST_CASE("numeric composition matches the closed form") {
  const struct {
    double a, b;
  } cases[] = {{-3.0, -1.0}, {-1.5, -0.6}};
  for (const auto& c : cases) {
    const Histogram f = power_histogram(1e-3, 1.0, 25, c.a, 1e9);
    const Histogram g = power_histogram(1e-3, 1.0, 25, c.b, 1e9);
    // Evaluate on bin edges of f so the y >= x boundary never cuts a bin in
    // half; away from edges the truncation alone costs a few percent.
    std::vector<double> xs;
    for (std::size_t i = 43; i <= 68; i += 5) xs.push_back(f.edges[i]);
    const std::vector<double> conv = marten::convolve_power_histograms(f, g, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double expect =
          1e18 * marten::power_convolution_closed_form(c.a, c.b, xs[i]);
      CHECK(conv[i] == doctest::Approx(expect).epsilon(0.02));
    }
  }
}
