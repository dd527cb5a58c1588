#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "martensim/io.hpp"
#include "martensim/render.hpp"
#include "martensim/rng.hpp"
#include "test_helpers.hpp"

using marten::ErrorKind;
using marten::GradientLabel;
using marten::Image;
using marten::LabelFamily;
using marten::Mat2;
using marten::Microstructure;
using marten::Rect;
using marten::Region;
using marten::Rgb;
using marten::Shape;

namespace {

std::string temp_path(const std::string& name) {
  const char* base = std::getenv("TMPDIR");
  std::string dir = base ? base : "/tmp";
  return dir + "/martensim_test_" + name;
}

Region rect_region(const Rect& r, LabelFamily family, int variant) {
  Region reg;
  reg.shape = Shape::of(r);
  reg.label = {family, variant, 0};
  return reg;
}

}  // namespace

TEST_CASE("fixed palette") {
  CHECK(marten::label_color({LabelFamily::Horizontal, 1, 0}) == Rgb{255, 0, 255});
  CHECK(marten::label_color({LabelFamily::Horizontal, -1, 0}) == Rgb{255, 165, 0});
  CHECK(marten::label_color({LabelFamily::Vertical, 1, 0}) == Rgb{0, 255, 255});
  CHECK(marten::label_color({LabelFamily::Vertical, -1, 0}) == Rgb{0, 255, 0});
  CHECK(marten::label_color({LabelFamily::Unresolved, 0, 3}) == Rgb{0, 0, 0});
}

TEST_CASE("rendering samples pixel centers with the top row first") {
  Microstructure ms;
  ms.domain = Rect(0.0, 0.0, 1.0, 1.0);
  ms.regions.push_back(rect_region(Rect(0.0, 0.0, 1.0, 0.5), LabelFamily::Vertical, 1));
  ms.regions.push_back(rect_region(Rect(0.0, 0.5, 1.0, 0.5), LabelFamily::Vertical, -1));
  const Image img = marten::render_microstructure(ms, 16, 16);
  CHECK(img.get(0, 0) == Rgb{0, 255, 0});     // top band is green
  CHECK(img.get(15, 15) == Rgb{0, 255, 255});  // bottom band is cyan
  CHECK(img.get(0, 8) == Rgb{0, 255, 0});
  CHECK(img.get(15, 8) == Rgb{0, 255, 255});

  // A lone unresolved region renders black; uncovered pixels stay white.
  Microstructure island;
  island.domain = Rect(0.0, 0.0, 1.0, 1.0);
  island.regions.push_back(
      rect_region(Rect(0.25, 0.25, 0.5, 0.5), LabelFamily::Unresolved, 0));
  const Image img2 = marten::render_microstructure(island, 16, 16);
  CHECK(img2.get(0, 0) == Rgb{255, 255, 255});
  CHECK(img2.get(8, 8) == Rgb{0, 0, 0});
}

TEST_CASE("rendered areas track geometric areas") {
  marten::SimConfig cfg;
  cfg.seed = 1;
  cfg.stop.max_steps = 2;
  const marten::SimResult result = marten::run_simulation(cfg);
  const marten::BlockLibrary lib =
      marten::make_block_library(cfg.m, cfg.gamma, cfg.delta, 1);
  const Microstructure state = marten::assemble_state(result, lib);
  const Image img = marten::render_microstructure(state, 256, 256);

  std::size_t black = 0, white = 0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const Rgb px = img.get(r, c);
      if (px == Rgb{0, 0, 0}) ++black;
      if (px == Rgb{255, 255, 255}) ++white;
    }
  }
  const double total = 256.0 * 256.0;
  CHECK(static_cast<double>(white) / total < 1e-3);
  CHECK(std::abs(static_cast<double>(black) / total -
                 marten::unresolved_fraction(state)) < 0.01);
}

TEST_CASE("ppm encoding is byte-exact") {
  Image px(1, 1);  // defaults to white
  const auto bytes = marten::ppm_bytes(px);
  const std::string expect = std::string("P6\n1 1\n255\n") + "\xff\xff\xff";
  REQUIRE(bytes.size() == 14);
  CHECK(std::string(bytes.begin(), bytes.end()) == expect);
}

TEST_CASE("ppm files round-trip") {
  Image img(5, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) {
      img.set(r, c,
              Rgb{static_cast<std::uint8_t>(marten::keyed_hash(1, r, c, 0) & 0xff),
                  static_cast<std::uint8_t>(marten::keyed_hash(1, r, c, 1) & 0xff),
                  static_cast<std::uint8_t>(marten::keyed_hash(1, r, c, 2) & 0xff)});
    }
  }
  const std::string path = temp_path("roundtrip.ppm");
  marten::write_ppm(path, img);
  const Image back = marten::read_ppm(path);
  REQUIRE(back.width == 5);
  REQUIRE(back.height == 3);
  CHECK(back.pixels == img.pixels);
  std::remove(path.c_str());

  const std::string bad = temp_path("bad.ppm");
  {
    auto f = marten::open_output(bad);
    f << "P5\n1 1\n255\n ";
  }
  CHECK(error_kind_of([&] { marten::read_ppm(bad); }) == ErrorKind::SchemaError);
  {
    auto f = marten::open_output(bad);
    f << "P6\n2 2\n255\nxy";  // truncated pixel payload
  }
  CHECK(error_kind_of([&] { marten::read_ppm(bad); }) == ErrorKind::SchemaError);
  std::remove(bad.c_str());
  CHECK(error_kind_of([&] { marten::read_ppm(temp_path("missing.ppm")); }) ==
        ErrorKind::IoError);
}

TEST_CASE("round-trippable number formatting") {
  CHECK(marten::fmt_g17(1.0) == "1");
  CHECK(marten::fmt_g17(0.25) == "0.25");
  CHECK(marten::fmt_g17(0.1) == "0.10000000000000001");
  for (std::uint64_t i = 0; i < 200; ++i) {
    const double v = (marten::keyed_uniform(3, i, 0, 0) - 0.5) *
                     std::pow(10.0, static_cast<double>(i % 20) - 10.0);
    CHECK(std::strtod(marten::fmt_g17(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("enum names round-trip and reject unknowns") {
  using marten::Algorithm;
  for (Algorithm a : {Algorithm::A, Algorithm::B, Algorithm::Amod}) {
    CHECK(marten::algorithm_from(marten::algorithm_name(a)) == a);
  }
  CHECK(error_kind_of([&] { marten::algorithm_from("C"); }) == ErrorKind::SchemaError);
  CHECK(marten::scheduling_from("per_component") == marten::Scheduling::PerComponent);
  CHECK(marten::scheduling_from("single_event") == marten::Scheduling::SingleEvent);
  CHECK(error_kind_of([&] { marten::scheduling_from("rand"); }) == ErrorKind::SchemaError);
  CHECK(marten::degenerate_rule_from("original") == marten::DegenerateRule::Original);
  CHECK(marten::degenerate_rule_from("change1") == marten::DegenerateRule::Change1);
  CHECK(error_kind_of([&] { marten::degenerate_rule_from("x"); }) ==
        ErrorKind::SchemaError);
}

TEST_CASE("event lines have a frozen layout") {
  marten::SimResult result;
  marten::SimEvent ev;
  ev.step = 1;
  ev.component_id = 0;
  ev.point = marten::Vec2(0.25, 0.75);
  ev.direction = 1;
  ev.placement.band = Rect(0.0, 0.5, 1.0, 0.4);
  result.events.push_back(ev);
  std::ostringstream os;
  marten::write_events_jsonl(os, result);
  CHECK(os.str() ==
        "{\"k\":1,\"component_id\":0,\"point\":[0.25,0.75],\"direction\":1,"
        "\"placement\":{\"type\":\"band\",\"band\":[0,0.5,1,0.40000000000000002],"
        "\"long_axis\":1,\"n_copies\":1}}\n");

  // Variant placements pick distinct type names.
  result.events[0].placement.n_copies = 3;
  std::ostringstream os2;
  marten::write_events_jsonl(os2, result);
  CHECK(os2.str().find("\"type\":\"cell_stack\"") != std::string::npos);
  result.events[0].placement.quadrant = 2;
  std::ostringstream os3;
  marten::write_events_jsonl(os3, result);
  CHECK(os3.str().find("\"type\":\"quadrant_band\"") != std::string::npos);
  CHECK(os3.str().find("\"quadrant\":2") != std::string::npos);
  result.events[0].placement.whole_component = true;
  std::ostringstream os4;
  marten::write_events_jsonl(os4, result);
  CHECK(os4.str().find("\"type\":\"whole_component\"") != std::string::npos);
}

TEST_CASE("series and histogram files have frozen headers") {
  marten::SimResult result;
  result.series.push_back({0, 1.0, 1, 0});
  std::ostringstream os;
  marten::write_series_csv(os, result);
  CHECK(os.str() == "k,volume,n_components,n_events\n0,1,1,0\n");

  marten::Histogram h = marten::make_log_histogram(0.1, 1.0, 1);
  marten::hist_add(h, 0.5);
  marten::hist_add(h, 7.0);
  std::ostringstream hs;
  marten::write_histogram_csv(hs, h);
  CHECK(hs.str() == "bin_lo,bin_hi,count,density\n0.10000000000000001,1,1," +
                        marten::fmt_g17(h.density(0)) + "\n# dropped,1\n");

  marten::BucketStats buckets;
  buckets.volumes[-1] = 0.5;
  buckets.volumes[2] = 0.25;
  buckets.total = 0.75;
  std::ostringstream bs;
  marten::write_buckets_csv(bs, buckets);
  CHECK(bs.str() == "j,volume\n-1,0.5\n2,0.25\n");

  std::ostringstream ss;
  marten::write_sobolev_series_csv(ss, {});
  CHECK(ss.str() ==
        "k,removed,lp_term,gagliardo,std_error,cutoff_bound,norm_estimate,"
        "bound_rhs\n");
}

TEST_CASE("state records carry the configuration") {
  marten::SimConfig cfg;
  cfg.seed = 7;
  cfg.stop.max_steps = 2;
  const marten::SimResult r = marten::run_simulation(cfg);
  std::ostringstream os;
  marten::write_state_json(os, r);
  const std::string s = os.str();
  CHECK(s.find("{\"config\":{\"algorithm\":\"A\",\"delta\":0.40000000000000002,") == 0);
  CHECK(s.find("\"max_steps\":2") != std::string::npos);
  CHECK(s.find("\"min_length\":null") != std::string::npos);
  CHECK(s.find("\"records\":[{\"rect\":[0,0,1,1],\"parent\":-1,\"birth_step\":0,"
               "\"death_step\":1}") != std::string::npos);
}

TEST_CASE("run descriptions parse strictly") {
  const std::string good = R"({
    "sim": {"algorithm": "B", "delta": 0.2, "seed": 9, "max_steps": 7,
             "m": [0.95, 0.0, 0.0, 1.06], "degenerate_rule": "original"},
    "ensemble": {"n_seeds": 4, "base_seed": 100},
    "stats": {"bins_per_decade": 8, "fit_lo": 0.005},
    "sobolev": {"s": 0.25, "p": 2.0, "n_samples": 1000},
    "render": {"width": 64, "height": 48},
    "outputs": {"events": "e.jsonl", "image": "x.ppm"}
  })";
  const marten::RunSpec spec = marten::parse_run_spec(good);
  CHECK(spec.sim.algorithm == marten::Algorithm::B);
  CHECK(spec.sim.delta == 0.2);
  CHECK(spec.sim.seed == 9);
  REQUIRE(spec.sim.stop.max_steps.has_value());
  CHECK(*spec.sim.stop.max_steps == 7);
  CHECK(spec.sim.m.a == 0.95);
  CHECK(spec.sim.degenerate_rule == marten::DegenerateRule::Original);
  CHECK(spec.ensemble.n_seeds == 4);
  CHECK(spec.ensemble.base_seed == 100);
  CHECK(spec.stats.bins_per_decade == 8);
  CHECK(spec.stats.fit_lo == 0.005);
  CHECK(spec.stats.fit_hi == 1e-1);  // untouched default
  CHECK(spec.sobolev.s == 0.25);
  CHECK(spec.sobolev.p == 2.0);
  CHECK(spec.sobolev.n_samples == 1000);
  CHECK(spec.render.width == 64);
  CHECK(spec.render.height == 48);
  CHECK(spec.outputs.events == "e.jsonl");
  CHECK(spec.outputs.image == "x.ppm");

  // Defaults survive an empty description.
  const marten::RunSpec dflt = marten::parse_run_spec("{}");
  CHECK(dflt.sim.algorithm == marten::Algorithm::A);
  CHECK(dflt.sim.delta == 0.4);
  CHECK(dflt.ensemble.n_seeds == 1);

  // Unknown keys name their full path.
  try {
    marten::parse_run_spec(R"({"sim": {"deltas": 0.2}})");
    FAIL("expected a schema error");
  } catch (const marten::Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    CHECK(std::string(e.what()).find("sim.deltas") != std::string::npos);
  }
  CHECK(error_kind_of([&] { marten::parse_run_spec(R"({"simx": {}})"); }) ==
        ErrorKind::SchemaError);
  CHECK(error_kind_of([&] { marten::parse_run_spec("{oops"); }) ==
        ErrorKind::SchemaError);
  CHECK(error_kind_of([&] { marten::parse_run_spec(R"({"sim": {"delta": "x"}})"); }) ==
        ErrorKind::SchemaError);
  CHECK(error_kind_of([&] { marten::parse_run_spec(R"({"sim": {"seed": -4}})"); }) ==
        ErrorKind::SchemaError);
  CHECK(error_kind_of([&] { marten::load_run_spec(temp_path("missing.json")); }) ==
        ErrorKind::IoError);
}
