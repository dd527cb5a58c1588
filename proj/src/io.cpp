#include "martensim/io.hpp"

#include <cstdio>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace marten {

namespace {

using ojson = nlohmann::ordered_json;

std::string rect_array(const Rect& r) {
  return "[" + fmt_g17(r.x0) + "," + fmt_g17(r.y0) + "," + fmt_g17(r.l1) + "," +
         fmt_g17(r.l2) + "]";
}

std::string mat_array(const Mat2& m) {
  return "[" + fmt_g17(m.a) + "," + fmt_g17(m.b) + "," + fmt_g17(m.c) + "," +
         fmt_g17(m.d) + "]";
}

std::string placement_type(const Placement& pl) {
  if (pl.whole_component) return "whole_component";
  if (pl.quadrant >= 0) return "quadrant_band";
  if (pl.n_copies > 1) return "cell_stack";
  return "band";
}

void write_placement(std::ostream& os, const Placement& pl) {
  os << "{\"type\":\"" << placement_type(pl) << "\",\"band\":" << rect_array(pl.band)
     << ",\"long_axis\":" << pl.long_axis << ",\"n_copies\":" << pl.n_copies;
  if (pl.quadrant >= 0) os << ",\"quadrant\":" << pl.quadrant;
  os << "}";
}

void write_config_json(std::ostream& os, const SimConfig& cfg) {
  os << "{\"algorithm\":\"" << algorithm_name(cfg.algorithm) << "\""
     << ",\"delta\":" << fmt_g17(cfg.delta) << ",\"p\":" << fmt_g17(cfg.p)
     << ",\"gamma\":" << fmt_g17(cfg.gamma) << ",\"m\":" << mat_array(cfg.m)
     << ",\"seed\":" << cfg.seed;
  os << ",\"max_steps\":";
  if (cfg.stop.max_steps) {
    os << *cfg.stop.max_steps;
  } else {
    os << "null";
  }
  os << ",\"min_length\":";
  if (cfg.stop.min_length) {
    os << fmt_g17(*cfg.stop.min_length);
  } else {
    os << "null";
  }
  os << ",\"degenerate_rule\":\"" << degenerate_rule_name(cfg.degenerate_rule) << "\""
     << ",\"scheduling\":\"" << scheduling_name(cfg.scheduling) << "\""
     << ",\"argmin_literal\":" << (cfg.argmin_literal ? "true" : "false")
     << ",\"block_depth\":" << cfg.block_depth
     << ",\"bucket_lambda\":" << fmt_g17(cfg.bucket_lambda) << "}";
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  fail(ErrorKind::SchemaError, path + ": " + what);
}

void check_keys(const ojson& o, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!o.is_object()) schema_fail(path, "expected an object");
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(ErrorKind::SchemaError, "unknown key " + path + "." + it.key());
    }
  }
}

void read_number(const ojson& o, const std::string& path, const char* key,
                 double* out) {
  if (!o.contains(key)) return;
  const ojson& v = o.at(key);
  if (!v.is_number()) schema_fail(path + "." + key, "expected a number");
  *out = v.get<double>();
}

void read_int(const ojson& o, const std::string& path, const char* key, int* out) {
  if (!o.contains(key)) return;
  const ojson& v = o.at(key);
  if (!v.is_number_integer()) schema_fail(path + "." + key, "expected an integer");
  *out = v.get<int>();
}

void read_u64(const ojson& o, const std::string& path, const char* key,
              std::uint64_t* out) {
  if (!o.contains(key)) return;
  const ojson& v = o.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    schema_fail(path + "." + key, "expected a non-negative integer");
  }
  *out = v.get<std::uint64_t>();
}

void read_bool(const ojson& o, const std::string& path, const char* key, bool* out) {
  if (!o.contains(key)) return;
  const ojson& v = o.at(key);
  if (!v.is_boolean()) schema_fail(path + "." + key, "expected a boolean");
  *out = v.get<bool>();
}

void read_string(const ojson& o, const std::string& path, const char* key,
                 std::string* out) {
  if (!o.contains(key)) return;
  const ojson& v = o.at(key);
  if (!v.is_string()) schema_fail(path + "." + key, "expected a string");
  *out = v.get<std::string>();
}

void parse_sim(const ojson& o, const std::string& path, SimConfig* sim) {
  check_keys(o, path,
             {"algorithm", "delta", "p", "gamma", "m", "seed", "max_steps",
              "min_length", "degenerate_rule", "scheduling", "argmin_literal",
              "block_depth", "bucket_lambda"});
  std::string name = algorithm_name(sim->algorithm);
  read_string(o, path, "algorithm", &name);
  sim->algorithm = algorithm_from(name);
  read_number(o, path, "delta", &sim->delta);
  read_number(o, path, "p", &sim->p);
  read_number(o, path, "gamma", &sim->gamma);
  if (o.contains("m")) {
    const ojson& v = o.at("m");
    if (!v.is_array() || v.size() != 4 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number() || !v[3].is_number()) {
      schema_fail(path + ".m", "expected an array of 4 numbers");
    }
    sim->m = Mat2(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                  v[3].get<double>());
  }
  read_u64(o, path, "seed", &sim->seed);
  if (o.contains("max_steps")) {
    const ojson& v = o.at("max_steps");
    if (v.is_null()) {
      sim->stop.max_steps.reset();
    } else if (v.is_number_integer()) {
      sim->stop.max_steps = v.get<int>();
    } else {
      schema_fail(path + ".max_steps", "expected an integer or null");
    }
  }
  if (o.contains("min_length")) {
    const ojson& v = o.at("min_length");
    if (v.is_null()) {
      sim->stop.min_length.reset();
    } else if (v.is_number()) {
      sim->stop.min_length = v.get<double>();
    } else {
      schema_fail(path + ".min_length", "expected a number or null");
    }
  }
  std::string rule = degenerate_rule_name(sim->degenerate_rule);
  read_string(o, path, "degenerate_rule", &rule);
  sim->degenerate_rule = degenerate_rule_from(rule);
  std::string sched = scheduling_name(sim->scheduling);
  read_string(o, path, "scheduling", &sched);
  sim->scheduling = scheduling_from(sched);
  read_bool(o, path, "argmin_literal", &sim->argmin_literal);
  read_int(o, path, "block_depth", &sim->block_depth);
  read_number(o, path, "bucket_lambda", &sim->bucket_lambda);
}

}  // namespace

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  return f;
}

std::string slurp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::A:
      return "A";
    case Algorithm::B:
      return "B";
    case Algorithm::Amod:
      return "Amod";
  }
  return "A";
}

Algorithm algorithm_from(const std::string& name) {
  if (name == "A") return Algorithm::A;
  if (name == "B") return Algorithm::B;
  if (name == "Amod") return Algorithm::Amod;
  fail(ErrorKind::SchemaError, "unknown algorithm \"" + name + "\"");
}

std::string scheduling_name(Scheduling s) {
  return s == Scheduling::PerComponent ? "per_component" : "single_event";
}

Scheduling scheduling_from(const std::string& name) {
  if (name == "per_component") return Scheduling::PerComponent;
  if (name == "single_event") return Scheduling::SingleEvent;
  fail(ErrorKind::SchemaError, "unknown scheduling \"" + name + "\"");
}

std::string degenerate_rule_name(DegenerateRule r) {
  return r == DegenerateRule::Original ? "original" : "change1";
}

DegenerateRule degenerate_rule_from(const std::string& name) {
  if (name == "original") return DegenerateRule::Original;
  if (name == "change1") return DegenerateRule::Change1;
  fail(ErrorKind::SchemaError, "unknown degenerate rule \"" + name + "\"");
}

void write_events_jsonl(std::ostream& os, const SimResult& result) {
  for (const SimEvent& ev : result.events) {
    os << "{\"k\":" << ev.step << ",\"component_id\":" << ev.component_id
       << ",\"point\":[" << fmt_g17(ev.point.x) << "," << fmt_g17(ev.point.y)
       << "],\"direction\":" << ev.direction << ",\"placement\":";
    write_placement(os, ev.placement);
    os << "}\n";
  }
}

void write_series_csv(std::ostream& os, const SimResult& result) {
  os << "k,volume,n_components,n_events\n";
  for (const StepRow& row : result.series) {
    os << row.step << "," << fmt_g17(row.volume) << "," << row.n_components << ","
       << row.n_events << "\n";
  }
}

void write_state_json(std::ostream& os, const SimResult& result) {
  os << "{\"config\":";
  write_config_json(os, result.config);
  os << ",\"steps_run\":" << result.steps_run
     << ",\"converged\":" << (result.converged ? "true" : "false")
     << ",\"final_volume\":" << fmt_g17(result.final_volume);
  os << ",\"final_components\":[";
  for (std::size_t i = 0; i < result.final_components.size(); ++i) {
    const Rect& r = result.final_components[i];
    if (i > 0) os << ",";
    os << "[" << fmt_g17(r.x0) << "," << fmt_g17(r.y0) << "," << fmt_g17(r.l1) << ","
       << fmt_g17(r.l2) << "," << r.id << "]";
  }
  os << "],\"records\":[";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const ComponentRecord& rec = result.records[i];
    if (i > 0) os << ",";
    os << "{\"rect\":" << rect_array(rec.rect) << ",\"parent\":" << rec.parent
       << ",\"birth_step\":" << rec.birth_step << ",\"death_step\":" << rec.death_step
       << "}";
  }
  os << "]}\n";
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_lo,bin_hi,count,density\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    os << fmt_g17(h.edges[i]) << "," << fmt_g17(h.edges[i + 1]) << "," << h.counts[i]
       << "," << fmt_g17(h.density(i)) << "\n";
  }
  os << "# dropped," << h.dropped << "\n";
}

void write_fit_json(std::ostream& os, const PowerLawFit& fit) {
  os << "{\"amplitude\":" << fmt_g17(fit.amplitude)
     << ",\"exponent\":" << fmt_g17(fit.exponent)
     << ",\"fit_lo\":" << fmt_g17(fit.fit_lo) << ",\"fit_hi\":" << fmt_g17(fit.fit_hi)
     << ",\"r_squared\":" << fmt_g17(fit.r_squared) << ",\"n_bins\":" << fit.n_bins
     << "}\n";
}

void write_buckets_csv(std::ostream& os, const BucketStats& stats) {
  os << "j,volume\n";
  for (const auto& [j, volume] : stats.volumes) {
    os << j << "," << fmt_g17(volume) << "\n";
  }
}

void write_microstructure_jsonl(std::ostream& os, const Microstructure& ms) {
  os << "{\"domain\":" << rect_array(ms.domain) << ",\"depth\":" << ms.depth
     << ",\"n_regions\":" << ms.regions.size() << "}\n";
  for (const Region& reg : ms.regions) {
    os << "{\"shape_type\":\"";
    switch (reg.shape.type) {
      case ShapeType::Rect:
        os << "rect\",\"coords\":" << rect_array(reg.shape.rect);
        break;
      case ShapeType::Diamond: {
        const Diamond& d = reg.shape.diamond;
        os << "diamond\",\"coords\":[" << fmt_g17(d.center.x) << ","
           << fmt_g17(d.center.y) << "," << fmt_g17(d.d1) << "," << fmt_g17(d.d2)
           << "]";
        break;
      }
      case ShapeType::Triangle: {
        const Triangle& t = reg.shape.tri;
        os << "triangle\",\"coords\":[" << fmt_g17(t.a.x) << "," << fmt_g17(t.a.y)
           << "," << fmt_g17(t.b.x) << "," << fmt_g17(t.b.y) << "," << fmt_g17(t.c.x)
           << "," << fmt_g17(t.c.y) << "]";
        break;
      }
    }
    const char* family = reg.label.family == LabelFamily::Horizontal ? "horizontal"
                         : reg.label.family == LabelFamily::Vertical ? "vertical"
                                                                     : "unresolved";
    os << ",\"label\":{\"family\":\"" << family
       << "\",\"variant\":" << reg.label.variant << ",\"depth\":" << reg.label.depth
       << "},\"matrix\":" << mat_array(reg.matrix) << "}\n";
  }
}

void write_sobolev_series_csv(std::ostream& os,
                              const std::vector<StepDifferenceRow>& rows) {
  os << "k,removed,lp_term,gagliardo,std_error,cutoff_bound,norm_estimate,bound_rhs\n";
  for (const StepDifferenceRow& r : rows) {
    os << r.k << "," << fmt_g17(r.removed) << "," << fmt_g17(r.lp_term) << ","
       << fmt_g17(r.gagliardo) << "," << fmt_g17(r.std_error) << ","
       << fmt_g17(r.cutoff_bound) << "," << fmt_g17(r.norm_estimate) << ","
       << fmt_g17(r.bound_rhs) << "\n";
  }
}

RunSpec parse_run_spec(const std::string& json_text) {
  ojson root;
  try {
    root = ojson::parse(json_text);
  } catch (const std::exception& e) {
    fail(ErrorKind::SchemaError, std::string("invalid json: ") + e.what());
  }
  RunSpec spec;
  check_keys(root, "$", {"sim", "ensemble", "stats", "sobolev", "render", "outputs"});
  if (root.contains("sim")) parse_sim(root.at("sim"), "sim", &spec.sim);
  if (root.contains("ensemble")) {
    const ojson& o = root.at("ensemble");
    check_keys(o, "ensemble", {"n_seeds", "base_seed"});
    read_int(o, "ensemble", "n_seeds", &spec.ensemble.n_seeds);
    read_u64(o, "ensemble", "base_seed", &spec.ensemble.base_seed);
  }
  if (root.contains("stats")) {
    const ojson& o = root.at("stats");
    check_keys(o, "stats",
               {"bins_per_decade", "hist_lo", "hist_hi", "fit_lo", "fit_hi",
                "bucket_lambda", "j1"});
    read_int(o, "stats", "bins_per_decade", &spec.stats.bins_per_decade);
    read_number(o, "stats", "hist_lo", &spec.stats.hist_lo);
    read_number(o, "stats", "hist_hi", &spec.stats.hist_hi);
    read_number(o, "stats", "fit_lo", &spec.stats.fit_lo);
    read_number(o, "stats", "fit_hi", &spec.stats.fit_hi);
    read_number(o, "stats", "bucket_lambda", &spec.stats.bucket_lambda);
    read_int(o, "stats", "j1", &spec.stats.j1);
  }
  if (root.contains("sobolev")) {
    const ojson& o = root.at("sobolev");
    check_keys(o, "sobolev", {"s", "p", "r_min", "n_samples"});
    read_number(o, "sobolev", "s", &spec.sobolev.s);
    read_number(o, "sobolev", "p", &spec.sobolev.p);
    read_number(o, "sobolev", "r_min", &spec.sobolev.r_min);
    read_u64(o, "sobolev", "n_samples", &spec.sobolev.n_samples);
  }
  if (root.contains("render")) {
    const ojson& o = root.at("render");
    check_keys(o, "render", {"width", "height"});
    read_int(o, "render", "width", &spec.render.width);
    read_int(o, "render", "height", &spec.render.height);
  }
  if (root.contains("outputs")) {
    const ojson& o = root.at("outputs");
    check_keys(o, "outputs",
               {"events", "series", "state", "histogram", "fit", "buckets",
                "microstructure", "image", "sobolev_series"});
    read_string(o, "outputs", "events", &spec.outputs.events);
    read_string(o, "outputs", "series", &spec.outputs.series);
    read_string(o, "outputs", "state", &spec.outputs.state);
    read_string(o, "outputs", "histogram", &spec.outputs.histogram);
    read_string(o, "outputs", "fit", &spec.outputs.fit);
    read_string(o, "outputs", "buckets", &spec.outputs.buckets);
    read_string(o, "outputs", "microstructure", &spec.outputs.microstructure);
    read_string(o, "outputs", "image", &spec.outputs.image);
    read_string(o, "outputs", "sobolev_series", &spec.outputs.sobolev_series);
  }
  return spec;
}

RunSpec load_run_spec(const std::string& path) {
  return parse_run_spec(slurp_file(path));
}

}  // namespace marten
