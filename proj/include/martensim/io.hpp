#pragma once

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "martensim/blocks.hpp"
#include "martensim/fragment.hpp"
#include "martensim/sobolev.hpp"
#include "martensim/stats.hpp"

namespace marten {

// Round-trippable double formatting ("%.17g"); all writers below use it, so a
// given input produces byte-identical output on every run and thread count.
std::string fmt_g17(double v);

std::ofstream open_output(const std::string& path);  // binary, IoError on failure
std::string slurp_file(const std::string& path);

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from(const std::string& name);
std::string scheduling_name(Scheduling s);
Scheduling scheduling_from(const std::string& name);
std::string degenerate_rule_name(DegenerateRule r);
DegenerateRule degenerate_rule_from(const std::string& name);

// One JSON object per nucleation event, in execution order.
void write_events_jsonl(std::ostream& os, const SimResult& result);
// Per-step totals: "k,volume,n_components,n_events", row 0 is the start state.
void write_series_csv(std::ostream& os, const SimResult& result);
// Full machine-readable run record (config, lineage, survivors).
void write_state_json(std::ostream& os, const SimResult& result);
// "bin_lo,bin_hi,count,density" plus a trailing "# dropped" comment row.
void write_histogram_csv(std::ostream& os, const Histogram& h);
void write_fit_json(std::ostream& os, const PowerLawFit& fit);
// "j,volume" in ascending class order.
void write_buckets_csv(std::ostream& os, const BucketStats& stats);
// Header object followed by one JSON object per region.
void write_microstructure_jsonl(std::ostream& os, const Microstructure& ms);
void write_sobolev_series_csv(std::ostream& os,
                              const std::vector<StepDifferenceRow>& rows);

struct EnsembleSpec {
  int n_seeds = 1;
  std::uint64_t base_seed = 1;
};

struct StatsSpec {
  int bins_per_decade = 16;
  double hist_lo = 1e-4;
  double hist_hi = 1.0;
  double fit_lo = 1e-2;
  double fit_hi = 1e-1;
  double bucket_lambda = 1.1;
  int j1 = -98;
};

struct RenderSpec {
  int width = 512;
  int height = 512;
};

struct OutputSpec {
  std::string events;
  std::string series;
  std::string state;
  std::string histogram;
  std::string fit;
  std::string buckets;
  std::string microstructure;
  std::string image;
  std::string sobolev_series;
};

struct RunSpec {
  SimConfig sim;
  EnsembleSpec ensemble;
  StatsSpec stats;
  SobolevParams sobolev;
  RenderSpec render;
  OutputSpec outputs;
};

// Strict parser: every key must be recognized, unknown keys raise a schema
// error naming the offending path. Missing keys keep their defaults.
RunSpec parse_run_spec(const std::string& json_text);
RunSpec load_run_spec(const std::string& path);

}  // namespace marten
