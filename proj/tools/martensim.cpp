#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "martensim/blocks.hpp"
#include "martensim/fragment.hpp"
#include "martensim/io.hpp"
#include "martensim/render.hpp"
#include "martensim/sobolev.hpp"
#include "martensim/stats.hpp"
#include "martensim/threads.hpp"
#include "martensim/verify.hpp"

namespace {

using marten::RunSpec;

struct SimFlags {
  std::string config_path;
  std::optional<std::string> algorithm;
  std::optional<double> delta;
  std::optional<double> p;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_steps;
  std::optional<double> min_length;
  std::optional<std::string> degenerate_rule;
  std::optional<std::string> scheduling;
  bool argmin_literal = false;
  std::optional<int> block_depth;
  std::optional<int> n_seeds;
  std::optional<std::uint64_t> base_seed;
};

void add_sim_flags(CLI::App* cmd, SimFlags* f) {
  cmd->add_option("--config", f->config_path, "JSON run description");
  cmd->add_option("--algorithm", f->algorithm, "A, B or Amod");
  cmd->add_option("--delta", f->delta, "relative band thickness");
  cmd->add_option("--p", f->p, "probability of drawing direction 1");
  cmd->add_option("--gamma", f->gamma, "shear parameter of the wells");
  cmd->add_option("--seed", f->seed, "seed for a single run");
  cmd->add_option("--max-steps", f->max_steps, "stop after this many steps");
  cmd->add_option("--min-length", f->min_length,
                  "freeze components below this hostable length");
  cmd->add_option("--degenerate-rule", f->degenerate_rule, "original or change1");
  cmd->add_option("--scheduling", f->scheduling, "per_component or single_event");
  cmd->add_flag("--argmin-literal", f->argmin_literal,
                "use the literal offset rule instead of centered bands");
  cmd->add_option("--block-depth", f->block_depth, "refinement depth of the blocks");
  cmd->add_option("--seeds", f->n_seeds, "ensemble size (default 1)");
  cmd->add_option("--base-seed", f->base_seed, "first seed of the ensemble");
}

RunSpec build_spec(const SimFlags& f) {
  RunSpec spec;
  if (!f.config_path.empty()) spec = marten::load_run_spec(f.config_path);
  if (f.algorithm) spec.sim.algorithm = marten::algorithm_from(*f.algorithm);
  if (f.delta) spec.sim.delta = *f.delta;
  if (f.p) spec.sim.p = *f.p;
  if (f.gamma) spec.sim.gamma = *f.gamma;
  if (f.seed) spec.sim.seed = *f.seed;
  if (f.max_steps) spec.sim.stop.max_steps = *f.max_steps;
  if (f.min_length) spec.sim.stop.min_length = *f.min_length;
  if (f.degenerate_rule) {
    spec.sim.degenerate_rule = marten::degenerate_rule_from(*f.degenerate_rule);
  }
  if (f.scheduling) spec.sim.scheduling = marten::scheduling_from(*f.scheduling);
  if (f.argmin_literal) spec.sim.argmin_literal = true;
  if (f.block_depth) spec.sim.block_depth = *f.block_depth;
  if (f.n_seeds) spec.ensemble.n_seeds = *f.n_seeds;
  if (f.base_seed) spec.ensemble.base_seed = *f.base_seed;
  spec.sim.validate();
  if (spec.ensemble.n_seeds < 1) {
    marten::fail(marten::ErrorKind::InvalidParameter,
                 "ensemble size must be at least 1");
  }
  return spec;
}

std::string with_seed_suffix(const std::string& path, std::uint64_t seed, bool multi) {
  if (!multi) return path;
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  const std::string tag = ".seed" + std::to_string(seed);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + tag;
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

std::vector<marten::SimResult> run_ensemble(const RunSpec& spec) {
  const int n = spec.ensemble.n_seeds;
  std::vector<marten::SimResult> results(static_cast<std::size_t>(n));
  marten::parallel_for_index(n, marten::thread_budget(), [&](std::int64_t i) {
    marten::SimConfig cfg = spec.sim;
    if (n > 1) cfg.seed = spec.ensemble.base_seed + static_cast<std::uint64_t>(i);
    results[static_cast<std::size_t>(i)] = marten::run_simulation(cfg);
  });
  return results;
}

marten::Histogram pooled_histogram(const RunSpec& spec,
                                   const std::vector<marten::SimResult>& results) {
  const marten::Histogram binspec = marten::make_log_histogram(
      spec.stats.hist_lo, spec.stats.hist_hi, spec.stats.bins_per_decade);
  marten::Histogram pooled = binspec;
  for (const marten::SimResult& r : results) {
    pooled = marten::hist_merge(
        pooled,
        marten::length_histogram(r, marten::LengthMeasure::BandLongSide, binspec));
  }
  return pooled;
}

void write_pooled_outputs(const RunSpec& spec,
                          const std::vector<marten::SimResult>& results) {
  if (!spec.outputs.histogram.empty() || !spec.outputs.fit.empty()) {
    const marten::Histogram pooled = pooled_histogram(spec, results);
    if (!spec.outputs.histogram.empty()) {
      auto f = marten::open_output(spec.outputs.histogram);
      marten::write_histogram_csv(f, pooled);
    }
    if (!spec.outputs.fit.empty()) {
      const marten::PowerLawFit fit =
          marten::fit_power_law(pooled, spec.stats.fit_lo, spec.stats.fit_hi);
      auto f = marten::open_output(spec.outputs.fit);
      marten::write_fit_json(f, fit);
      std::cout << "fit: exponent " << marten::fmt_g17(fit.exponent) << ", r2 "
                << marten::fmt_g17(fit.r_squared) << ", bins " << fit.n_bins << "\n";
    }
  }
  if (!spec.outputs.buckets.empty()) {
    std::vector<marten::Rect> all;
    for (const marten::SimResult& r : results) {
      all.insert(all.end(), r.final_components.begin(), r.final_components.end());
    }
    const marten::BucketParams params =
        marten::BucketParams::from_delta(spec.stats.bucket_lambda, spec.sim.delta);
    auto f = marten::open_output(spec.outputs.buckets);
    marten::write_buckets_csv(f, marten::bucket_volumes(all, params));
  }
}

int run_simulate(const RunSpec& spec) {
  const std::vector<marten::SimResult> results = run_ensemble(spec);
  const bool multi = spec.ensemble.n_seeds > 1;
  const bool need_blocks = !spec.outputs.microstructure.empty() ||
                           !spec.outputs.image.empty() ||
                           !spec.outputs.sobolev_series.empty();
  marten::BlockLibrary lib;
  if (need_blocks) {
    lib = marten::make_block_library(spec.sim.m, spec.sim.gamma, spec.sim.delta,
                                     spec.sim.block_depth);
  }
  for (const marten::SimResult& r : results) {
    const std::uint64_t seed = r.config.seed;
    if (!spec.outputs.events.empty()) {
      auto f = marten::open_output(with_seed_suffix(spec.outputs.events, seed, multi));
      marten::write_events_jsonl(f, r);
    }
    if (!spec.outputs.series.empty()) {
      auto f = marten::open_output(with_seed_suffix(spec.outputs.series, seed, multi));
      marten::write_series_csv(f, r);
    }
    if (!spec.outputs.state.empty()) {
      auto f = marten::open_output(with_seed_suffix(spec.outputs.state, seed, multi));
      marten::write_state_json(f, r);
    }
    if (!spec.outputs.microstructure.empty()) {
      auto f = marten::open_output(
          with_seed_suffix(spec.outputs.microstructure, seed, multi));
      marten::write_microstructure_jsonl(f, marten::assemble_state(r, lib));
    }
    if (!spec.outputs.image.empty()) {
      marten::write_ppm(
          with_seed_suffix(spec.outputs.image, seed, multi),
          marten::render_microstructure(marten::assemble_state(r, lib),
                                        spec.render.width, spec.render.height));
    }
    if (!spec.outputs.sobolev_series.empty()) {
      marten::SobolevParams prm = spec.sobolev;
      prm.seed = r.config.seed;
      auto f = marten::open_output(
          with_seed_suffix(spec.outputs.sobolev_series, seed, multi));
      marten::write_sobolev_series_csv(
          f, marten::step_difference_series(r, lib, prm, 8.0));
    }
    std::cout << "seed " << seed << ": steps " << r.steps_run << ", volume "
              << marten::fmt_g17(r.final_volume) << ", components "
              << r.final_components.size() << (r.converged ? ", converged" : "")
              << "\n";
  }
  write_pooled_outputs(spec, results);
  return 0;
}

int run_stats(const RunSpec& spec) {
  const std::vector<marten::SimResult> results = run_ensemble(spec);
  const marten::Histogram pooled = pooled_histogram(spec, results);
  const marten::PowerLawFit fit =
      marten::fit_power_law(pooled, spec.stats.fit_lo, spec.stats.fit_hi);
  std::cout << "fit: exponent " << marten::fmt_g17(fit.exponent) << ", r2 "
            << marten::fmt_g17(fit.r_squared) << ", bins " << fit.n_bins << "\n";
  double covered = 0.0;
  for (const marten::SimResult& r : results) covered += 1.0 - r.final_volume;
  std::cout << "mean covered fraction "
            << marten::fmt_g17(covered / static_cast<double>(results.size()))
            << " over " << results.size() << " run(s)\n";
  if (!spec.outputs.histogram.empty()) {
    auto f = marten::open_output(spec.outputs.histogram);
    marten::write_histogram_csv(f, pooled);
  }
  if (!spec.outputs.fit.empty()) {
    auto f = marten::open_output(spec.outputs.fit);
    marten::write_fit_json(f, fit);
  }
  if (!spec.outputs.buckets.empty()) {
    std::vector<marten::Rect> all;
    for (const marten::SimResult& r : results) {
      all.insert(all.end(), r.final_components.begin(), r.final_components.end());
    }
    const marten::BucketParams params =
        marten::BucketParams::from_delta(spec.stats.bucket_lambda, spec.sim.delta);
    auto f = marten::open_output(spec.outputs.buckets);
    marten::write_buckets_csv(f, marten::bucket_volumes(all, params));
  }
  return 0;
}

int run_render(const RunSpec& spec, const std::string& out_path,
               std::optional<double> census_min_scale) {
  marten::Microstructure ms;
  if (census_min_scale) {
    const marten::Wells wells = marten::make_wells(spec.sim.gamma);
    const marten::Mat2 m = marten::make_boundary_data(spec.sim.m, wells);
    ms = marten::census_block(marten::Orientation::Horizontal, m, spec.sim.delta,
                              *census_min_scale);
  } else {
    const marten::SimResult r = marten::run_simulation(spec.sim);
    const marten::BlockLibrary lib = marten::make_block_library(
        spec.sim.m, spec.sim.gamma, spec.sim.delta, spec.sim.block_depth);
    ms = marten::assemble_state(r, lib);
  }
  marten::write_ppm(out_path, marten::render_microstructure(ms, spec.render.width,
                                                            spec.render.height));
  std::cout << "wrote " << out_path << " (" << spec.render.width << "x"
            << spec.render.height << ")\n";
  return 0;
}

int run_verify(bool fast, int criterion, const std::string& report_path,
               double contraction_override) {
  marten::VerifyOptions opt;
  opt.fast = fast;
  opt.threads = marten::thread_budget();
  opt.contraction_override = contraction_override;
  std::vector<marten::CriterionResult> results;
  if (criterion > 0) {
    results.push_back(marten::run_criterion(criterion, opt));
  } else {
    results = marten::run_all_criteria(opt);
  }
  marten::print_criterion_lines(std::cout, results);
  if (!report_path.empty()) {
    auto f = marten::open_output(report_path);
    marten::write_verify_report(f, results, opt);
  }
  return marten::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic martensitic fragmentation simulator and analysis tool"};
  app.require_subcommand(1);

  SimFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "Run one seed or an ensemble");
  add_sim_flags(sim, &sim_flags);
  std::string out_events, out_series, out_state, out_micro, out_image, out_hist,
      out_fit, out_buckets, out_sob;
  sim->add_option("--events", out_events, "events output (jsonl)");
  sim->add_option("--series", out_series, "per-step series output (csv)");
  sim->add_option("--state", out_state, "full state output (json)");
  sim->add_option("--microstructure", out_micro, "region decomposition (jsonl)");
  sim->add_option("--image", out_image, "rendered state (ppm)");
  sim->add_option("--histogram", out_hist, "pooled long-side histogram (csv)");
  sim->add_option("--fit", out_fit, "pooled power-law fit (json)");
  sim->add_option("--buckets", out_buckets, "aspect-class volumes (csv)");
  sim->add_option("--sobolev-series", out_sob, "step-difference norms (csv)");

  SimFlags stats_flags;
  CLI::App* stats = app.add_subcommand("stats", "Length statistics of an ensemble");
  add_sim_flags(stats, &stats_flags);
  std::string st_hist, st_fit, st_buckets;
  stats->add_option("--histogram", st_hist, "histogram output (csv)");
  stats->add_option("--fit", st_fit, "power-law fit output (json)");
  stats->add_option("--buckets", st_buckets, "aspect-class volumes (csv)");

  SimFlags render_flags;
  CLI::App* render = app.add_subcommand("render", "Draw a state as a ppm image");
  add_sim_flags(render, &render_flags);
  std::string render_out;
  std::optional<int> render_w, render_h;
  std::optional<double> census_scale;
  render->add_option("--out", render_out, "output image path")->required();
  render->add_option("--width", render_w, "image width");
  render->add_option("--height", render_h, "image height");
  render->add_option("--census-min-scale", census_scale,
                     "draw the unrefined scale census instead of a simulation");

  CLI::App* verify = app.add_subcommand("verify", "Run the built-in checks");
  bool v_fast = false;
  bool v_full = false;
  int v_criterion = 0;
  std::string v_report;
  double v_override = -1.0;
  verify->add_flag("--fast", v_fast, "reduced sizes, a few seconds per check");
  verify->add_flag("--full", v_full, "full ensemble sizes (default)");
  verify->add_option("--criterion", v_criterion, "run a single check (1-10)");
  verify->add_option("--report", v_report, "write a JSON report");
  verify->add_option("--override-contraction", v_override,
                     "self-test hook: replace the pinned contraction factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      RunSpec spec = build_spec(sim_flags);
      if (!out_events.empty()) spec.outputs.events = out_events;
      if (!out_series.empty()) spec.outputs.series = out_series;
      if (!out_state.empty()) spec.outputs.state = out_state;
      if (!out_micro.empty()) spec.outputs.microstructure = out_micro;
      if (!out_image.empty()) spec.outputs.image = out_image;
      if (!out_hist.empty()) spec.outputs.histogram = out_hist;
      if (!out_fit.empty()) spec.outputs.fit = out_fit;
      if (!out_buckets.empty()) spec.outputs.buckets = out_buckets;
      if (!out_sob.empty()) spec.outputs.sobolev_series = out_sob;
      return run_simulate(spec);
    }
    if (stats->parsed()) {
      RunSpec spec = build_spec(stats_flags);
      if (!st_hist.empty()) spec.outputs.histogram = st_hist;
      if (!st_fit.empty()) spec.outputs.fit = st_fit;
      if (!st_buckets.empty()) spec.outputs.buckets = st_buckets;
      return run_stats(spec);
    }
    if (render->parsed()) {
      RunSpec spec = build_spec(render_flags);
      if (render_w) spec.render.width = *render_w;
      if (render_h) spec.render.height = *render_h;
      return run_render(spec, render_out, census_scale);
    }
    if (verify->parsed()) {
      if (v_fast && v_full) {
        std::cerr << "error: --fast and --full are mutually exclusive\n";
        return 2;
      }
      if (v_criterion < 0 || v_criterion > marten::criterion_count()) {
        std::cerr << "error: --criterion must be between 1 and "
                  << marten::criterion_count() << "\n";
        return 2;
      }
      return run_verify(v_fast, v_criterion, v_report, v_override);
    }
  } catch (const marten::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
