#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "martensim/geometry.hpp"
#include "martensim/mat2.hpp"

namespace marten {

enum class Algorithm { A, B, Amod };

// What happens when the requested band is at least as thick as the component:
// Original covers the whole component, Change1 inserts a stack of full-height
// unit cells instead so every placement stays block-shaped.
enum class DegenerateRule { Original, Change1 };

// PerComponent: every active component nucleates each step (Algorithm A flavor).
// SingleEvent: one area-weighted nucleation per step (Algorithm B flavor).
enum class Scheduling { PerComponent, SingleEvent };

struct StopRule {
  std::optional<int> max_steps;
  // Components whose best hostable structure is shorter than this freeze.
  std::optional<double> min_length;
};

struct SimConfig {
  Algorithm algorithm = Algorithm::A;
  double delta = 0.4;
  double p = 0.5;  // probability of drawing direction 1
  double gamma = 0.5;
  Mat2 m = Mat2(0.939, 0.0, 0.0, 1.064);  // boundary datum (renormalized on use)
  std::uint64_t seed = 0;
  StopRule stop;
  DegenerateRule degenerate_rule = DegenerateRule::Change1;
  Scheduling scheduling = Scheduling::PerComponent;
  bool argmin_literal = false;  // literal offset-grid rule instead of centering
  int block_depth = 3;
  double bucket_lambda = 1.1;

  void validate() const;
};

// One covered sub-rectangle. Every non-whole placement is a stack of n_copies
// congruent cells along long_axis, each cell of extent thickness/delta.
struct Placement {
  bool whole_component = false;
  Rect band;
  int long_axis = 1;
  int n_copies = 1;
  int quadrant = -1;  // >= 0 when the construction acted inside one quadrant

  double thickness() const { return long_axis == 1 ? band.l2 : band.l1; }
  double extent() const { return long_axis == 1 ? band.l1 : band.l2; }
};

struct SimEvent {
  int step = 0;
  std::int64_t component_id = 0;
  Vec2 point;
  int direction = 1;
  Placement placement;
};

struct ComponentRecord {
  Rect rect;
  std::int64_t parent = -1;
  int birth_step = 0;
  int death_step = -1;  // -1 while alive
};

struct StepRow {
  int step = 0;
  double volume = 0.0;
  std::int64_t n_components = 0;
  std::int64_t n_events = 0;
};

struct SimResult {
  SimConfig config;
  std::vector<SimEvent> events;
  std::vector<StepRow> series;  // row 0 is the initial unit square
  std::vector<ComponentRecord> records;  // index == component id
  std::vector<Rect> final_components;
  int steps_run = 0;
  bool converged = false;  // true when no component could nucleate any more
  double final_volume = 1.0;
};

struct PlaceOutcome {
  Placement placement;
  std::vector<Rect> remainder;  // surviving pieces in creation order
};

// Band of thickness delta * l_dir perpendicular to the short side, spanning
// the full extent along `dir`; degenerate components follow `rule`.
PlaceOutcome place_band(const Rect& comp, const Vec2& point, int dir, double delta,
                        DegenerateRule rule, bool argmin_literal);

// Aspect-ratio-aware variant: near-square components are refined one quadrant
// at a time, very thin ones receive a single full-thickness cell, and the
// remaining shapes take an ordinary band. Never covers a whole component.
PlaceOutcome place_amod(const Rect& comp, const Vec2& point, int dir, double delta,
                        bool argmin_literal);

// Longest structure the component can host when nucleating along `dir`.
double hostable_long_side(const Rect& comp, int dir, const SimConfig& cfg);
bool component_active(const Rect& comp, const SimConfig& cfg);

SimResult run_simulation(const SimConfig& cfg);

// Ids of the step-`step` components descended from `id` (including `id` itself
// if still alive), via the recorded parent links.
std::vector<std::int64_t> descendants_at_step(const SimResult& result, std::int64_t id,
                                              int step);

}  // namespace marten
