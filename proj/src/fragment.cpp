#include "martensim/fragment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "martensim/rng.hpp"

namespace marten {

namespace {

constexpr double kVolumeTol = 1e-9;
constexpr double kEligibleAreaFloor = 1e-9;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Perpendicular offset of a band of thickness `t` inside [lo, hi] nucleated at
// coordinate `pos`. Centered rule by default; the literal rule instead slides
// by a fraction of the undeflated length `len` and favors the half-way offset,
// which need not keep the nucleation point inside the band.
double band_lower_edge(double pos, double t, double lo, double hi, double len,
                       bool argmin_literal) {
  if (!argmin_literal) {
    return clamp(pos - 0.5 * t, lo, hi - t);
  }
  const double s_lo = std::max(0.0, (pos + t - hi) / len);
  const double s_hi = std::min(1.0, (pos - lo) / len);
  const double s = clamp(0.5, s_lo, s_hi);
  return clamp(pos - s * len, lo, hi - t);
}

void check_place_inputs(const Rect& comp, const Vec2& point, int dir, double delta) {
  if (dir != 1 && dir != 2) {
    fail(ErrorKind::InvalidParameter, "direction must be 1 or 2");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    fail(ErrorKind::InvalidParameter, "thickness fraction must lie in (0,1)");
  }
  if (!(comp.l1 > 0.0) || !(comp.l2 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "component must have positive sides");
  }
  if (!comp.contains(point)) {
    fail(ErrorKind::InvalidPoint, "nucleation point outside the component");
  }
}

// Band spanning the full `dir` extent with perpendicular thickness `t`,
// nucleated at `point`; appends the one or two surviving slabs.
Placement proper_band(const Rect& comp, const Vec2& point, int dir, double t,
                      bool argmin_literal, std::vector<Rect>* remainder) {
  Placement pl;
  pl.long_axis = dir;
  pl.n_copies = 1;
  if (dir == 1) {
    const double lo = comp.y0, hi = comp.y1();
    const double b = band_lower_edge(point.y, t, lo, hi, comp.l1, argmin_literal);
    pl.band = Rect(comp.x0, b, comp.l1, t);
    if (b - lo > 0.0) remainder->push_back(Rect(comp.x0, lo, comp.l1, b - lo));
    if (hi - (b + t) > 0.0) remainder->push_back(Rect(comp.x0, b + t, comp.l1, hi - (b + t)));
  } else {
    const double lo = comp.x0, hi = comp.x1();
    const double b = band_lower_edge(point.x, t, lo, hi, comp.l2, argmin_literal);
    pl.band = Rect(b, comp.y0, t, comp.l2);
    if (b - lo > 0.0) remainder->push_back(Rect(lo, comp.y0, b - lo, comp.l2));
    if (hi - (b + t) > 0.0) remainder->push_back(Rect(b + t, comp.y0, hi - (b + t), comp.l2));
  }
  return pl;
}

// Stack of `n` full-thickness cells covering extent `w` along `dir`, centered
// at the nucleation point and clamped inside; appends the surviving ends.
Placement cell_stack(const Rect& comp, const Vec2& point, int dir, double w, int n,
                     std::vector<Rect>* remainder) {
  Placement pl;
  pl.long_axis = dir;
  pl.n_copies = n;
  if (dir == 1) {
    const double b = clamp(point.x - 0.5 * w, comp.x0, comp.x1() - w);
    pl.band = Rect(b, comp.y0, w, comp.l2);
    if (b - comp.x0 > 0.0) remainder->push_back(Rect(comp.x0, comp.y0, b - comp.x0, comp.l2));
    if (comp.x1() - (b + w) > 0.0) {
      remainder->push_back(Rect(b + w, comp.y0, comp.x1() - (b + w), comp.l2));
    }
  } else {
    const double b = clamp(point.y - 0.5 * w, comp.y0, comp.y1() - w);
    pl.band = Rect(comp.x0, b, comp.l1, w);
    if (b - comp.y0 > 0.0) remainder->push_back(Rect(comp.x0, comp.y0, comp.l1, b - comp.y0));
    if (comp.y1() - (b + w) > 0.0) {
      remainder->push_back(Rect(comp.x0, b + w, comp.l1, comp.y1() - (b + w)));
    }
  }
  return pl;
}

int degenerate_copy_count(double t, double l_perp) {
  const int n = static_cast<int>(std::floor(t / l_perp + 1e-9));
  return std::max(n, 1);
}

}  // namespace

PlaceOutcome place_band(const Rect& comp, const Vec2& point, int dir, double delta,
                        DegenerateRule rule, bool argmin_literal) {
  check_place_inputs(comp, point, dir, delta);
  PlaceOutcome out;
  const double l_dir = comp.side(dir);
  const double l_perp = comp.side(3 - dir);
  const double t = delta * l_dir;
  if (t < l_perp) {
    out.placement = proper_band(comp, point, dir, t, argmin_literal, &out.remainder);
    return out;
  }
  if (rule == DegenerateRule::Original) {
    out.placement.whole_component = true;
    out.placement.band = comp;
    out.placement.long_axis = comp.l1 >= comp.l2 ? 1 : 2;
    out.placement.n_copies = 1;
    return out;
  }
  const int n = degenerate_copy_count(t, l_perp);
  const double w = std::min(static_cast<double>(n) * l_perp / delta, l_dir);
  out.placement = cell_stack(comp, point, dir, w, n, &out.remainder);
  return out;
}

PlaceOutcome place_amod(const Rect& comp, const Vec2& point, int dir, double delta,
                        bool argmin_literal) {
  check_place_inputs(comp, point, dir, delta);
  PlaceOutcome out;
  const double inv_delta = 1.0 / delta;
  const double aspect = comp.aspect();

  if (aspect >= 0.5 * inv_delta && aspect <= 2.0 * inv_delta) {
    // Near the critical aspect ratio: refine only the quadrant containing the
    // nucleation point; the other three quadrants survive as components.
    const int qi = quadrant_of(comp, point);
    const auto quads = rect_quadrants(comp);
    for (int i = 0; i < 4; ++i) {
      if (i != qi) out.remainder.push_back(quads[i]);
    }
    const Rect& q = quads[qi];
    const double l_dir = q.side(dir);
    const double l_perp = q.side(3 - dir);
    std::vector<Rect> q_rest;
    if (l_dir / l_perp <= inv_delta) {
      const double t = delta * l_dir;
      if (t >= l_perp) {
        // Thickness meets the quadrant height exactly at the boundary ratio:
        // the band is the whole quadrant (which is not itself a component).
        Placement pl;
        pl.long_axis = dir;
        pl.n_copies = 1;
        pl.band = q;
        out.placement = pl;
      } else {
        out.placement = proper_band(q, point, dir, t, argmin_literal, &q_rest);
      }
    } else {
      out.placement = cell_stack(q, point, dir, inv_delta * l_perp, 1, &q_rest);
    }
    out.placement.quadrant = qi;
    for (const Rect& r : q_rest) out.remainder.push_back(r);
    return out;
  }

  const double l_dir = comp.side(dir);
  const double l_perp = comp.side(3 - dir);
  if (delta * l_dir > 2.0 * l_perp) {
    out.placement = cell_stack(comp, point, dir, inv_delta * l_perp, 1, &out.remainder);
    return out;
  }

  const double t = delta * l_dir;
  if (t >= l_perp) {
    // Unreachable: a degenerate directed ratio forces the component into one
    // of the two branches above.
    fail(ErrorKind::GeometryError, "unexpected degenerate band");
  }
  out.placement = proper_band(comp, point, dir, t, argmin_literal, &out.remainder);
  return out;
}

double hostable_long_side(const Rect& comp, int dir, const SimConfig& cfg) {
  const double l_dir = comp.side(dir);
  const double l_perp = comp.side(3 - dir);
  const double inv_delta = 1.0 / cfg.delta;
  if (cfg.algorithm == Algorithm::Amod) {
    const double aspect = comp.aspect();
    if (aspect >= 0.5 * inv_delta && aspect <= 2.0 * inv_delta) {
      // All quadrants are congruent, so the sub-structure size is point-free.
      const double qd = 0.5 * l_dir;
      const double qp = 0.5 * l_perp;
      return qd / qp <= inv_delta ? qd : inv_delta * qp;
    }
    if (cfg.delta * l_dir > 2.0 * l_perp) {
      return inv_delta * l_perp;
    }
    return l_dir;
  }
  const double t = cfg.delta * l_dir;
  if (t < l_perp) {
    return l_dir;
  }
  if (cfg.degenerate_rule == DegenerateRule::Original) {
    return comp.long_side();
  }
  const int n = degenerate_copy_count(t, l_perp);
  return std::min(static_cast<double>(n) * l_perp / cfg.delta, l_dir);
}

bool component_active(const Rect& comp, const SimConfig& cfg) {
  if (!(comp.l1 > 0.0) || !(comp.l2 > 0.0)) {
    return false;
  }
  if (!cfg.stop.min_length) {
    return true;
  }
  const double need = *cfg.stop.min_length;
  return hostable_long_side(comp, 1, cfg) >= need ||
         hostable_long_side(comp, 2, cfg) >= need;
}

void SimConfig::validate() const {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    fail(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    fail(ErrorKind::InvalidParameter, "direction probability must lie in (0,1)");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    fail(ErrorKind::InvalidParameter, "gamma must be finite and positive");
  }
  if (algorithm == Algorithm::Amod && std::abs(p - 0.5) > 1e-12) {
    fail(ErrorKind::InvalidParameter,
         "the quadrant-refining algorithm requires equal direction probabilities");
  }
  if (stop.min_length && !(*stop.min_length > 0.0)) {
    fail(ErrorKind::InvalidParameter, "min_length must be positive when set");
  }
  if (stop.max_steps && *stop.max_steps < 0) {
    fail(ErrorKind::InvalidParameter, "max_steps must be non-negative");
  }
  if (!stop.max_steps && !stop.min_length) {
    fail(ErrorKind::InvalidParameter, "a stopping rule is required");
  }
  if (block_depth < 0 || block_depth > 12) {
    fail(ErrorKind::InvalidParameter, "block depth out of range [0, 12]");
  }
  if (!(bucket_lambda > 1.0)) {
    fail(ErrorKind::InvalidParameter, "bucket_lambda must exceed 1");
  }
}

namespace {

// Prefix-sum tree over component areas keyed by component id, so the
// area-weighted pick costs O(log n) and replays deterministically.  Growth
// rebuilds the tree at capacity doublings: a freshly appended internal node
// must cover the sums of earlier positions, so a plain resize would corrupt
// every prefix that crosses it.
class Fenwick {
 public:
  void ensure(std::size_t n) {
    if (n <= values_.size()) return;
    values_.resize(n, 0.0);
    if (n > tree_.size()) {
      std::size_t cap = tree_.empty() ? 8 : tree_.size();
      while (cap < n) cap *= 2;
      tree_.assign(cap, 0.0);
      std::copy(values_.begin(), values_.end(), tree_.begin());
      for (std::size_t j = 1; j <= cap; ++j) {
        const std::size_t k = j + (j & (~j + 1));
        if (k <= cap) tree_[k - 1] += tree_[j - 1];
      }
    }
  }
  void add(std::size_t i, double delta) {
    values_[i] += delta;
    for (std::size_t j = i + 1; j <= tree_.size(); j += j & (~j + 1)) {
      tree_[j - 1] += delta;
    }
  }
  double prefix(std::size_t i) const {  // sum of [0, i)
    double s = 0.0;
    for (std::size_t j = i; j > 0; j -= j & (~j + 1)) {
      s += tree_[j - 1];
    }
    return s;
  }
  double total() const { return prefix(tree_.size()); }
  // Smallest index whose inclusive prefix sum reaches `target`.
  std::size_t pick(double target) const {
    std::size_t pos = 0;
    std::size_t mask = 1;
    while (mask < tree_.size()) mask <<= 1;
    double rem = target;
    for (; mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= tree_.size() && tree_[next - 1] < rem) {
        rem -= tree_[next - 1];
        pos = next;
      }
    }
    return pos;  // may equal size when target exceeds the total
  }

 private:
  std::vector<double> values_;
  std::vector<double> tree_;
};

struct Engine {
  const SimConfig& cfg;
  SimResult result;
  std::vector<Rect> components;  // alive, ascending id
  double volume = 1.0;
  Fenwick eligible;  // areas of active components, by id
  std::int64_t next_id = 0;

  explicit Engine(const SimConfig& c) : cfg(c) {}

  std::int64_t add_component(const Rect& r, std::int64_t parent, int birth) {
    Rect stored = r;
    stored.id = next_id++;
    components.push_back(stored);
    result.records.push_back({stored, parent, birth, -1});
    eligible.ensure(static_cast<std::size_t>(next_id));
    if (component_active(stored, cfg)) {
      eligible.add(static_cast<std::size_t>(stored.id), stored.area());
    }
    return stored.id;
  }

  void kill(std::size_t pos_in_components, int step) {
    const Rect r = components[pos_in_components];
    if (component_active(r, cfg)) {
      eligible.add(static_cast<std::size_t>(r.id), -r.area());
    }
    result.records[static_cast<std::size_t>(r.id)].death_step = step;
    components.erase(components.begin() + static_cast<std::ptrdiff_t>(pos_in_components));
  }

  PlaceOutcome place(const Rect& comp, const Vec2& point, int dir) const {
    if (cfg.algorithm == Algorithm::Amod) {
      return place_amod(comp, point, dir, cfg.delta, cfg.argmin_literal);
    }
    return place_band(comp, point, dir, cfg.delta, cfg.degenerate_rule,
                      cfg.argmin_literal);
  }

  SimEvent nucleate(std::size_t pos, int step) {
    const Rect comp = components[pos];
    const auto id = static_cast<std::uint64_t>(comp.id);
    const double u1 = keyed_uniform(cfg.seed, static_cast<std::uint64_t>(step), id, 0);
    const double u2 = keyed_uniform(cfg.seed, static_cast<std::uint64_t>(step), id, 1);
    const double u3 = keyed_uniform(cfg.seed, static_cast<std::uint64_t>(step), id, 2);
    SimEvent ev;
    ev.step = step;
    ev.component_id = comp.id;
    ev.point = Vec2(comp.x0 + u1 * comp.l1, comp.y0 + u2 * comp.l2);
    ev.direction = u3 < cfg.p ? 1 : 2;
    PlaceOutcome outcome = place(comp, ev.point, ev.direction);
    ev.placement = outcome.placement;
    kill(pos, step);
    for (const Rect& r : outcome.remainder) {
      add_component(r, comp.id, step);
    }
    volume -= outcome.placement.band.area();
    return ev;
  }

  // One synchronized round: every active component nucleates independently.
  std::int64_t step_per_component(int step) {
    std::vector<std::int64_t> todo;
    for (const Rect& r : components) {
      if (component_active(r, cfg)) todo.push_back(r.id);
    }
    std::int64_t events = 0;
    for (std::int64_t id : todo) {
      const auto it = std::lower_bound(
          components.begin(), components.end(), id,
          [](const Rect& r, std::int64_t key) { return r.id < key; });
      const auto pos = static_cast<std::size_t>(it - components.begin());
      result.events.push_back(nucleate(pos, step));
      ++events;
    }
    return events;
  }

  // One area-weighted nucleation in a single component.
  std::int64_t step_single_event(int step) {
    const double total = eligible.total();
    if (total < kEligibleAreaFloor) {
      return 0;
    }
    const double u = keyed_uniform(cfg.seed, static_cast<std::uint64_t>(step), ~0ull, 3);
    std::size_t id = eligible.pick(u * total);
    if (id >= static_cast<std::size_t>(next_id)) {
      id = static_cast<std::size_t>(next_id) - 1;
    }
    auto it = std::lower_bound(
        components.begin(), components.end(), static_cast<std::int64_t>(id),
        [](const Rect& r, std::int64_t key) { return r.id < key; });
    // The target can land exactly on a prefix boundary, selecting the start of
    // a zero-weight run; the intended component is the next active one.
    while (it != components.end() && !component_active(*it, cfg)) {
      ++it;
    }
    if (it == components.end()) {
      fail(ErrorKind::GeometryError, "area-weighted pick found no active component");
    }
    const auto pos = static_cast<std::size_t>(it - components.begin());
    result.events.push_back(nucleate(pos, step));
    return 1;
  }

  bool any_active() const {
    for (const Rect& r : components) {
      if (component_active(r, cfg)) return true;
    }
    return false;
  }
};

}  // namespace

SimResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  Engine eng(cfg);
  eng.result.config = cfg;
  eng.add_component(Rect(0.0, 0.0, 1.0, 1.0), -1, 0);
  eng.result.series.push_back({0, 1.0, 1, 0});

  const bool single_event =
      cfg.algorithm == Algorithm::B || cfg.scheduling == Scheduling::SingleEvent;
  int step = 0;
  while (true) {
    if (cfg.stop.max_steps && step >= *cfg.stop.max_steps) {
      break;
    }
    if (single_event) {
      if (eng.eligible.total() < kEligibleAreaFloor) {
        eng.result.converged = true;
        break;
      }
    } else if (!eng.any_active()) {
      eng.result.converged = true;
      break;
    }
    ++step;
    const std::int64_t events = single_event ? eng.step_single_event(step)
                                             : eng.step_per_component(step);
    if (events == 0) {
      --step;
      eng.result.converged = true;
      break;
    }
    eng.result.series.push_back(
        {step, eng.volume, static_cast<std::int64_t>(eng.components.size()), events});
  }

  eng.result.steps_run = step;
  eng.result.final_components = eng.components;
  eng.result.final_volume = eng.volume;

  double audit = 0.0;
  for (const Rect& r : eng.components) audit += r.area();
  if (std::abs(audit - eng.volume) > kVolumeTol) {
    fail(ErrorKind::GeometryError, "volume bookkeeping drifted");
  }
  return eng.result;
}

std::vector<std::int64_t> descendants_at_step(const SimResult& result, std::int64_t id,
                                              int step) {
  if (id < 0 || static_cast<std::size_t>(id) >= result.records.size()) {
    fail(ErrorKind::InvalidParameter, "unknown component id");
  }
  std::vector<std::vector<std::int64_t>> children(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const std::int64_t parent = result.records[i].parent;
    if (parent >= 0) {
      children[static_cast<std::size_t>(parent)].push_back(static_cast<std::int64_t>(i));
    }
  }
  std::vector<std::int64_t> out;
  std::deque<std::int64_t> queue{id};
  while (!queue.empty()) {
    const std::int64_t cur = queue.front();
    queue.pop_front();
    const ComponentRecord& rec = result.records[static_cast<std::size_t>(cur)];
    if (rec.birth_step <= step && (rec.death_step < 0 || rec.death_step > step)) {
      out.push_back(cur);
      continue;  // alive at `step`: descendants are born strictly later
    }
    if (rec.birth_step > step) {
      continue;
    }
    for (std::int64_t child : children[static_cast<std::size_t>(cur)]) {
      queue.push_back(child);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace marten
