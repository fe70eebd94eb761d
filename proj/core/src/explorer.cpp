#include "dse/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dse/errors.hpp"

namespace dse {

const char* to_string(Awareness a) {
  switch (a) {
    case Awareness::Sa: return "sa";
    case Awareness::Task: return "task";
    case Awareness::TaskBlock: return "taskblock";
    case Awareness::Full: return "full";
  }
  return "?";
}

Awareness parse_awareness(const std::string& s) {
  for (Awareness a : {Awareness::Sa, Awareness::Task, Awareness::TaskBlock, Awareness::Full})
    if (s == to_string(a)) return a;
  throw SchemaError("unknown awareness level '" + s + "' (expected sa, task, taskblock or full)");
}

const char* to_string(Boundedness b) { return b == Boundedness::Computation ? "computation" : "communication"; }

const char* high_level_of(MoveType t) {
  switch (t) {
    case MoveType::Migrate: return "mapping";
    case MoveType::Join:
    case MoveType::Fork: return "allocation";
    case MoveType::Swap:
    case MoveType::ForkSwap: return "customization";
  }
  return "?";
}

void ExplorerConfig::validate() const {
  if (neighbors == 0) throw InvalidSpecError("neighbors must be >= 1");
  if (!(cooling > 0.0 && cooling < 1.0)) throw InvalidSpecError("cooling must lie in (0, 1)");
  if (t0 < 0.0 || t0_factor <= 0.0) throw InvalidSpecError("temperature must be positive");
  if (epsilon < 0.0 || epsilon > 1.0) throw InvalidSpecError("epsilon must lie in [0, 1]");
  for (double w : weights)
    if (!(w >= 0.0)) throw InvalidSpecError("move weights must be non-negative");
  if (threads == 0) throw InvalidSpecError("threads must be >= 1");
}

bool MoveMenu::empty() const {
  return std::all_of(options.begin(), options.end(), [](const auto& v) { return v.empty(); });
}

// ---------------------------------------------------------------- selection

Metric select_metric(const SimResult& result, const Budget& budget, double epsilon, Rng& rng) {
  auto terms = metric_terms(MetricValues::from(result), budget);
  std::vector<const MetricTerm*> unmet;
  for (const auto& t : terms)
    if (!t.met()) unmet.push_back(&t);
  if (unmet.empty()) throw AllMetricsMetError("every metric is within budget");

  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) {
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, unmet.size() - 1)(rng);
    return unmet[i]->metric;
  }
  const MetricTerm* best = unmet.front();
  for (const auto* t : unmet)
    if (t->overshoot > best->overshoot) best = t;
  return best->metric;
}

std::vector<TaskKey> block_users(const SimResult& result, const BlockId& block) {
  std::vector<TaskKey> out;
  for (const auto& t : result.tasks)
    if (t.pe == block || t.energy_j.count(block)) out.push_back(t.key);
  return out;
}

namespace {

std::optional<TaskKey> dominant_task(const SimResult& result, const BlockId& block) {
  std::optional<TaskKey> best;
  double most = -1.0;
  for (const auto& t : result.tasks) {
    auto it = t.energy_j.find(block);
    if (it != t.energy_j.end() && it->second > most) {
      most = it->second;
      best = t.key;
    }
  }
  if (!best)
    for (const auto& t : result.tasks)
      if (t.pe == block) return t.key;
  return best;
}

}  // namespace

Selection select_task_block(const SimResult& result, const Metric& metric, const DesignPoint& design,
                            std::size_t k) {
  if (k == 0) throw InvalidSpecError("escalation level starts at 1");
  Selection sel;
  sel.metric = metric;
  if (metric.kind == MetricKind::Latency) {
    std::vector<const TaskStats*> ranked;
    for (const auto& t : result.tasks)
      if (t.key.workload == metric.workload) ranked.push_back(&t);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const TaskStats* a, const TaskStats* b) { return a->duration_s() > b->duration_s(); });
    if (k > ranked.size())
      throw ExhaustedCandidatesError("no task ranked " + std::to_string(k) + " in workload " + metric.workload);
    const TaskStats& t = *ranked[k - 1];
    sel.task = t.key;
    sel.block = t.dominant_bottleneck();
    return sel;
  }

  const auto& table = metric.kind == MetricKind::Power ? result.block_energy_j : result.block_area_mm2;
  std::vector<std::pair<BlockId, double>> ranked;
  for (const auto& [id, _] : design.topology.blocks()) {
    auto it = table.find(id);
    ranked.emplace_back(id, it == table.end() ? 0.0 : it->second);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (k > ranked.size()) throw ExhaustedCandidatesError("no block ranked " + std::to_string(k));
  sel.block = ranked[k - 1].first;
  sel.task = dominant_task(result, sel.block);
  return sel;
}

bool tasks_parallel(const WorkloadSet& workloads, const TaskKey& a, const TaskKey& b) {
  if (a == b) return false;
  if (a.workload != b.workload) return true;
  for (const auto& g : workloads)
    if (g.name() == a.workload) return g.parallel(g.index_of(a.task), g.index_of(b.task));
  return false;
}

namespace {

std::vector<BlockId> task_mems(const DesignPoint& d, const WorkloadSet& workloads, const TaskKey& t) {
  std::set<BlockId> mems;
  mems.insert(d.mapping.task_to_mem.at(t));
  for (const auto& g : workloads) {
    if (g.name() != t.workload) continue;
    std::size_t i = g.index_of(t.task);
    for (std::size_t e : g.in_edges(i)) mems.insert(d.edge_mem(g.name(), g.edges()[e]));
  }
  return {mems.begin(), mems.end()};
}

std::size_t hops_between(const DesignPoint& d, const BlockId& pe, const BlockId& mem) {
  try {
    return route(d, pe, mem).size();
  } catch (const UnreachableError&) {
    return std::numeric_limits<std::size_t>::max() / 4;
  }
}

std::size_t max_hops(const DesignPoint& d, const WorkloadSet& workloads, const TaskKey& t) {
  std::size_t h = 0;
  const BlockId& pe = d.mapping.task_to_pe.at(t);
  for (const auto& m : task_mems(d, workloads, t)) h = std::max(h, hops_between(d, pe, m));
  return h;
}

bool block_hosts_parallel(const SimResult& result, const WorkloadSet& workloads, const TaskKey& t,
                          const BlockId& block) {
  for (const auto& u : block_users(result, block))
    if (tasks_parallel(workloads, t, u)) return true;
  return false;
}

// Whether `t` overlaps some task placed on a different block of the same class as `block`.
bool parallel_elsewhere(const DesignPoint& d, const SimResult& result, const WorkloadSet& workloads,
                        const TaskKey& t, const BlockId& block) {
  const BlockKind kind = d.topology.block(block).kind;
  auto users = block_users(result, block);
  std::set<TaskKey> here(users.begin(), users.end());
  for (const auto& s : result.tasks) {
    if (here.count(s.key)) continue;
    if (!is_noc(kind)) {
      const auto& table = is_mem(kind) ? d.mapping.task_to_mem : d.mapping.task_to_pe;
      auto it = table.find(s.key);
      if (it == table.end() || it->second == block) continue;
    }
    if (tasks_parallel(workloads, t, s.key)) return true;
  }
  return false;
}

}  // namespace

std::vector<MoveType> heuristic_candidates(const Selection& sel, const DesignPoint& design, const SimResult& result,
                                      const WorkloadSet& workloads, std::size_t locality_hops) {
  std::vector<MoveType> out;
  const BlockKind kind = design.topology.block(sel.block).kind;
  switch (sel.metric.kind) {
    case MetricKind::Latency:
      if (sel.task && block_hosts_parallel(result, workloads, *sel.task, sel.block))
        out = {MoveType::Migrate, MoveType::Fork, MoveType::Swap};
      else
        out = {MoveType::Swap, MoveType::ForkSwap};
      break;
    case MetricKind::Power:
      if (!sel.task)
        out = {MoveType::Join, MoveType::Swap};
      else if (parallel_elsewhere(design, result, workloads, *sel.task, sel.block))
        out = block_hosts_parallel(result, workloads, *sel.task, sel.block)
                  ? std::vector{MoveType::Join, MoveType::Swap}
                  : std::vector{MoveType::Migrate, MoveType::Swap};
      else
        out = {MoveType::Swap, MoveType::ForkSwap};
      break;
    case MetricKind::Area:
      if (is_pe(kind))
        out = {MoveType::Join, MoveType::Swap};
      else
        out = {MoveType::Migrate, MoveType::Join, MoveType::Swap};
      break;
  }
  if (sel.task && std::find(out.begin(), out.end(), MoveType::Migrate) == out.end() &&
      max_hops(design, workloads, *sel.task) > locality_hops)
    out.push_back(MoveType::Migrate);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- concretization

namespace {

// Database-only view of one block: rate seen by the focus task and its
// power/area contribution at the current work split.
struct BlockEstimate {
  double speed = 0.0;
  double dynamic_j = 0.0;
  double leak_w = 0.0;
  double area_mm2 = 0.0;
};

std::optional<BlockEstimate> estimate_block(const HardwareBlock& b, const DesignPoint& d, const SimResult& result,
                                            const IpDatabase& db, const std::optional<TaskKey>& focus,
                                            double traffic_bytes) {
  BlockEstimate e;
  if (is_pe(b.kind)) {
    std::map<TaskKey, double> ops;
    for (const auto& t : result.tasks) ops[t.key] = t.total_ops;
    const auto hosted = d.tasks_on(b.id);
    if (b.kind == BlockKind::PeGpp) {
      const GppEntry* g = db.find_gpp(b.freq_mhz);
      if (!g) return std::nullopt;
      e.speed = g->p_peak_ops_s;
      e.leak_w = g->leak_w;
      e.area_mm2 = g->area_mm2;
      for (const auto& t : hosted) e.dynamic_j += ops[t] * g->e_op_j;
      return e;
    }
    double speed_sum = 0.0;
    for (const auto& t : hosted) {
      const AccEntry* a = db.find_acc(t.task, b.unroll);
      if (!a) return std::nullopt;
      const double speed = a->a_peak * db.reference_peak(b.freq_mhz);
      if (focus && *focus == t) e.speed = speed;
      speed_sum += speed;
      e.dynamic_j += ops[t] * a->e_op_j;
      e.leak_w += a->leak_w;
      e.area_mm2 += a->area_mm2;
    }
    if (e.speed == 0.0 && !hosted.empty()) e.speed = speed_sum / static_cast<double>(hosted.size());
    return e;
  }
  double e_byte = 0.0;
  if (is_noc(b.kind)) {
    const NocEntry* n = db.find_noc(b.freq_mhz, b.bus_width_b);
    if (!n) return std::nullopt;
    e_byte = n->e_byte_j;
    e.leak_w = n->leak_w;
    e.area_mm2 = n->area_mm2;
  } else {
    const MemEntry* m = db.find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b);
    if (!m) return std::nullopt;
    e_byte = m->e_byte_j;
    e.leak_w = m->leak_w;
    e.area_mm2 = m->area_mm2;
  }
  e.speed = b.b_peak();
  e.dynamic_j = traffic_bytes * e_byte;
  return e;
}

// Bytes that crossed a NoC or memory block, recovered from its dynamic energy.
double block_traffic(const HardwareBlock& b, const SimResult& result, const IpDatabase& db) {
  double energy = 0.0;
  for (const auto& t : result.tasks) {
    auto it = t.energy_j.find(b.id);
    if (it != t.energy_j.end()) energy += it->second;
  }
  double e_byte = 0.0;
  if (is_noc(b.kind)) {
    if (const NocEntry* n = db.find_noc(b.freq_mhz, b.bus_width_b)) e_byte = n->e_byte_j;
  } else if (is_mem(b.kind)) {
    if (const MemEntry* m = db.find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b)) e_byte = m->e_byte_j;
  }
  return e_byte > 0.0 ? energy / e_byte : 0.0;
}

struct MenuBuilder {
  const Selection& sel;
  const DesignPoint& d;
  const SimResult& result;
  const MoveContext& ctx;
  const ExplorerConfig& cfg;
  MoveMenu& menu;
  bool heuristic;  // order options by architectural reasoning (full awareness only)

  // Predicted gain of replacing `before` by `after` on the selected metric; positive is better.
  double swap_gain(const DesignPoint& base, const HardwareBlock& before, const HardwareBlock& after) const {
    const double traffic = is_pe(before.kind) ? 0.0 : block_traffic(before, result, ctx.db);
    auto old_e = estimate_block(before, base, result, ctx.db, sel.task, traffic);
    auto new_e = estimate_block(after, base, result, ctx.db, sel.task, traffic);
    if (!old_e || !new_e) return 0.0;
    switch (sel.metric.kind) {
      case MetricKind::Latency:
        return old_e->speed > 0.0 ? new_e->speed / old_e->speed - 1.0 : 0.0;
      case MetricKind::Power: {
        // Block power: its energy over the time it is busy, which scales with its speed.
        auto busy = result.block_busy_s.find(before.id);
        const double t_old = busy != result.block_busy_s.end() && busy->second > 0.0 ? busy->second : result.makespan_s;
        if (!(t_old > 0.0) || !(new_e->speed > 0.0)) return 0.0;
        const double t_new = t_old * old_e->speed / new_e->speed;
        return (old_e->dynamic_j / t_old + old_e->leak_w) - (new_e->dynamic_j / t_new + new_e->leak_w);
      }
      case MetricKind::Area:
        return old_e->area_mm2 - new_e->area_mm2;
    }
    return 0.0;
  }

  void offer(MoveType type, Move m) {
    try {
      DesignPoint next = apply_move(d, m, ctx);
      menu.options[static_cast<std::size_t>(type)].push_back(std::move(m));
      menu.designs[static_cast<std::size_t>(type)].push_back(std::move(next));
    } catch (const InfeasibleMoveError&) {
    }
  }

  std::size_t parallel_count(const BlockId& block) const {
    if (!sel.task) return 0;
    std::size_t n = 0;
    for (const auto& u : block_users(result, block))
      if (tasks_parallel(ctx.workloads, *sel.task, u)) ++n;
    return n;
  }

  // Number of same-class peers already using the value a knob step would reach.
  std::size_t peers_matching(const DesignPoint& base, const HardwareBlock& after, Knob knob) const {
    std::size_t n = 0;
    for (const auto& [id, b] : base.topology.blocks()) {
      if (id == after.id || block_class(b.kind) != block_class(after.kind)) continue;
      if (knob == Knob::Freq && b.freq_mhz == after.freq_mhz) ++n;
      if (knob == Knob::BusWidth && b.bus_width_b == after.bus_width_b) ++n;
      if (knob == Knob::Subtype && b.kind == after.kind) ++n;
      if (knob == Knob::Unroll && b.unroll == after.unroll) ++n;
    }
    return n;
  }

  std::vector<Knob> knob_order(BlockKind kind, Direction dir) const {
    if (is_pe(kind))
      return dir == Direction::Up ? std::vector{Knob::Subtype, Knob::Unroll, Knob::Freq}
                                  : std::vector{Knob::Freq, Knob::Unroll, Knob::Subtype};
    if (is_noc(kind)) return {Knob::Freq, Knob::BusWidth};
    return {Knob::Freq, Knob::BusWidth, Knob::Subtype};
  }

  // Feasible swaps on `block` of `base`. With heuristics: steps predicted to
  // help the metric first, then heterogeneity-preserving ones, then larger gains.
  std::vector<SwapMove> swaps(const DesignPoint& base, const BlockId& block) const {
    struct Found {
      bool helps;
      std::size_t peers;
      double gain;
      SwapMove move;
    };
    std::vector<Found> found;
    const HardwareBlock& before = base.topology.block(block);
    for (Direction dir : {Direction::Up, Direction::Down})
      for (Knob knob : knob_order(before.kind, dir)) {
        SwapMove s{block, knob, dir};
        auto after = swapped_block(base, s, ctx);
        if (!after) continue;
        Found f{false, 0, 0.0, s};
        if (heuristic) {
          f.gain = swap_gain(base, before, *after);
          f.helps = f.gain > 0.0;
          f.peers = is_pe(before.kind) ? 0 : peers_matching(base, *after, knob);
        }
        found.push_back(f);
      }
    if (heuristic)
      std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
        if (a.helps != b.helps) return a.helps;
        if (a.peers != b.peers) return a.peers > b.peers;
        return a.gain > b.gain;
      });
    std::vector<SwapMove> out;
    for (auto& f : found) out.push_back(f.move);
    return out;
  }

  void add_swaps() {
    for (const auto& s : swaps(d, sel.block)) offer(MoveType::Swap, s);
  }

  std::vector<TaskKey> producers(const TaskKey& t) const {
    std::vector<TaskKey> out;
    for (const auto& g : ctx.workloads)
      if (g.name() == t.workload)
        for (std::size_t p : g.predecessors(g.index_of(t.task))) out.push_back({g.name(), g.tasks()[p].id});
    return out;
  }

  std::vector<ForkMove> forks() const {
    std::vector<ForkMove> out;
    if (!sel.task) return out;
    const TaskKey& t = *sel.task;
    const BlockKind kind = d.topology.block(sel.block).kind;
    if (is_pe(kind)) {
      if (d.mapping.task_to_pe.at(t) == sel.block && d.tasks_on(sel.block).size() >= 2)
        out.push_back(make_fork(d, sel.block, t));
    } else if (is_noc(kind)) {
      const BlockId& pe = d.mapping.task_to_pe.at(t);
      std::size_t pes = 0;
      for (const auto& n : d.topology.neighbors(sel.block))
        if (is_pe(d.topology.block(n).kind)) ++pes;
      if (d.topology.connected(sel.block, pe) && pes >= 2) out.push_back(make_fork(d, sel.block, t));
    } else {
      auto hosted = d.tasks_on(sel.block);
      if (hosted.size() < 2) return out;
      std::set<TaskKey> related{t};
      for (const auto& p : producers(t)) related.insert(p);
      for (const auto& h : hosted)
        if (related.count(h)) out.push_back(make_fork(d, sel.block, h));
    }
    return out;
  }

  void add_forks() {
    for (auto& f : forks()) offer(MoveType::Fork, f);
  }

  void add_fork_swaps() {
    for (auto& f : forks()) {
      DesignPoint forked;
      try {
        forked = apply_move(d, f, ctx);
      } catch (const InfeasibleMoveError&) {
        continue;
      }
      for (const auto& s : swaps(forked, f.clone)) offer(MoveType::ForkSwap, ForkSwapMove{f, s});
    }
  }

  void add_migrates() {
    if (!sel.task) return;
    const TaskKey& t = *sel.task;
    const BlockKind kind = d.topology.block(sel.block).kind;
    const MetricKind metric = sel.metric.kind;
    const bool far = max_hops(d, ctx.workloads, t) > cfg.locality_hops;

    std::vector<std::pair<double, MigrateMove>> found;
    if (is_pe(kind) || is_noc(kind) || far) {
      const BlockId& src = d.mapping.task_to_pe.at(t);
      auto mems = task_mems(d, ctx.workloads, t);
      for (const auto& dst : d.topology.ids_of(BlockClass::Pe)) {
        if (dst == src) continue;
        double score = 0.0;
        std::size_t hops = 0;
        for (const auto& m : mems) hops += hops_between(d, dst, m);
        if (metric == MetricKind::Latency)
          score = static_cast<double>(parallel_count(dst)) * 1e3 + static_cast<double>(hops);
        else if (metric == MetricKind::Power)
          score = -static_cast<double>(parallel_count(dst)) * 1e3 + static_cast<double>(hops);
        else
          score = -static_cast<double>(d.tasks_on(dst).size()) * 1e3 + static_cast<double>(hops);
        found.emplace_back(score, MigrateMove{t, src, dst});
      }
    }
    if (is_mem(kind) || is_noc(kind) || far) {
      std::vector<TaskKey> movers{t};
      if (is_mem(kind))
        for (const auto& p : producers(t))
          if (d.mapping.task_to_mem.at(p) == sel.block) movers.push_back(p);
      const BlockId& pe = d.mapping.task_to_pe.at(t);
      for (const auto& m : movers) {
        const BlockId& src = d.mapping.task_to_mem.at(m);
        if (is_mem(kind) && src != sel.block) continue;
        for (const auto& dst : d.topology.ids_of(BlockClass::Mem)) {
          if (dst == src) continue;
          double hops = static_cast<double>(hops_between(d, pe, dst));
          double score = hops;
          if (metric == MetricKind::Latency)
            score = hops * 1e3 + static_cast<double>(parallel_count(dst));
          else if (metric == MetricKind::Area)
            score = -static_cast<double>(d.tasks_on(dst).size()) * 1e3 + hops;
          found.emplace_back(score, MigrateMove{m, src, dst});
        }
      }
    }
    if (heuristic)
      std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, m] : found) offer(MoveType::Migrate, m);
  }

  void add_joins() {
    const HardwareBlock& b = d.topology.block(sel.block);
    std::vector<std::pair<std::size_t, Move>> found;
    for (const auto& o : d.topology.ids_of(block_class(b.kind))) {
      if (o == sel.block) continue;
      const std::size_t score = parallel_count(o);
      if (d.topology.block(o).same_knobs(b)) {
        if (auto j = make_join(d, o, sel.block)) found.emplace_back(score, *j);
        if (auto j = make_join(d, sel.block, o)) found.emplace_back(score, *j);
        continue;
      }
      for (Direction dir : {Direction::Up, Direction::Down})
        for (Knob knob : {Knob::Freq, Knob::BusWidth, Knob::Subtype, Knob::Unroll}) {
          SwapMove s{sel.block, knob, dir};
          auto after = swapped_block(d, s, ctx);
          if (!after || !after->same_knobs(d.topology.block(o))) continue;
          DesignPoint swapped = d;
          swapped.topology.block(sel.block) = *after;
          if (auto j = make_join(swapped, o, sel.block)) found.emplace_back(score + 1000, SwapJoinMove{s, *j});
        }
    }
    if (heuristic)
      std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, m] : found) offer(MoveType::Join, m);
  }

  void build(const std::vector<MoveType>& types) {
    for (MoveType t : types) {
      switch (t) {
        case MoveType::Join: add_joins(); break;
        case MoveType::Migrate: add_migrates(); break;
        case MoveType::Fork: add_forks(); break;
        case MoveType::Swap: add_swaps(); break;
        case MoveType::ForkSwap: add_fork_swaps(); break;
      }
    }
  }
};

}  // namespace

MoveMenu build_menu(const Selection& sel, const DesignPoint& design, const SimResult& result, const MoveContext& ctx,
                    const ExplorerConfig& cfg) {
  MoveMenu menu;
  const bool full = cfg.awareness == Awareness::Full;
  menu.used_heuristic = full;
  if (full)
    menu.candidates = heuristic_candidates(sel, design, result, ctx.workloads, cfg.locality_hops);
  else
    menu.candidates = {MoveType::Join, MoveType::Migrate, MoveType::Fork, MoveType::Swap, MoveType::ForkSwap};
  MenuBuilder{sel, design, result, ctx, cfg, menu, full}.build(menu.candidates);
  return menu;
}

PickedMove sample_move(const MoveMenu& menu, const ExplorerConfig& cfg, Rng& rng) {
  std::vector<MoveType> feasible;
  std::vector<double> weights;
  const bool full = menu.used_heuristic;
  for (MoveType t : menu.candidates) {
    const auto idx = static_cast<std::size_t>(t);
    if (menu.options[idx].empty()) continue;
    double w = full ? cfg.weights[idx] : 1.0;
    if (w <= 0.0) continue;
    feasible.push_back(t);
    weights.push_back(w);
  }
  if (feasible.empty()) throw NoApplicableMoveError("no feasible move for the selected task and block");
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  MoveType type = feasible[pick(rng)];
  const std::size_t n = menu.options[static_cast<std::size_t>(type)].size();
  std::size_t index = 0;
  if (full) {
    // Mostly the best-ranked option, occasionally a runner-up.
    index = std::min(std::geometric_distribution<std::size_t>(0.5)(rng), n - 1);
  } else {
    index = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  return {type, index};
}

Move select_move(const Selection& sel, const DesignPoint& design, const SimResult& result, const MoveContext& ctx,
                 const ExplorerConfig& cfg, Rng& rng) {
  MoveMenu menu = build_menu(sel, design, result, ctx, cfg);
  PickedMove p = sample_move(menu, cfg, rng);
  return menu.options[static_cast<std::size_t>(p.type)][p.index];
}

// ---------------------------------------------------------------- annealing

namespace {

struct Evaluated {
  SimResult result;
  MetricValues metrics;
  double distance = 0.0;
  bool met = false;
};

Evaluated evaluate(const DesignPoint& d, const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget) {
  Evaluated e;
  e.result = simulate(d, workloads, db, SimOptions{false});
  e.metrics = MetricValues::from(e.result);
  e.distance = distance_to_budget(e.metrics, budget);
  e.met = meets_budget(e.metrics, budget);
  return e;
}

// Designs that meet the budget outrank those that do not, then lower distance wins.
bool better(bool met_a, double dist_a, bool met_b, double dist_b) {
  if (met_a != met_b) return met_a;
  return dist_a < dist_b;
}

std::string save_rng(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void load_rng(Rng& rng, const std::string& s) {
  std::istringstream is(s);
  is >> rng;
  if (!is) throw SchemaError("corrupt random generator state in checkpoint");
}

Selection random_selection(const DesignPoint& d, const SimResult& result, const Metric& metric, Rng& rng,
                           std::optional<TaskKey> task) {
  const bool pick_task_blocks = task.has_value();
  Selection sel;
  sel.metric = metric;
  if (!task) {
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, result.tasks.size() - 1)(rng);
    task = result.tasks[i].key;
  }
  sel.task = task;
  std::vector<BlockId> ids;
  if (pick_task_blocks) {
    // A known task narrows the draw to blocks it runs on or moves data through.
    for (const auto& t : result.tasks) {
      if (t.key != *task) continue;
      std::set<BlockId> used{t.pe};
      for (const auto& [id, _] : t.energy_j)
        if (d.topology.has(id)) used.insert(id);
      ids.assign(used.begin(), used.end());
    }
  }
  if (ids.empty())
    for (const auto& [id, _] : d.topology.blocks()) ids.push_back(id);
  sel.block = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
  return sel;
}

}  // namespace

ExploreResult anneal(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                     const ExplorerConfig& config, const AnnealHooks& hooks, const DesignPoint* start,
                     const AnnealState* resume) {
  config.validate();
  budget.validate();
  const MoveContext ctx{workloads, db, config.bounds};
  ExploreResult out;
  Rng rng(config.seed);

  auto run_eval = [&](const DesignPoint& d) {
    Evaluated e = evaluate(d, workloads, db, budget);
    ++out.simulations;
    if (hooks.on_simulate) hooks.on_simulate(e.result);
    return e;
  };

  AnnealState st;
  Evaluated cur;
  Evaluated best;
  if (resume) {
    st = *resume;
    load_rng(rng, st.rng_state);
    cur = run_eval(st.current);
    best = run_eval(st.best);
  } else {
    st.current = start ? *start : base_design(workloads, db, config.bounds);
    cur = run_eval(st.current);
    st.current_distance = cur.distance;
    st.best = st.current;
    best = cur;
    st.best_distance = cur.distance;
    st.best_met = cur.met;
    st.trace.seed = config.seed;
    st.trace.awareness = config.awareness;
    st.trace.initial_distance = cur.distance;
    double t0 = config.t0 > 0.0 ? config.t0 : config.t0_factor * std::abs(cur.distance);
    st.temperature = t0 > 0.0 ? t0 : 1e-3;
    st.k = 1;
  }

  auto done = [&] {
    if (config.stop_on_budget && best.met) return true;
    return config.stop_distance && st.best_distance <= *config.stop_distance;
  };

  for (std::size_t it = st.next_iteration; it < config.max_iterations && !done(); ++it) {
    IterationRecord rec;
    rec.iteration = it;
    rec.temperature = st.temperature;

    Metric metric;
    try {
      metric = select_metric(cur.result, budget, config.epsilon, rng);
    } catch (const AllMetricsMetError&) {
      break;
    }
    rec.metric = metric;

    Selection sel;
    MoveMenu menu;
    bool have_menu = false;
    const std::size_t limit = cur.result.tasks.size() + st.current.topology.blocks().size();
    for (std::size_t attempt = 0; attempt <= limit && !have_menu; ++attempt) {
      switch (config.awareness) {
        case Awareness::Sa:
          sel = random_selection(st.current, cur.result, metric, rng, std::nullopt);
          break;
        case Awareness::Task:
        case Awareness::TaskBlock:
        case Awareness::Full:
          try {
            sel = select_task_block(cur.result, metric, st.current, st.k);
          } catch (const ExhaustedCandidatesError&) {
            st.k = 1;
            sel = select_task_block(cur.result, metric, st.current, st.k);
          }
          if (config.awareness == Awareness::Task) sel = random_selection(st.current, cur.result, metric, rng, sel.task);
          break;
      }
      menu = build_menu(sel, st.current, cur.result, ctx, config);
      if (!menu.empty() && std::any_of(menu.candidates.begin(), menu.candidates.end(), [&](MoveType t) {
            return !menu.options[static_cast<std::size_t>(t)].empty() && config.weights[static_cast<std::size_t>(t)] > 0;
          }))
        have_menu = true;
      else if (config.awareness != Awareness::Sa)
        ++st.k;
    }
    rec.task = sel.task;
    rec.block = sel.block;
    rec.k = st.k;
    rec.workload = sel.task ? sel.task->workload : metric.workload;
    rec.candidates = menu.candidates;
    rec.used_heuristic = menu.used_heuristic;
    rec.boundedness = is_pe(st.current.topology.block(sel.block).kind) ? Boundedness::Computation
                                                                       : Boundedness::Communication;

    if (have_menu) {
      std::vector<PickedMove> picks;
      for (std::size_t n = 0; n < config.neighbors; ++n) picks.push_back(sample_move(menu, config, rng));

      std::vector<Evaluated> evals(picks.size());
      auto design_of = [&](const PickedMove& p) -> const DesignPoint& {
        return menu.designs[static_cast<std::size_t>(p.type)][p.index];
      };
      if (config.threads > 1) {
        std::vector<std::future<Evaluated>> futures;
        for (const auto& p : picks)
          futures.push_back(std::async(std::launch::async, [&, p] { return evaluate(design_of(p), workloads, db, budget); }));
        for (std::size_t i = 0; i < picks.size(); ++i) {
          evals[i] = futures[i].get();
          ++out.simulations;
          if (hooks.on_simulate) hooks.on_simulate(evals[i].result);
        }
      } else {
        for (std::size_t i = 0; i < picks.size(); ++i) evals[i] = run_eval(design_of(picks[i]));
      }

      std::size_t pick = 0;
      for (std::size_t i = 0; i < evals.size(); ++i) {
        rec.candidate_distances.push_back(evals[i].distance);
        if (evals[i].distance < evals[pick].distance) pick = i;
      }
      const PickedMove& chosen = picks[pick];
      rec.move = menu.options[static_cast<std::size_t>(chosen.type)][chosen.index];
      rec.high_level = high_level_of(chosen.type);
      if (const auto* s = std::get_if<SwapMove>(&*rec.move)) rec.low_level = to_string(s->knob);
      if (const auto* fs = std::get_if<ForkSwapMove>(&*rec.move)) rec.low_level = to_string(fs->swap.knob);
      if (const auto* sj = std::get_if<SwapJoinMove>(&*rec.move)) rec.low_level = to_string(sj->swap.knob);

      const double delta = evals[pick].distance - cur.distance;
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      rec.improved = delta < 0.0;
      rec.accepted = rec.improved || u < std::exp(-delta / st.temperature);
      if (rec.accepted) {
        st.current = design_of(chosen);
        cur = std::move(evals[pick]);
        st.current_distance = cur.distance;
        if (better(cur.met, cur.distance, best.met, best.distance)) {
          st.best = st.current;
          best = cur;
          st.best_distance = cur.distance;
          st.best_met = cur.met;
        }
      }
      st.k = rec.improved ? 1 : st.k + 1;
    } else {
      st.k = 1;
    }

    rec.accepted_distance = st.current_distance;
    rec.best_distance = st.best_distance;
    st.trace.records.push_back(std::move(rec));
    st.temperature *= config.cooling;
    st.next_iteration = it + 1;

    if (hooks.on_checkpoint && config.checkpoint_every > 0 && st.next_iteration % config.checkpoint_every == 0) {
      st.rng_state = save_rng(rng);
      hooks.on_checkpoint(st);
    }
  }

  out.best = st.best;
  out.best_distance = st.best_distance;
  out.best_metrics = best.metrics;
  out.met = best.met;
  out.trace = std::move(st.trace);
  return out;
}

ExploreResult naive_sa_baseline(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                                ExplorerConfig config, Awareness level, const AnnealHooks& hooks) {
  config.awareness = level;
  return anneal(workloads, db, budget, config, hooks);
}

}  // namespace dse
