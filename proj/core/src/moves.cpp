#include "dse/moves.hpp"

#include <algorithm>
#include <sstream>

#include "dse/errors.hpp"

namespace dse {

const char* to_string(Knob k) {
  switch (k) {
    case Knob::Freq: return "freq";
    case Knob::BusWidth: return "bus_width";
    case Knob::Subtype: return "subtype";
    case Knob::Unroll: return "unroll";
  }
  return "?";
}

const char* to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

const char* to_string(MoveType t) {
  switch (t) {
    case MoveType::Join: return "join";
    case MoveType::Migrate: return "migrate";
    case MoveType::Fork: return "fork";
    case MoveType::Swap: return "swap";
    case MoveType::ForkSwap: return "fork_swap";
  }
  return "?";
}

MoveType parse_move_type(const std::string& s) {
  for (MoveType t : {MoveType::Join, MoveType::Migrate, MoveType::Fork, MoveType::Swap, MoveType::ForkSwap})
    if (s == to_string(t)) return t;
  throw SchemaError("unknown move type '" + s + "'");
}

MoveType move_type(const Move& m) {
  struct V {
    MoveType operator()(const SwapMove&) const { return MoveType::Swap; }
    MoveType operator()(const ForkMove&) const { return MoveType::Fork; }
    MoveType operator()(const JoinMove&) const { return MoveType::Join; }
    MoveType operator()(const MigrateMove&) const { return MoveType::Migrate; }
    MoveType operator()(const ForkSwapMove&) const { return MoveType::ForkSwap; }
    MoveType operator()(const SwapJoinMove&) const { return MoveType::Join; }
  };
  return std::visit(V{}, m);
}

namespace {

std::string list(const std::vector<TaskKey>& v) {
  std::string s;
  for (const auto& k : v) s += (s.empty() ? "" : ",") + to_string(k);
  return s;
}

std::string describe_swap(const SwapMove& s) {
  return "swap(" + s.block + "," + to_string(s.knob) + "," + to_string(s.direction) + ")";
}
std::string describe_fork(const ForkMove& f) {
  std::string pes;
  for (const auto& p : f.detach) pes += (pes.empty() ? "" : ",") + p;
  return "fork(" + f.block + "->" + f.clone + ":" + (f.tasks.empty() ? pes : list(f.tasks)) + ")";
}
std::string describe_join(const JoinMove& j) { return "join(" + j.absorbed + "->" + j.survivor + ")"; }

}  // namespace

std::string describe(const Move& m) {
  struct V {
    std::string operator()(const SwapMove& s) const { return describe_swap(s); }
    std::string operator()(const ForkMove& f) const { return describe_fork(f); }
    std::string operator()(const JoinMove& j) const { return describe_join(j); }
    std::string operator()(const MigrateMove& g) const {
      return "migrate(" + to_string(g.task) + ":" + g.src + "->" + g.dst + ")";
    }
    std::string operator()(const ForkSwapMove& fs) const {
      return "fork_swap(" + describe_fork(fs.fork) + "," + describe_swap(fs.swap) + ")";
    }
    std::string operator()(const SwapJoinMove& sj) const {
      return "swap_join(" + describe_swap(sj.swap) + "," + describe_join(sj.join) + ")";
    }
  };
  return std::visit(V{}, m);
}

namespace {

template <typename Ladder>
std::optional<int> step(const Ladder& ladder, int value, Direction dir) {
  auto it = std::find(ladder.begin(), ladder.end(), value);
  if (it == ladder.end()) return std::nullopt;
  if (dir == Direction::Up) {
    if (std::next(it) == ladder.end()) return std::nullopt;
    return *std::next(it);
  }
  if (it == ladder.begin()) return std::nullopt;
  return *std::prev(it);
}

bool allowed(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::optional<HardwareBlock> fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return std::nullopt;
}

[[noreturn]] void infeasible(const std::string& msg) { throw InfeasibleMoveError(msg); }

}  // namespace

std::optional<HardwareBlock> swapped_block(const DesignPoint& d, const SwapMove& s, const MoveContext& ctx,
                                           std::string* why) {
  if (!d.topology.has(s.block)) return fail(why, "no block '" + s.block + "'");
  HardwareBlock b = d.topology.block(s.block);
  const IpDatabase& db = ctx.db;
  const DesignBounds& bounds = ctx.bounds;
  const auto hosted = d.tasks_on(s.block);

  switch (s.knob) {
    case Knob::Freq: {
      auto f = step(kFreqLadderMhz, b.freq_mhz, s.direction);
      if (!f) return fail(why, "frequency ladder boundary");
      const auto& range = is_pe(b.kind) ? bounds.pe_freqs : is_noc(b.kind) ? bounds.noc_freqs : bounds.mem_freqs;
      if (!allowed(range, *f)) return fail(why, "frequency outside bounds");
      b.freq_mhz = *f;
      break;
    }
    case Knob::BusWidth: {
      if (is_pe(b.kind)) return fail(why, "processing elements have no bus width");
      auto w = step(kBusWidthLadder, b.bus_width_b, s.direction);
      if (!w) return fail(why, "bus width ladder boundary");
      if (!allowed(is_noc(b.kind) ? bounds.noc_widths : bounds.mem_widths, *w))
        return fail(why, "bus width outside bounds");
      b.bus_width_b = *w;
      break;
    }
    case Knob::Subtype: {
      if (is_noc(b.kind)) return fail(why, "NoCs have no subtype");
      if (is_pe(b.kind)) {
        if (s.direction == Direction::Up) {
          if (b.kind != BlockKind::PeGpp) return fail(why, "already an accelerator");
          if (!bounds.allow_acc) return fail(why, "accelerators disallowed by bounds");
          b.kind = BlockKind::PeAcc;
        } else {
          if (b.kind != BlockKind::PeAcc) return fail(why, "already a general-purpose processor");
          b.kind = BlockKind::PeGpp;
        }
      } else {
        if (s.direction == Direction::Up) {
          if (b.kind != BlockKind::MemDram) return fail(why, "already SRAM");
          if (!bounds.allow_sram) return fail(why, "SRAM disallowed by bounds");
          b.kind = BlockKind::MemSram;
        } else {
          if (b.kind != BlockKind::MemSram) return fail(why, "already DRAM");
          b.kind = BlockKind::MemDram;
        }
      }
      break;
    }
    case Knob::Unroll: {
      if (b.kind != BlockKind::PeAcc) return fail(why, "unroll applies to accelerators only");
      if (s.direction == Direction::Up) {
        int next = b.unroll * 2;
        if (next > bounds.max_unroll) return fail(why, "unroll outside bounds");
        bool changes = std::any_of(hosted.begin(), hosted.end(), [&](const TaskKey& k) {
          auto us = db.unrolls_for(k.task);
          return std::find(us.begin(), us.end(), next) != us.end();
        });
        if (!changes) return fail(why, "no hosted task has an accelerator at unroll " + std::to_string(next));
        b.unroll = next;
      } else {
        if (b.unroll < 2) return fail(why, "unroll ladder boundary");
        b.unroll /= 2;
      }
      break;
    }
  }

  switch (b.kind) {
    case BlockKind::PeGpp:
      if (!db.find_gpp(b.freq_mhz)) return fail(why, "no GPP entry at target frequency");
      break;
    case BlockKind::PeAcc:
      for (const auto& k : hosted)
        if (!db.find_acc(k.task, b.unroll)) return fail(why, "no accelerator entry for " + to_string(k));
      break;
    case BlockKind::Noc:
      if (!db.find_noc(b.freq_mhz, b.bus_width_b)) return fail(why, "no NoC entry at target setting");
      break;
    case BlockKind::MemDram:
    case BlockKind::MemSram:
      if (!db.find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b)) return fail(why, "no memory entry at target");
      break;
  }
  return b;
}

ForkMove make_fork(const DesignPoint& d, const BlockId& block, const TaskKey& task) {
  ForkMove f;
  f.block = block;
  const HardwareBlock& b = d.topology.block(block);
  f.clone = d.fresh_id(block_class(b.kind));
  if (is_noc(b.kind)) {
    auto pe = d.mapping.task_to_pe.find(task);
    BlockId moved = pe == d.mapping.task_to_pe.end() ? BlockId{} : pe->second;
    for (const auto& n : d.topology.neighbors(block))
      if (!is_pe(d.topology.block(n).kind) || n == moved) f.clone_links.push_back(n);
    if (!moved.empty()) f.detach.push_back(moved);
  } else {
    f.tasks.push_back(task);
    f.clone_links = d.topology.neighbors(block);
  }
  return f;
}

std::optional<JoinMove> make_join(const DesignPoint& d, const BlockId& survivor, const BlockId& absorbed) {
  if (survivor == absorbed || !d.topology.has(survivor) || !d.topology.has(absorbed)) return std::nullopt;
  const HardwareBlock& s = d.topology.block(survivor);
  const HardwareBlock& a = d.topology.block(absorbed);
  if (!s.same_knobs(a)) return std::nullopt;
  JoinMove j;
  j.survivor = survivor;
  j.absorbed = absorbed;
  j.tasks = d.tasks_on(absorbed);
  j.absorbed_links = d.topology.neighbors(absorbed);
  for (const auto& n : j.absorbed_links)
    if (n != survivor && !d.topology.connected(survivor, n)) j.added_links.push_back(n);
  return j;
}

namespace {

std::map<TaskKey, BlockId>& table_for(DesignPoint& d, BlockKind kind) {
  return is_mem(kind) ? d.mapping.task_to_mem : d.mapping.task_to_pe;
}

void check_valid(const DesignPoint& d, const MoveContext& ctx, const std::string& what) {
  auto issues = validate_design(d, ctx.workloads, &ctx.db);
  if (!issues.empty()) infeasible(what + " leaves an invalid design: " + issues.front());
}

void check_bounds(const DesignPoint& d, const MoveContext& ctx, BlockClass c) {
  if (d.topology.count(c) > ctx.bounds.max_of(c)) infeasible("block count exceeds bounds");
  if (d.topology.blocks().size() > ctx.bounds.max_blocks) infeasible("total block count exceeds bounds");
}

void do_swap(DesignPoint& d, const SwapMove& s, const MoveContext& ctx) {
  std::string why;
  auto b = swapped_block(d, s, ctx, &why);
  if (!b) infeasible(describe_swap(s) + ": " + why);
  d.topology.block(s.block) = *b;
}

void do_fork(DesignPoint& d, const ForkMove& f, const MoveContext& ctx) {
  if (!d.topology.has(f.block)) infeasible("fork of unknown block '" + f.block + "'");
  if (d.topology.has(f.clone)) infeasible("fork clone id '" + f.clone + "' already in use");
  HardwareBlock clone = d.topology.block(f.block);
  const BlockKind kind = clone.kind;
  if (is_noc(kind) && !f.tasks.empty()) infeasible("NoC forks move PEs, not tasks");
  clone.id = f.clone;
  d.topology.add(clone);
  for (const auto& n : f.clone_links) {
    if (!d.topology.has(n) && n != f.block) infeasible("fork links to unknown block '" + n + "'");
    d.topology.connect(f.clone, n);
  }
  for (const auto& n : f.detach) {
    if (!d.topology.connected(f.block, n)) infeasible("fork detaches '" + n + "' which is not linked");
    d.topology.disconnect(f.block, n);
  }
  auto& table = table_for(d, kind);
  for (const auto& t : f.tasks) {
    auto it = table.find(t);
    if (it == table.end() || it->second != f.block) infeasible("task " + to_string(t) + " is not on " + f.block);
    it->second = f.clone;
  }
  check_bounds(d, ctx, block_class(kind));
}

void do_join(DesignPoint& d, const JoinMove& j, const MoveContext& ctx) {
  auto fresh = make_join(d, j.survivor, j.absorbed);
  if (!fresh) infeasible("join " + j.absorbed + "->" + j.survivor + " needs two blocks with identical knobs");
  if (fresh->tasks != j.tasks || fresh->absorbed_links != j.absorbed_links || fresh->added_links != j.added_links)
    infeasible("join " + j.absorbed + "->" + j.survivor + " does not match the current design");
  const BlockKind kind = d.topology.block(j.survivor).kind;
  auto& table = table_for(d, kind);
  if (!is_noc(kind))
    for (const auto& t : j.tasks) table[t] = j.survivor;
  for (const auto& n : j.added_links) d.topology.connect(j.survivor, n);
  d.topology.remove(j.absorbed);
  (void)ctx;
}

void do_migrate(DesignPoint& d, const MigrateMove& m, const MoveContext& ctx) {
  if (m.src == m.dst) infeasible("migrate to the same block");
  if (!d.topology.has(m.src) || !d.topology.has(m.dst)) infeasible("migrate names an unknown block");
  const HardwareBlock& src = d.topology.block(m.src);
  const HardwareBlock& dst = d.topology.block(m.dst);
  if (block_class(src.kind) != block_class(dst.kind) || is_noc(src.kind))
    infeasible("migrate between incompatible blocks " + m.src + " and " + m.dst);
  auto& table = table_for(d, src.kind);
  auto it = table.find(m.task);
  if (it == table.end() || it->second != m.src) infeasible("task " + to_string(m.task) + " is not on " + m.src);
  if (dst.kind == BlockKind::PeAcc && !ctx.db.find_acc(m.task.task, dst.unroll))
    infeasible("no accelerator entry for " + to_string(m.task) + " on " + m.dst);
  it->second = m.dst;
}

}  // namespace

DesignPoint apply_move(const DesignPoint& d, const Move& m, const MoveContext& ctx) {
  DesignPoint out = d;
  struct V {
    DesignPoint& out;
    const MoveContext& ctx;
    void operator()(const SwapMove& s) const { do_swap(out, s, ctx); }
    void operator()(const ForkMove& f) const { do_fork(out, f, ctx); }
    void operator()(const JoinMove& j) const { do_join(out, j, ctx); }
    void operator()(const MigrateMove& g) const { do_migrate(out, g, ctx); }
    void operator()(const ForkSwapMove& fs) const {
      if (fs.swap.block != fs.fork.clone) infeasible("fork_swap must swap the clone");
      do_fork(out, fs.fork, ctx);
      do_swap(out, fs.swap, ctx);
    }
    void operator()(const SwapJoinMove& sj) const {
      if (sj.swap.block != sj.join.absorbed) infeasible("swap_join must swap the absorbed block");
      do_swap(out, sj.swap, ctx);
      JoinMove j = sj.join;
      do_join(out, j, ctx);
    }
  };
  std::visit(V{out, ctx}, m);
  check_valid(out, ctx, describe(m));
  out.provenance.push_back(describe(m));
  return out;
}

namespace {

SwapMove flip(SwapMove s) {
  s.direction = s.direction == Direction::Up ? Direction::Down : Direction::Up;
  return s;
}
JoinMove unfork(const ForkMove& f) { return {f.block, f.clone, f.tasks, f.clone_links, f.detach}; }
ForkMove unjoin(const JoinMove& j) { return {j.survivor, j.absorbed, j.tasks, j.absorbed_links, j.added_links}; }

}  // namespace

Move invert_move(const Move& m) {
  struct V {
    Move operator()(const SwapMove& s) const { return flip(s); }
    Move operator()(const ForkMove& f) const { return unfork(f); }
    Move operator()(const JoinMove& j) const { return unjoin(j); }
    Move operator()(const MigrateMove& g) const { return MigrateMove{g.task, g.dst, g.src}; }
    Move operator()(const ForkSwapMove& fs) const { return SwapJoinMove{flip(fs.swap), unfork(fs.fork)}; }
    Move operator()(const SwapJoinMove& sj) const { return ForkSwapMove{unjoin(sj.join), flip(sj.swap)}; }
  };
  return std::visit(V{}, m);
}

}  // namespace dse
