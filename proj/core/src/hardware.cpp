#include "dse/hardware.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "dse/errors.hpp"

namespace dse {

const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::PeGpp: return "PE_GPP";
    case BlockKind::PeAcc: return "PE_ACC";
    case BlockKind::Noc: return "NOC";
    case BlockKind::MemDram: return "MEM_DRAM";
    case BlockKind::MemSram: return "MEM_SRAM";
  }
  return "?";
}

BlockKind parse_block_kind(const std::string& s) {
  for (BlockKind k : {BlockKind::PeGpp, BlockKind::PeAcc, BlockKind::Noc, BlockKind::MemDram, BlockKind::MemSram})
    if (s == to_string(k)) return k;
  throw SchemaError("unknown block kind '" + s + "'");
}

BlockClass block_class(BlockKind k) {
  if (is_pe(k)) return BlockClass::Pe;
  if (is_noc(k)) return BlockClass::Noc;
  return BlockClass::Mem;
}

std::string to_string(const TaskKey& k) { return k.workload + "/" + k.task; }

const HardwareBlock& Topology::block(const BlockId& id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) throw InvalidDesignError("no block '" + id + "'");
  return it->second;
}

HardwareBlock& Topology::block(const BlockId& id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) throw InvalidDesignError("no block '" + id + "'");
  return it->second;
}

void Topology::add(HardwareBlock b) {
  if (b.id.empty()) throw InvalidDesignError("block with empty id");
  auto id = b.id;
  if (!blocks_.emplace(id, std::move(b)).second) throw InvalidDesignError("duplicate block id '" + id + "'");
}

void Topology::remove(const BlockId& id) {
  if (!blocks_.erase(id)) throw InvalidDesignError("no block '" + id + "'");
  for (auto it = links_.begin(); it != links_.end();) {
    if (it->first == id || it->second == id)
      it = links_.erase(it);
    else
      ++it;
  }
}

void Topology::connect(const BlockId& a, const BlockId& b) {
  if (a == b) throw InvalidDesignError("cannot link block '" + a + "' to itself");
  if (!has(a) || !has(b)) throw InvalidDesignError("link " + a + "-" + b + " names an unknown block");
  links_.insert(std::minmax(a, b));
}

void Topology::disconnect(const BlockId& a, const BlockId& b) { links_.erase(std::minmax(a, b)); }

bool Topology::connected(const BlockId& a, const BlockId& b) const {
  return links_.count(std::minmax(a, b)) != 0;
}

std::vector<BlockId> Topology::neighbors(const BlockId& id) const {
  std::vector<BlockId> out;
  for (const auto& [a, b] : links_) {
    if (a == id) out.push_back(b);
    if (b == id) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BlockId> Topology::ids_of(BlockClass c) const {
  std::vector<BlockId> out;
  for (const auto& [id, b] : blocks_)
    if (block_class(b.kind) == c) out.push_back(id);
  return out;
}

std::size_t Topology::count(BlockClass c) const {
  return static_cast<std::size_t>(std::count_if(
      blocks_.begin(), blocks_.end(), [c](const auto& kv) { return block_class(kv.second.kind) == c; }));
}

BlockId DesignPoint::fresh_id(BlockClass c) const {
  const char* prefix = c == BlockClass::Pe ? "pe" : c == BlockClass::Noc ? "noc" : "mem";
  for (std::size_t n = 0;; ++n) {
    BlockId id = prefix + std::to_string(n);
    if (!topology.has(id)) return id;
  }
}

const BlockId& DesignPoint::edge_mem(const std::string& workload, const DataEdge& e) const {
  auto it = mapping.task_to_mem.find({workload, e.src});
  if (it == mapping.task_to_mem.end())
    throw InvalidDesignError("task " + workload + "/" + e.src + " has no memory assignment");
  return it->second;
}

std::vector<TaskKey> DesignPoint::tasks_on(const BlockId& block) const {
  std::vector<TaskKey> out;
  const auto& kind = topology.block(block).kind;
  const auto& table = is_mem(kind) ? mapping.task_to_mem : mapping.task_to_pe;
  if (is_noc(kind)) return out;
  for (const auto& [key, id] : table)
    if (id == block) out.push_back(key);
  return out;
}

namespace {

template <typename Range>
int lowest_with(const Range& candidates, auto&& has_entry) {
  std::vector<int> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  for (int v : sorted)
    if (has_entry(v)) return v;
  return -1;
}

}  // namespace

DesignPoint base_design(const WorkloadSet& workloads, const IpDatabase& db, const DesignBounds& bounds) {
  int pe_freq = lowest_with(bounds.pe_freqs, [&](int f) { return db.find_gpp(f) != nullptr; });
  if (pe_freq < 0) throw MissingGppEntryError("no GPP entry at any allowed frequency");

  int noc_freq = -1, noc_width = -1;
  for (int f : std::vector<int>(bounds.noc_freqs)) {
    int w = lowest_with(bounds.noc_widths, [&](int w) { return db.find_noc(f, w) != nullptr; });
    if (w >= 0 && (noc_freq < 0 || f < noc_freq)) {
      noc_freq = f;
      noc_width = w;
    }
  }
  if (noc_freq < 0) throw MissingDatabaseEntryError("no NoC entry within bounds");
  int mem_freq = -1, mem_width = -1;
  for (int f : std::vector<int>(bounds.mem_freqs)) {
    int w = lowest_with(bounds.mem_widths, [&](int w) { return db.find_mem(MemKind::Dram, f, w) != nullptr; });
    if (w >= 0 && (mem_freq < 0 || f < mem_freq)) {
      mem_freq = f;
      mem_width = w;
    }
  }
  if (mem_freq < 0) throw MissingDatabaseEntryError("no DRAM entry within bounds");

  DesignPoint d;
  d.topology.add({"pe0", BlockKind::PeGpp, pe_freq, 0, 1, 1});
  d.topology.add({"noc0", BlockKind::Noc, noc_freq, noc_width, 1, 1});
  d.topology.add({"mem0", BlockKind::MemDram, mem_freq, mem_width, 1, 1});
  d.topology.connect("pe0", "noc0");
  d.topology.connect("noc0", "mem0");
  for (const auto& g : workloads) {
    for (const auto& t : g.tasks()) {
      d.mapping.task_to_pe[{g.name(), t.id}] = "pe0";
      d.mapping.task_to_mem[{g.name(), t.id}] = "mem0";
    }
  }
  return d;
}

namespace {

bool on_ladder(int v, auto const& ladder) { return std::find(ladder.begin(), ladder.end(), v) != ladder.end(); }

// Hop distance from every NoC to `mem`, through NoCs only.
std::map<BlockId, int> noc_distances_to(const Topology& topo, const BlockId& mem) {
  std::map<BlockId, int> dist;
  std::deque<BlockId> frontier;
  for (const auto& n : topo.neighbors(mem)) {
    if (is_noc(topo.block(n).kind)) {
      dist[n] = 0;
      frontier.push_back(n);
    }
  }
  while (!frontier.empty()) {
    BlockId cur = frontier.front();
    frontier.pop_front();
    for (const auto& n : topo.neighbors(cur)) {
      if (is_noc(topo.block(n).kind) && !dist.count(n)) {
        dist[n] = dist[cur] + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<BlockId> route(const DesignPoint& d, const BlockId& pe, const BlockId& mem) {
  const Topology& topo = d.topology;
  if (!topo.has(pe) || !is_pe(topo.block(pe).kind)) throw UnreachableError("'" + pe + "' is not a PE");
  if (!topo.has(mem) || !is_mem(topo.block(mem).kind)) throw UnreachableError("'" + mem + "' is not a memory");
  auto dist = noc_distances_to(topo, mem);

  BlockId cur;
  int best = std::numeric_limits<int>::max();
  for (const auto& n : topo.neighbors(pe)) {  // sorted, so the first minimum is the smallest id
    auto it = dist.find(n);
    if (it != dist.end() && it->second < best) {
      best = it->second;
      cur = n;
    }
  }
  if (cur.empty()) throw UnreachableError("no NoC path from " + pe + " to " + mem);

  std::vector<BlockId> path{cur};
  while (dist[cur] > 0) {
    for (const auto& n : topo.neighbors(cur)) {
      auto it = dist.find(n);
      if (it != dist.end() && it->second == dist[cur] - 1) {
        cur = n;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::vector<BlockId> route_edge(const DesignPoint& d, const TaskGraph& g, const DataEdge& e) {
  auto pe = d.mapping.task_to_pe.find({g.name(), e.dst});
  if (pe == d.mapping.task_to_pe.end()) throw UnreachableError("task " + g.name() + "/" + e.dst + " is unmapped");
  return route(d, pe->second, d.edge_mem(g.name(), e));
}

std::vector<std::string> validate_design(const DesignPoint& d, const WorkloadSet& workloads, const IpDatabase* db) {
  std::vector<std::string> out;
  const Topology& topo = d.topology;

  for (const auto& [id, b] : topo.blocks()) {
    if (id != b.id) out.push_back("block key '" + id + "' does not match its id '" + b.id + "'");
    if (!on_ladder(b.freq_mhz, kFreqLadderMhz))
      out.push_back("block " + id + ": frequency " + std::to_string(b.freq_mhz) + " MHz not on ladder");
    if (!is_pe(b.kind) && !on_ladder(b.bus_width_b, kBusWidthLadder))
      out.push_back("block " + id + ": bus width " + std::to_string(b.bus_width_b) + " B not on ladder");
    if (b.links < 1) out.push_back("block " + id + ": links must be >= 1");
    if (b.unroll < 1) out.push_back("block " + id + ": unroll must be >= 1");
  }

  for (const auto& [a, b] : topo.links()) {
    if (!topo.has(a) || !topo.has(b)) {
      out.push_back("link " + a + "-" + b + " names an unknown block");
      continue;
    }
    BlockClass ca = block_class(topo.block(a).kind), cb = block_class(topo.block(b).kind);
    if (ca != BlockClass::Noc && cb != BlockClass::Noc)
      out.push_back("topology: direct link " + a + "-" + b + " bypasses the NoC");
  }

  auto mems = topo.ids_of(BlockClass::Mem);
  if (topo.count(BlockClass::Pe) == 0) out.push_back("topology: no processing element");
  if (mems.empty()) out.push_back("topology: no memory");
  std::map<BlockId, std::map<BlockId, int>> dist_by_mem;
  for (const auto& m : mems) dist_by_mem[m] = noc_distances_to(topo, m);
  auto reachable = [&](const BlockId& pe, const BlockId& mem) {
    const auto& dist = dist_by_mem[mem];
    for (const auto& n : topo.neighbors(pe))
      if (dist.count(n)) return true;
    return false;
  };
  for (const auto& pe : topo.ids_of(BlockClass::Pe)) {
    bool any = std::any_of(mems.begin(), mems.end(), [&](const BlockId& m) { return reachable(pe, m); });
    if (!any) out.push_back("topology: " + pe + " cannot reach any memory");
  }

  std::set<TaskKey> known;
  for (const auto& g : workloads) {
    for (const auto& t : g.tasks()) {
      TaskKey key{g.name(), t.id};
      known.insert(key);
      auto pe = d.mapping.task_to_pe.find(key);
      auto mem = d.mapping.task_to_mem.find(key);
      if (pe == d.mapping.task_to_pe.end()) {
        out.push_back("mapping: task " + to_string(key) + " is not mapped to a PE");
      } else if (!topo.has(pe->second) || !is_pe(topo.block(pe->second).kind)) {
        out.push_back("mapping: task " + to_string(key) + " mapped to non-PE '" + pe->second + "'");
      }
      if (mem == d.mapping.task_to_mem.end()) {
        out.push_back("mapping: task " + to_string(key) + " has no memory assignment");
      } else if (!topo.has(mem->second) || !is_mem(topo.block(mem->second).kind)) {
        out.push_back("mapping: task " + to_string(key) + " data mapped to non-memory '" + mem->second + "'");
      }
    }
  }
  for (const auto& [key, id] : d.mapping.task_to_pe)
    if (!known.count(key)) out.push_back("mapping: unknown task " + to_string(key));
  for (const auto& [key, id] : d.mapping.task_to_mem)
    if (!known.count(key)) out.push_back("mapping: unknown task " + to_string(key) + " in memory map");
  if (!out.empty()) return out;

  // Every stream a task issues must have a route.
  for (const auto& g : workloads) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      TaskKey key{g.name(), g.tasks()[i].id};
      const auto& pe = d.mapping.task_to_pe.at(key);
      std::set<BlockId> targets{d.mapping.task_to_mem.at(key)};
      for (std::size_t e : g.in_edges(i)) targets.insert(d.edge_mem(g.name(), g.edges()[e]));
      for (const auto& m : targets)
        if (!reachable(pe, m)) out.push_back("route: task " + to_string(key) + " on " + pe + " cannot reach " + m);
    }
  }

  if (db) {
    for (const auto& [id, b] : topo.blocks()) {
      switch (b.kind) {
        case BlockKind::PeGpp:
          if (!db->find_gpp(b.freq_mhz)) out.push_back("database: no GPP entry for " + id);
          break;
        case BlockKind::PeAcc:
          for (const auto& key : d.tasks_on(id))
            if (!db->find_acc(key.task, b.unroll))
              out.push_back("database: no accelerator entry for task " + to_string(key) + " on " + id);
          break;
        case BlockKind::Noc:
          if (!db->find_noc(b.freq_mhz, b.bus_width_b)) out.push_back("database: no NoC entry for " + id);
          break;
        case BlockKind::MemDram:
        case BlockKind::MemSram:
          if (!db->find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b))
            out.push_back("database: no memory entry for " + id);
          break;
      }
    }
  }
  return out;
}

std::string canonical_signature(const DesignPoint& d) {
  const Topology& topo = d.topology;
  auto knobs = [](const HardwareBlock& b) {
    std::ostringstream os;
    os << to_string(b.kind) << '@' << b.freq_mhz << '/' << b.bus_width_b << '/' << b.links << '/' << b.unroll;
    return os.str();
  };
  std::map<BlockId, std::string> leaf;
  for (const auto& [id, b] : topo.blocks()) {
    if (is_noc(b.kind)) continue;
    std::string s = knobs(b) + "{";
    for (const auto& key : d.tasks_on(id)) s += to_string(key) + ",";
    leaf[id] = s + "}";
  }
  std::vector<std::string> parts;
  for (const auto& [id, sig] : leaf) parts.push_back(sig);
  for (const auto& [id, b] : topo.blocks()) {
    if (!is_noc(b.kind)) continue;
    std::vector<std::string> around;
    for (const auto& n : topo.neighbors(id))
      around.push_back(is_noc(topo.block(n).kind) ? knobs(topo.block(n)) : leaf[n]);
    std::sort(around.begin(), around.end());
    std::string s = knobs(b) + "[";
    for (const auto& a : around) s += a + ";";
    parts.push_back(s + "]");
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + "|";
  return out;
}

}  // namespace dse
