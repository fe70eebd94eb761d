#include "dse/rates.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "dse/errors.hpp"

namespace dse {

double CompiledTask::total_bytes() const {
  double sum = 0.0;
  for (const auto& s : streams) sum += s.bytes;
  return sum;
}

std::size_t SimModel::block_index(const BlockId& id) const {
  auto it = std::lower_bound(blocks.begin(), blocks.end(), id,
                             [](const CompiledBlock& b, const BlockId& v) { return b.id < v; });
  if (it == blocks.end() || it->id != id) throw InvalidDesignError("no block '" + id + "'");
  return static_cast<std::size_t>(it - blocks.begin());
}

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

struct RouteCache {
  const std::vector<std::vector<std::size_t>>& adj;
  const std::vector<CompiledBlock>& blocks;
  std::vector<std::vector<int>> dist_by_mem;          // empty until computed
  std::vector<std::vector<std::size_t>> routes;        // pe * n + mem; empty until computed

  RouteCache(const std::vector<std::vector<std::size_t>>& a, const std::vector<CompiledBlock>& b)
      : adj(a), blocks(b), dist_by_mem(b.size()), routes(b.size() * b.size()) {}

  const std::vector<int>& distances(std::size_t mem) {
    if (!dist_by_mem[mem].empty()) return dist_by_mem[mem];
    std::vector<int>& dist = dist_by_mem[mem];
    dist.assign(blocks.size(), kUnreached);
    std::vector<std::size_t> frontier;
    frontier.reserve(blocks.size());
    for (std::size_t n : adj[mem]) {
      if (is_noc(blocks[n].kind)) {
        dist[n] = 0;
        frontier.push_back(n);
      }
    }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const std::size_t cur = frontier[head];
      for (std::size_t n : adj[cur]) {
        if (is_noc(blocks[n].kind) && dist[n] == kUnreached) {
          dist[n] = dist[cur] + 1;
          frontier.push_back(n);
        }
      }
    }
    return dist;
  }

  // Block indices follow id order, so "smallest index" is the id tie-break.
  const std::vector<std::size_t>& get(std::size_t pe, std::size_t mem) {
    std::vector<std::size_t>& route = routes[pe * blocks.size() + mem];
    if (!route.empty()) return route;
    const auto& dist = distances(mem);
    std::size_t cur = blocks.size();
    int best = kUnreached;
    for (std::size_t n : adj[pe]) {
      if (dist[n] < best) {
        best = dist[n];
        cur = n;
      }
    }
    if (cur == blocks.size())
      throw UnreachableError("no NoC path from " + blocks[pe].id + " to " + blocks[mem].id);
    std::vector<std::size_t>& path = route;
    path.push_back(cur);
    while (dist[cur] > 0) {
      for (std::size_t n : adj[cur]) {
        if (dist[n] == dist[cur] - 1) {
          cur = n;
          break;
        }
      }
      path.push_back(cur);
    }
    return path;
  }
};

}  // namespace

SimModel SimModel::compile(const DesignPoint& d, const WorkloadSet& workloads, const IpDatabase& db) {
  SimModel m;
  const Topology& topo = d.topology;
  m.blocks.reserve(topo.blocks().size());
  std::vector<const HardwareBlock*> hw;
  hw.reserve(topo.blocks().size());
  for (const auto& [id, b] : topo.blocks()) {
    hw.push_back(&b);
    CompiledBlock cb;
    cb.id = id;
    cb.kind = b.kind;
    cb.b_peak = b.b_peak();
    cb.links = b.links;
    switch (b.kind) {
      case BlockKind::PeGpp: {
        const GppEntry* e = db.find_gpp(b.freq_mhz);
        if (!e) throw MissingDatabaseEntryError("no GPP entry at " + std::to_string(b.freq_mhz) + " MHz for " + id);
        cb.e_unit_j = e->e_op_j;
        cb.leak_w = e->leak_w;
        cb.area_mm2 = e->area_mm2;
        break;
      }
      case BlockKind::PeAcc:
        break;  // accumulated per hosted task below
      case BlockKind::Noc: {
        const NocEntry* e = db.find_noc(b.freq_mhz, b.bus_width_b);
        if (!e) throw MissingDatabaseEntryError("no NoC entry for " + id);
        cb.e_unit_j = e->e_byte_j;
        cb.leak_w = e->leak_w;
        cb.area_mm2 = e->area_mm2;
        break;
      }
      case BlockKind::MemDram:
      case BlockKind::MemSram: {
        const MemEntry* e = db.find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b);
        if (!e) throw MissingDatabaseEntryError("no memory entry for " + id);
        cb.e_unit_j = e->e_byte_j;
        cb.leak_w = e->leak_w;
        cb.area_mm2 = e->area_mm2;
        break;
      }
    }
    m.blocks.push_back(std::move(cb));
  }

  std::vector<std::vector<std::size_t>> adj(m.blocks.size());
  for (const auto& [a, b] : topo.links()) {
    std::size_t ia = m.block_index(a), ib = m.block_index(b);
    adj[ia].push_back(ib);
    adj[ib].push_back(ia);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  RouteCache routes(adj, m.blocks);

  // Canonical task order.
  struct Ref {
    const std::string* wl;
    const std::string* id;
    std::size_t w, t;
  };
  std::vector<Ref> refs;
  std::set<std::string> names;
  for (std::size_t w = 0; w < workloads.size(); ++w) {
    if (!names.insert(workloads[w].name()).second)
      throw InvalidDesignError("duplicate workload name '" + workloads[w].name() + "'");
    m.workloads.push_back(workloads[w].name());
    for (std::size_t t = 0; t < workloads[w].size(); ++t)
      refs.push_back({&workloads[w].name(), &workloads[w].tasks()[t].id, w, t});
  }
  std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    return std::tie(*a.wl, *a.id) < std::tie(*b.wl, *b.id);
  });
  std::vector<std::vector<std::size_t>> compiled_index(workloads.size());
  for (std::size_t w = 0; w < workloads.size(); ++w) compiled_index[w].resize(workloads[w].size());
  for (std::size_t i = 0; i < refs.size(); ++i) compiled_index[refs[i].w][refs[i].t] = i;

  // Both mapping tables share the canonical order, so one forward walk resolves every task.
  auto resolve = [&](const std::map<TaskKey, BlockId>& table, const char* what) {
    std::vector<std::size_t> out(refs.size());
    auto it = table.begin();
    const BlockId* last_id = nullptr;
    std::size_t last_index = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      auto same = [&] { return it->first.task == *refs[i].id && it->first.workload == *refs[i].wl; };
      while (it != table.end() && !same() &&
             std::tie(it->first.workload, it->first.task) < std::tie(*refs[i].wl, *refs[i].id))
        ++it;
      if (it == table.end() || !same())
        throw InvalidDesignError("task " + to_string(TaskKey{*refs[i].wl, *refs[i].id}) + " has no " + what);
      if (!last_id || *last_id != it->second) {
        last_id = &it->second;
        last_index = m.block_index(it->second);
      }
      out[i] = last_index;
    }
    return out;
  };
  const std::vector<std::size_t> pe_of = resolve(d.mapping.task_to_pe, "PE");
  const std::vector<std::size_t> mem_by_ref = resolve(d.mapping.task_to_mem, "memory");
  std::vector<std::vector<std::size_t>> mem_of(workloads.size());
  for (std::size_t w = 0; w < workloads.size(); ++w) mem_of[w].resize(workloads[w].size());
  for (std::size_t i = 0; i < refs.size(); ++i) mem_of[refs[i].w][refs[i].t] = mem_by_ref[i];

  m.tasks.resize(refs.size());
  m.task_block_energy.resize(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const TaskGraph& g = workloads[refs[i].w];
    const std::size_t t = refs[i].t;
    const Task& task = g.tasks()[t];
    CompiledTask& ct = m.tasks[i];
    ct.key = {g.name(), task.id};
    ct.workload = refs[i].w;
    ct.pe = pe_of[i];
    ct.ops = task.f_ops;
    ct.burst = task.burst;
    const std::size_t own_mem = mem_of[refs[i].w][t];
    if (!is_pe(m.blocks[ct.pe].kind)) throw InvalidDesignError("task " + to_string(ct.key) + " mapped to non-PE");
    if (!is_mem(m.blocks[own_mem].kind))
      throw InvalidDesignError("task " + to_string(ct.key) + " data mapped to non-memory");

    const HardwareBlock& pe = *hw[ct.pe];
    double e_op = 0.0;
    if (pe.kind == BlockKind::PeGpp) {
      ct.peak_ops_s = db.find_gpp(pe.freq_mhz)->p_peak_ops_s;
      e_op = m.blocks[ct.pe].e_unit_j;
    } else {
      const AccEntry* e = db.find_acc(task.id, pe.unroll);
      if (!e) throw MissingDatabaseEntryError("no accelerator entry for task " + to_string(ct.key));
      ct.peak_ops_s = e->a_peak * db.reference_peak(pe.freq_mhz);
      e_op = e->e_op_j;
      m.blocks[ct.pe].leak_w += e->leak_w;
      m.blocks[ct.pe].area_mm2 += e->area_mm2;
    }

    const auto& cidx = compiled_index[refs[i].w];
    ct.preds.reserve(g.in_edges(t).size());
    ct.succs.reserve(g.out_edges(t).size());
    for (std::size_t e : g.in_edges(t)) ct.preds.push_back(cidx[g.edge_src(e)]);
    for (std::size_t e : g.out_edges(t)) ct.succs.push_back(cidx[g.edge_dst(e)]);

    // (mem, bytes) sorted by mem, merged
    std::vector<std::pair<std::size_t, double>> reads;
    if (!g.in_edges(t).empty()) {
      for (std::size_t e : g.in_edges(t)) reads.emplace_back(mem_of[refs[i].w][g.edge_src(e)], g.edges()[e].bytes);
      // stable insertion sort; fan-in is small
      for (std::size_t j = 1; j < reads.size(); ++j)
        for (std::size_t q = j; q > 0 && reads[q - 1].first > reads[q].first; --q) std::swap(reads[q - 1], reads[q]);
      std::size_t k = 0;
      for (std::size_t j = 1; j < reads.size(); ++j) {
        if (reads[j].first == reads[k].first) reads[k].second += reads[j].second;
        else reads[++k] = reads[j];
      }
      reads.resize(k + 1);
    } else {
      reads.emplace_back(own_mem, g.read_bytes(t));
    }
    auto add_stream = [&](Channel ch, std::size_t mem, double bytes) {
      if (!(bytes > 0.0)) return;
      const auto& path = routes.get(ct.pe, mem);
      CompiledStream s;
      s.channel = ch;
      s.mem = mem;
      s.bytes = bytes;
      s.hop_begin = m.hops.size();
      m.hops.insert(m.hops.end(), path.begin(), path.end());
      s.hop_end = m.hops.size();
      ct.streams.push_back(s);
    };
    ct.streams.reserve(reads.size() + 1);
    for (const auto& [mem, bytes] : reads) add_stream(Channel::Read, mem, bytes);
    add_stream(Channel::Write, own_mem, g.write_bytes(t));

    auto& energy = m.task_block_energy[i];
    energy.clear();
    energy.reserve(8);
    auto charge = [&](std::size_t block, double e) {
      for (auto& [b, sum] : energy)
        if (b == block) {
          sum += e;
          return;
        }
      energy.emplace_back(block, e);
    };
    charge(ct.pe, e_op * ct.ops);
    for (const auto& s : ct.streams) {
      for (std::size_t h = s.hop_begin; h < s.hop_end; ++h) charge(m.hops[h], m.blocks[m.hops[h]].e_unit_j * s.bytes);
      charge(s.mem, m.blocks[s.mem].e_unit_j * s.bytes);
    }
    std::sort(energy.begin(), energy.end());
  }
  return m;
}

RateEngine::RateEngine(const SimModel& model) : model_(model) {
  for (const auto& b : model.blocks) max_links_ = std::max<std::size_t>(max_links_, static_cast<std::size_t>(b.links));
  const std::size_t nb = model.blocks.size();
  pe_tasks_.assign(nb, 0);
  noc_users_.assign(nb * 2, 0);
  link_burst_.assign(nb * 2 * max_links_, 0.0);
  mem_burst_.assign(nb * 2, 0.0);
  seen_.assign(nb * 2, 0);
  mem_seen_.assign(nb * 2, 0);
  seen_link_.assign(nb * 2, 0);
  hop_link_.assign(model.hops.size(), 0);
}

void RateEngine::compute(std::span<const std::size_t> running, std::vector<TaskRates>& out) {
  std::fill(pe_tasks_.begin(), pe_tasks_.end(), 0);
  std::fill(noc_users_.begin(), noc_users_.end(), 0);
  std::fill(link_burst_.begin(), link_burst_.end(), 0.0);
  std::fill(mem_burst_.begin(), mem_burst_.end(), 0.0);
  std::fill(seen_.begin(), seen_.end(), 0);
  std::fill(mem_seen_.begin(), mem_seen_.end(), 0);

  for (std::size_t pos = 0; pos < running.size(); ++pos) {
    const CompiledTask& t = model_.tasks[running[pos]];
    ++pe_tasks_[t.pe];
    const std::size_t stamp = pos + 1;
    for (const auto& s : t.streams) {
      const std::size_t ch = static_cast<std::size_t>(s.channel);
      for (std::size_t h = s.hop_begin; h < s.hop_end; ++h) {
        const std::size_t nc = model_.hops[h] * 2 + ch;
        if (seen_[nc] != stamp) {
          seen_[nc] = stamp;
          int link = noc_users_[nc] % model_.blocks[model_.hops[h]].links;
          ++noc_users_[nc];
          seen_link_[nc] = link;
          link_burst_[nc * max_links_ + static_cast<std::size_t>(link)] += t.burst;
        }
        hop_link_[h] = seen_link_[nc];
      }
      const std::size_t mc = s.mem * 2 + ch;
      if (mem_seen_[mc] != stamp) {
        mem_seen_[mc] = stamp;
        mem_burst_[mc] += t.burst;
      }
    }
  }

  out.resize(running.size());
  for (std::size_t pos = 0; pos < running.size(); ++pos) {
    const CompiledTask& t = model_.tasks[running[pos]];
    TaskRates& r = out[pos];
    r.pe_share = pe_tasks_[t.pe];
    r.compute = t.peak_ops_s / r.pe_share;
    r.streams.resize(t.streams.size());
    for (std::size_t k = 0; k < t.streams.size(); ++k) {
      const auto& s = t.streams[k];
      const std::size_t ch = static_cast<std::size_t>(s.channel);
      double best = std::numeric_limits<double>::infinity();
      std::size_t where = s.mem;
      for (std::size_t h = s.hop_begin; h < s.hop_end; ++h) {
        const std::size_t noc = model_.hops[h];
        const std::size_t nc = noc * 2 + ch;
        const double b = model_.blocks[noc].b_peak;
        const double aggregate = b / noc_users_[nc];
        const double link = b * t.burst / link_burst_[nc * max_links_ + static_cast<std::size_t>(hop_link_[h])];
        const double rate = std::min(aggregate, link);
        if (rate < best) {
          best = rate;
          where = noc;
        }
      }
      const double mem_rate = model_.blocks[s.mem].b_peak * t.burst / mem_burst_[s.mem * 2 + ch];
      if (mem_rate < best) {
        best = mem_rate;
        where = s.mem;
      }
      r.streams[k] = {best, where};
    }
  }
}

std::vector<TaskRates> block_rates(const SimModel& model, std::span<const std::size_t> running) {
  RateEngine engine(model);
  std::vector<TaskRates> out;
  engine.compute(running, out);
  return out;
}

}  // namespace dse
