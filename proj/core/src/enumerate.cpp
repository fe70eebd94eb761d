#include <algorithm>
#include <functional>

#include "dse/errors.hpp"
#include "dse/oracle.hpp"

namespace dse {

namespace {

struct PeOption {
  BlockKind kind;
  int freq;
  int unroll;
};

struct Space {
  std::vector<TaskKey> tasks;
  std::vector<std::pair<int, int>> nocs;                  // (freq, width)
  std::vector<std::tuple<BlockKind, int, int>> mems;      // (kind, freq, width)
  std::vector<PeOption> pe_options;
};

Space describe(const WorkloadSet& workloads, const IpDatabase& db, const DesignBounds& bounds) {
  Space s;
  for (const auto& g : workloads)
    for (const auto& t : g.tasks()) s.tasks.push_back({g.name(), t.id});
  std::sort(s.tasks.begin(), s.tasks.end());

  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  for (int f : sorted(bounds.noc_freqs))
    for (int w : sorted(bounds.noc_widths))
      if (db.find_noc(f, w)) s.nocs.emplace_back(f, w);
  std::vector<BlockKind> mem_kinds{BlockKind::MemDram};
  if (bounds.allow_sram) mem_kinds.push_back(BlockKind::MemSram);
  for (BlockKind k : mem_kinds)
    for (int f : sorted(bounds.mem_freqs))
      for (int w : sorted(bounds.mem_widths))
        if (db.find_mem(mem_kind(k), f, w)) s.mems.emplace_back(k, f, w);
  for (int f : sorted(bounds.pe_freqs))
    if (db.find_gpp(f)) s.pe_options.push_back({BlockKind::PeGpp, f, 1});
  if (bounds.allow_acc) {
    for (int f : sorted(bounds.pe_freqs))
      for (int u = 1; u <= bounds.max_unroll; u *= 2) s.pe_options.push_back({BlockKind::PeAcc, f, u});
  }
  return s;
}

bool option_fits(const PeOption& o, const std::vector<TaskKey>& hosted, const IpDatabase& db) {
  if (o.kind == BlockKind::PeGpp) return true;
  return std::all_of(hosted.begin(), hosted.end(), [&](const TaskKey& k) { return db.find_acc(k.task, o.unroll); });
}

// Visits restricted-growth strings (set partitions) with at most `max_blocks` blocks.
void for_each_partition(std::size_t n, std::size_t max_blocks,
                        const std::function<void(const std::vector<std::size_t>&, std::size_t)>& visit) {
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      visit(label, used);
      return;
    }
    for (std::size_t b = 0; b <= used && b < max_blocks; ++b) {
      label[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) {
    visit(label, 1);
    return;
  }
  rec(0, 0);
}

std::vector<std::vector<std::size_t>> fitting_options(const Space& s, const std::vector<std::size_t>& label,
                                                      std::size_t blocks, const IpDatabase& db) {
  std::vector<std::vector<std::size_t>> out(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<TaskKey> hosted;
    for (std::size_t i = 0; i < label.size(); ++i)
      if (label[i] == b) hosted.push_back(s.tasks[i]);
    for (std::size_t o = 0; o < s.pe_options.size(); ++o)
      if (option_fits(s.pe_options[o], hosted, db)) out[b].push_back(o);
  }
  return out;
}

}  // namespace

std::size_t count_space(const WorkloadSet& workloads, const IpDatabase& db, const DesignBounds& bounds) {
  Space s = describe(workloads, db, bounds);
  const std::size_t fabric = s.nocs.size() * s.mems.size();
  std::size_t total = 0;
  for_each_partition(s.tasks.size(), std::max<std::size_t>(1, bounds.max_pes),
                     [&](const std::vector<std::size_t>& label, std::size_t blocks) {
                       std::size_t combos = 1;
                       for (const auto& opts : fitting_options(s, label, blocks, db)) combos *= opts.size();
                       total += combos * fabric;
                     });
  return total;
}

std::vector<DesignPoint> enumerate_space(const WorkloadSet& workloads, const IpDatabase& db,
                                         const DesignBounds& bounds, std::size_t cap) {
  const std::size_t total = count_space(workloads, db, bounds);
  if (total > cap)
    throw SpaceTooLargeError("design space has " + std::to_string(total) + " points, cap is " + std::to_string(cap));
  Space s = describe(workloads, db, bounds);

  std::vector<DesignPoint> out;
  out.reserve(total);
  for_each_partition(s.tasks.size(), std::max<std::size_t>(1, bounds.max_pes),
                     [&](const std::vector<std::size_t>& label, std::size_t blocks) {
    auto options = fitting_options(s, label, blocks, db);
    if (std::any_of(options.begin(), options.end(), [](const auto& o) { return o.empty(); })) return;
    std::vector<std::size_t> pick(blocks, 0);
    for (;;) {
      for (const auto& [nf, nw] : s.nocs) {
        for (const auto& [mk, mf, mw] : s.mems) {
          DesignPoint d;
          for (std::size_t b = 0; b < blocks; ++b) {
            const PeOption& o = s.pe_options[options[b][pick[b]]];
            d.topology.add({"pe" + std::to_string(b), o.kind, o.freq, 0, 1, o.unroll});
          }
          d.topology.add({"noc0", BlockKind::Noc, nf, nw, 1, 1});
          d.topology.add({"mem0", mk, mf, mw, 1, 1});
          for (std::size_t b = 0; b < blocks; ++b) d.topology.connect("pe" + std::to_string(b), "noc0");
          d.topology.connect("noc0", "mem0");
          for (std::size_t i = 0; i < s.tasks.size(); ++i) {
            d.mapping.task_to_pe[s.tasks[i]] = "pe" + std::to_string(label[i]);
            d.mapping.task_to_mem[s.tasks[i]] = "mem0";
          }
          out.push_back(std::move(d));
        }
      }
      // Odometer over per-PE options.
      std::size_t b = 0;
      while (b < blocks && ++pick[b] == options[b].size()) pick[b++] = 0;
      if (b == blocks) break;
    }
  });
  return out;
}

}  // namespace dse
