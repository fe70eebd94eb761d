#include "dse/ip_database.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dse/errors.hpp"
#include "dse/hardware.hpp"
#include "dse/workload.hpp"

namespace dse {

const char* to_string(MemKind k) { return k == MemKind::Dram ? "DRAM" : "SRAM"; }

IpDatabase::IpDatabase(std::vector<GppEntry> gpp, std::vector<AccEntry> acc, std::vector<NocEntry> noc,
                       std::vector<MemEntry> mem)
    : gpp_(std::move(gpp)), acc_(std::move(acc)), noc_(std::move(noc)), mem_(std::move(mem)) {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  std::set<int> gpp_keys;
  for (const auto& e : gpp_) {
    if (e.freq_mhz <= 0 || !(e.p_peak_ops_s > 0) || !nonneg(e.e_op_j) || !nonneg(e.leak_w) || !nonneg(e.area_mm2))
      throw SchemaError("invalid gpp entry at " + std::to_string(e.freq_mhz) + " MHz");
    if (!gpp_keys.insert(e.freq_mhz).second)
      throw SchemaError("duplicate gpp entry at " + std::to_string(e.freq_mhz) + " MHz");
  }
  std::set<std::pair<std::string, int>> acc_keys;
  for (const auto& e : acc_) {
    if (e.task.empty() || e.unroll < 1 || !(e.a_peak >= 1.0) || !nonneg(e.e_op_j) || !nonneg(e.leak_w) ||
        !nonneg(e.area_mm2))
      throw SchemaError("invalid acc entry for task '" + e.task + "'");
    if (!acc_keys.emplace(e.task, e.unroll).second)
      throw SchemaError("duplicate acc entry for task '" + e.task + "' unroll " + std::to_string(e.unroll));
  }
  std::sort(acc_.begin(), acc_.end(), [](const AccEntry& a, const AccEntry& b) {
    return std::tie(a.task, a.unroll) < std::tie(b.task, b.unroll);
  });
  for (std::size_t i = 1; i < acc_.size(); ++i)
    if (acc_[i].task == acc_[i - 1].task && acc_[i].a_peak < acc_[i - 1].a_peak)
      throw SchemaError("acc a_peak must be non-decreasing in unroll for task '" + acc_[i].task + "'");
  std::set<std::pair<int, int>> noc_keys;
  for (const auto& e : noc_) {
    if (e.freq_mhz <= 0 || e.width_b <= 0 || !nonneg(e.e_byte_j) || !nonneg(e.leak_w) || !nonneg(e.area_mm2))
      throw SchemaError("invalid noc entry");
    if (!noc_keys.emplace(e.freq_mhz, e.width_b).second) throw SchemaError("duplicate noc entry");
  }
  std::set<std::tuple<int, int, int>> mem_keys;
  for (const auto& e : mem_) {
    if (e.freq_mhz <= 0 || e.width_b <= 0 || !nonneg(e.e_byte_j) || !nonneg(e.leak_w) || !nonneg(e.area_mm2))
      throw SchemaError("invalid mem entry");
    if (!mem_keys.emplace(static_cast<int>(e.kind), e.freq_mhz, e.width_b).second)
      throw SchemaError("duplicate mem entry");
  }
}

const GppEntry* IpDatabase::find_gpp(int freq_mhz) const {
  for (const auto& e : gpp_)
    if (e.freq_mhz == freq_mhz) return &e;
  return nullptr;
}

const GppEntry& IpDatabase::reference_gpp() const {
  if (gpp_.empty()) throw MissingGppEntryError("database has no general-purpose processor entries");
  return *std::min_element(gpp_.begin(), gpp_.end(),
                           [](const GppEntry& a, const GppEntry& b) { return a.freq_mhz < b.freq_mhz; });
}

double IpDatabase::reference_peak(int freq_mhz) const {
  const GppEntry& ref = reference_gpp();
  return ref.p_peak_ops_s * static_cast<double>(freq_mhz) / static_cast<double>(ref.freq_mhz);
}

namespace {

// acc entries are sorted by (task, unroll).
std::pair<std::vector<AccEntry>::const_iterator, std::vector<AccEntry>::const_iterator> acc_range(
    const std::vector<AccEntry>& acc, const std::string& task) {
  auto lo = std::lower_bound(acc.begin(), acc.end(), task,
                             [](const AccEntry& e, const std::string& t) { return e.task < t; });
  auto hi = lo;
  while (hi != acc.end() && hi->task == task) ++hi;
  return {lo, hi};
}

}  // namespace

const AccEntry* IpDatabase::find_acc(const std::string& task, int unroll) const {
  const AccEntry* best = nullptr;
  auto [lo, hi] = acc_range(acc_, task);
  for (auto it = lo; it != hi && it->unroll <= unroll; ++it) best = &*it;
  return best;
}

bool IpDatabase::has_acc(const std::string& task) const {
  auto [lo, hi] = acc_range(acc_, task);
  return lo != hi;
}

std::vector<int> IpDatabase::unrolls_for(const std::string& task) const {
  std::vector<int> out;
  auto [lo, hi] = acc_range(acc_, task);
  for (auto it = lo; it != hi; ++it) out.push_back(it->unroll);
  return out;
}

const NocEntry* IpDatabase::find_noc(int freq_mhz, int width_b) const {
  for (const auto& e : noc_)
    if (e.freq_mhz == freq_mhz && e.width_b == width_b) return &e;
  return nullptr;
}

const MemEntry* IpDatabase::find_mem(MemKind kind, int freq_mhz, int width_b) const {
  for (const auto& e : mem_)
    if (e.kind == kind && e.freq_mhz == freq_mhz && e.width_b == width_b) return &e;
  return nullptr;
}

IpDatabase synth_database(const std::vector<TaskGraph>& workloads) {
  // Coefficients loosely follow a 5 nm-class node: energy and leakage grow
  // with frequency and width, SRAM trades area for energy per byte.
  std::vector<GppEntry> gpp;
  for (int f : kFreqLadderMhz) {
    double s = f / 100.0;
    gpp.push_back({f, 1e8 * s, 40e-12 * (0.75 + 0.25 * s), 0.2e-3 * s, 0.8 + 0.05 * s});
  }
  std::vector<AccEntry> acc;
  std::set<std::string> tasks;
  for (const auto& g : workloads)
    for (const auto& t : g.tasks()) tasks.insert(t.id);
  for (const auto& id : tasks) {
    // Speedup scales with the task's loop-level parallelism, saturating.
    double llp = 1.0;
    for (const auto& g : workloads)
      for (const auto& t : g.tasks())
        if (t.id == id) llp = std::max(llp, t.llp);
    double base = std::clamp(std::log2(llp + 1.0) * 2.0, 2.0, 20.0);
    for (int u : {1, 2, 4, 8}) {
      double a = base * (1.0 + 0.6 * std::log2(static_cast<double>(u)));
      acc.push_back({id, u, a, 4e-12, 0.02e-3 * u, 0.15 * u});
    }
  }
  std::vector<NocEntry> noc;
  std::vector<MemEntry> mem;
  for (int f : kFreqLadderMhz) {
    for (int w : kBusWidthLadder) {
      double s = f / 100.0, wf = w / 4.0;
      noc.push_back({f, w, 2e-12 * (0.8 + 0.2 * s), 0.01e-3 * s * std::sqrt(wf), 0.05 * std::sqrt(wf)});
      mem.push_back({MemKind::Dram, f, w, 20e-12 * (0.8 + 0.2 * s), 0.05e-3 * s, 1.0 + 0.02 * wf});
      mem.push_back({MemKind::Sram, f, w, 5e-12 * (0.8 + 0.2 * s), 0.1e-3 * s, 2.0 + 0.05 * wf});
    }
  }
  return IpDatabase(std::move(gpp), std::move(acc), std::move(noc), std::move(mem));
}

}  // namespace dse
