#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <mutex>

namespace fx {

IpDatabase round_db(const std::vector<std::string>& acc_tasks) {
  std::vector<GppEntry> gpp;
  std::vector<AccEntry> acc;
  std::vector<NocEntry> noc;
  std::vector<MemEntry> mem;
  for (int f : kFreqLadderMhz) {
    gpp.push_back({f, f * 1e6, 1e-9 * f / 100.0, 1e-3 * f / 100.0, 1.0});
    for (int w : kBusWidthLadder) {
      noc.push_back({f, w, 1e-12, 1e-4 * f / 100.0, 0.01 * w});
      mem.push_back({MemKind::Dram, f, w, 1e-11, 1e-4, 1.0 + 0.001 * w});
      mem.push_back({MemKind::Sram, f, w, 1e-12, 2e-4, 2.0 + 0.001 * w});
    }
  }
  for (const auto& t : acc_tasks)
    for (int u : {1, 2, 4, 8}) acc.push_back({t, u, 10.0 * u, 1e-10, 1e-4 * u, 0.5 * u});
  return IpDatabase(gpp, acc, noc, mem);
}

Task task(const std::string& id, double f, double i_read, double i_write, double burst) {
  Task t;
  t.id = id;
  t.f_ops = f;
  if (i_read > 0) t.i_read = i_read;
  if (i_write > 0) t.i_write = i_write;
  t.burst = burst;
  return t;
}

TaskGraph chain(const std::string& name, std::size_t n, double f, double bytes) {
  std::vector<Task> ts;
  std::vector<DataEdge> es;
  for (std::size_t i = 0; i < n; ++i) {
    ts.push_back(task("T" + std::to_string(i), f));
    if (i) es.push_back({"T" + std::to_string(i - 1), "T" + std::to_string(i), bytes});
  }
  return TaskGraph::build(name, ts, es);
}

TaskGraph diamond(const std::string& name, double f, double bytes) {
  return TaskGraph::build(name, {task("A", f), task("B", f), task("C", 2 * f), task("D", f)},
                          {{"A", "B", bytes}, {"A", "C", bytes}, {"B", "D", bytes}, {"C", "D", bytes}});
}

TaskGraph independent(const std::string& name, std::size_t n, double f) {
  std::vector<Task> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(task("T" + std::to_string(i), f));
  return TaskGraph::build(name, ts, {});
}

DesignPoint single(const WorkloadSet& w, int pe_mhz, int noc_mhz, int noc_width, int mem_mhz, int mem_width) {
  DesignPoint d;
  d.topology.add({"pe0", BlockKind::PeGpp, pe_mhz, 0, 1, 1});
  d.topology.add({"noc0", BlockKind::Noc, noc_mhz, noc_width, 1, 1});
  d.topology.add({"mem0", BlockKind::MemDram, mem_mhz, mem_width, 1, 1});
  d.topology.connect("pe0", "noc0");
  d.topology.connect("noc0", "mem0");
  for (const auto& g : w)
    for (const auto& t : g.tasks()) {
      d.mapping.task_to_pe[{g.name(), t.id}] = "pe0";
      d.mapping.task_to_mem[{g.name(), t.id}] = "mem0";
    }
  return d;
}

namespace {
std::mutex mu;
std::size_t count = 0;
double worst = 0.0;
}  // namespace

void tally(const SimResult& r) {
  std::lock_guard lock(mu);
  ++count;
  worst = std::max(worst, r.max_conservation_error());
}

SimResult sim(const DesignPoint& d, const WorkloadSet& w, const IpDatabase& db) {
  SimResult r = simulate(d, w, db);
  tally(r);
  return r;
}

std::size_t tally_count() {
  std::lock_guard lock(mu);
  return count;
}

double tally_max_error() {
  std::lock_guard lock(mu);
  return worst;
}

ExplorationTrace scripted_trace() {
  ExplorationTrace t;
  t.seed = 1;
  t.initial_distance = 3.0;
  double d = t.initial_distance;
  for (std::size_t i = 0; i < 20; ++i) {
    IterationRecord r;
    r.iteration = i;
    r.metric = i < 10 ? Metric{MetricKind::Latency, "w"} : Metric{MetricKind::Power, ""};
    r.workload = i % 2 ? "b" : "a";
    r.high_level = (i / 4) % 2 ? "customization" : "mapping";
    r.low_level = i == 5 || i == 6 ? "freq" : "";
    r.boundedness = i < 15 ? Boundedness::Computation : Boundedness::Communication;
    d -= 0.01 * static_cast<double>(i);
    r.accepted_distance = d;
    r.best_distance = d;
    r.accepted = r.improved = i > 0;
    t.records.push_back(r);
  }
  return t;
}

bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace fx
