#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/workload.hpp"

namespace dse {

enum class Channel { Read = 0, Write = 1 };

/// Data a task moves between its PE and one memory in one direction.
struct CompiledStream {
  Channel channel = Channel::Read;
  std::size_t mem = 0;           // block index
  std::size_t hop_begin = 0;     // route = SimModel::hops[hop_begin, hop_end)
  std::size_t hop_end = 0;
  double bytes = 0.0;
};

struct CompiledTask {
  TaskKey key;
  std::size_t workload = 0;
  std::size_t pe = 0;
  double ops = 0.0;
  double peak_ops_s = 0.0;  // unshared PE rate for this task
  double burst = kDefaultBurstBytes;
  std::vector<CompiledStream> streams;
  std::vector<std::size_t> preds;
  std::vector<std::size_t> succs;
  double total_bytes() const;
};

struct CompiledBlock {
  BlockId id;
  BlockKind kind = BlockKind::PeGpp;
  double b_peak = 0.0;
  int links = 1;
  double e_unit_j = 0.0;  // per op (GPP) or per byte (NoC/Mem); accelerators use per-task values
  double leak_w = 0.0;
  double area_mm2 = 0.0;
};

/// Index-based snapshot of (design, workloads, database) with every
/// database lookup and route resolved. Blocks are ordered by id and tasks
/// by (workload name, task id), so iteration order is canonical.
struct SimModel {
  std::vector<CompiledBlock> blocks;
  std::vector<CompiledTask> tasks;
  std::vector<std::size_t> hops;  // NoC block indices for all stream routes
  std::vector<std::string> workloads;
  /// Dynamic energy of each task on each block it uses: (block, joules).
  std::vector<std::vector<std::pair<std::size_t, double>>> task_block_energy;

  /// Throws MissingDatabaseEntryError, UnreachableError, InvalidDesignError.
  static SimModel compile(const DesignPoint& d, const WorkloadSet& workloads, const IpDatabase& db);

  std::size_t block_index(const BlockId& id) const;
};

struct StreamRate {
  double rate = 0.0;           // bytes/s, min over route NoCs and the memory
  std::size_t bottleneck = 0;  // block index attaining the minimum
};

struct TaskRates {
  double compute = 0.0;  // ops/s on the task's PE
  int pe_share = 1;      // tasks sharing that PE; compute = peak / pe_share
  std::vector<StreamRate> streams;
};

/// Evaluates the sharing laws for a running set:
///  - PE: unshared peak / tasks running on that PE;
///  - NoC aggregate (per channel): b_peak / tasks using it;
///  - NoC link and memory (per channel): b_peak x burst_i / sum of bursts
///    sharing that link or memory.
/// Tasks are assigned to a NoC's links round-robin in running order.
/// Scratch buffers are kept between calls; not thread-safe per instance.
class RateEngine {
 public:
  explicit RateEngine(const SimModel& model);
  /// `running` is in scheduling order; `out` is resized to match.
  void compute(std::span<const std::size_t> running, std::vector<TaskRates>& out);

 private:
  const SimModel& model_;
  std::size_t max_links_ = 1;
  std::vector<int> pe_tasks_;
  std::vector<int> noc_users_;        // [noc * 2 + channel]
  std::vector<double> link_burst_;    // [(noc * 2 + channel) * max_links + link]
  std::vector<double> mem_burst_;     // [mem * 2 + channel]
  std::vector<std::size_t> seen_;     // last running-position + 1 that touched a channel
  std::vector<int> seen_link_;
  std::vector<std::size_t> mem_seen_;
  std::vector<int> hop_link_;         // link chosen per hop for the current call
};

/// Convenience wrapper around RateEngine.
std::vector<TaskRates> block_rates(const SimModel& model, std::span<const std::size_t> running);

}  // namespace dse
