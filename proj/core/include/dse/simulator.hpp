#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/rates.hpp"
#include "dse/workload.hpp"

namespace dse {

enum class TaskState { Blocked, Running, Done };

/// Outstanding work of one task: ops on its PE and bytes per stream.
struct TaskProgress {
  double compute = 0.0;
  std::vector<double> streams;
  TaskState state = TaskState::Blocked;

  static TaskProgress fresh(const CompiledTask& t);
  bool finished() const;
};

/// Completion time of a task under fixed rates and the resource that sets
/// it. `resource` is -1 for compute, otherwise a stream index.
struct Completion {
  double seconds = 0.0;
  int resource = -1;
  std::size_t block = 0;
};

/// Slowest of the task's outstanding resources. Resources with no work left
/// are ignored; compute wins ties. Throws ZeroRateError when a resource with
/// work has no rate.
Completion completion_time(const CompiledTask& task, const TaskProgress& progress, const TaskRates& rates);

/// Fastest completion among running tasks; throws NoRunningTaskError.
double phase_duration(std::span<const Completion> completions);

/// Small id-ordered block -> value table; iterates like a std::map.
class BlockTable {
 public:
  using value_type = std::pair<BlockId, double>;
  using const_iterator = std::vector<value_type>::const_iterator;

  double& operator[](const BlockId& id) {
    auto it = lower(id);
    if (it == rows_.end() || it->first != id) it = rows_.insert(it, {id, 0.0});
    return it->second;
  }
  /// Appends when `id` sorts after every present key; otherwise inserts in order.
  void append(const BlockId& id, double v) {
    if (rows_.empty() || rows_.back().first < id)
      rows_.emplace_back(id, v);
    else
      (*this)[id] = v;
  }
  const_iterator find(const BlockId& id) const {
    auto it = lower(id);
    return it != rows_.end() && it->first == id ? const_iterator(it) : rows_.end();
  }
  std::size_t count(const BlockId& id) const { return find(id) != rows_.end() ? 1 : 0; }
  const_iterator begin() const { return rows_.begin(); }
  const_iterator end() const { return rows_.end(); }
  std::size_t size() const { return rows_.size(); }
  void reserve(std::size_t n) { rows_.reserve(n); }
  bool empty() const { return rows_.empty(); }
  bool operator==(const BlockTable&) const = default;

 private:
  std::vector<value_type>::iterator lower(const BlockId& id) {
    return std::lower_bound(rows_.begin(), rows_.end(), id, [](const value_type& r, const BlockId& k) { return r.first < k; });
  }
  std::vector<value_type>::const_iterator lower(const BlockId& id) const {
    return std::lower_bound(rows_.begin(), rows_.end(), id, [](const value_type& r, const BlockId& k) { return r.first < k; });
  }
  std::vector<value_type> rows_;
};

struct PhaseRecord {
  std::size_t index = 0;
  double start_s = 0.0;
  double duration_s = 0.0;
  std::vector<TaskKey> running;
  std::vector<BlockId> bottleneck;  // parallel to `running`
  std::size_t active_pes = 0;
};

struct TaskStats {
  TaskKey key;
  double start_s = 0.0;
  double finish_s = 0.0;
  double total_ops = 0.0;
  double total_bytes = 0.0;
  double processed_ops = 0.0;
  double processed_bytes = 0.0;
  BlockTable bottleneck_s;  // time this task was limited by each block
  BlockTable energy_j;      // dynamic energy spent on each block
  BlockId pe;

  double duration_s() const { return finish_s - start_s; }
  /// Block that limited the task for the longest time (its PE if never limited).
  BlockId dominant_bottleneck() const;
};

struct SimResult {
  std::map<std::string, double> workload_latency_s;
  double makespan_s = 0.0;
  double energy_j = 0.0;
  double dynamic_energy_j = 0.0;
  double power_w = 0.0;
  double area_mm2 = 0.0;
  std::map<BlockId, double> block_busy_s;
  std::map<BlockId, double> block_energy_j;
  std::map<BlockId, double> block_area_mm2;
  std::map<BlockId, double> block_bottleneck_s;
  std::map<BlockKind, double> bottleneck_histogram;
  std::vector<TaskStats> tasks;
  std::vector<PhaseRecord> phases;
  std::size_t phase_count = 0;

  /// Largest relative gap between processed and required work over all
  /// tasks and both resource types.
  double max_conservation_error() const;
  const TaskStats& task(const TaskKey& key) const;
};

struct SimOptions {
  bool record_phases = true;
};

/// Phase-driven simulation: all ready tasks run, rates stay fixed until the
/// next task completes, progress advances by rate x phase duration.
SimResult simulate(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                   const SimOptions& options = {});

struct PowerArea {
  double power_w = 0.0;
  double area_mm2 = 0.0;
};

/// Power = total energy / makespan (leakage sum for a zero makespan);
/// area = sum of block areas. Throws MissingDatabaseEntryError.
PowerArea estimate_power_area(const DesignPoint& design, const SimResult& result, const IpDatabase& db);

namespace detail {
/// Fills energy, power, area, per-block tables and per-task energy from a
/// compiled model once latencies and busy times are known.
void finalize_result(const SimModel& model, SimResult& result);
}  // namespace detail

}  // namespace dse
