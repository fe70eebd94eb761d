#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dse {

inline constexpr double kDefaultBurstBytes = 64.0;

/// One node of a task dependency graph, characterized roofline-style by its
/// work and its read/write operational intensities.
struct Task {
  std::string id;
  double f_ops = 0.0;
  std::optional<double> i_read;   // ops/byte
  std::optional<double> i_write;  // ops/byte
  double llp = 1.0;
  double burst = kDefaultBurstBytes;

  bool operator==(const Task&) const = default;
};

struct DataEdge {
  std::string src;
  std::string dst;
  double bytes = 0.0;

  bool operator==(const DataEdge&) const = default;
};

/// Validated, immutable DAG of tasks. Construct through `TaskGraph::build`
/// (or the parsers/generators that call it); every instance satisfies the
/// acyclicity and edge-endpoint invariants.
class TaskGraph {
 public:
  TaskGraph() = default;

  /// Throws SchemaError, DanglingEdgeError or CycleError.
  static TaskGraph build(std::string name, std::vector<Task> tasks, std::vector<DataEdge> edges);

  const std::string& name() const { return name_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<DataEdge>& edges() const { return edges_; }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }

  /// Index of a task id; throws SchemaError when absent.
  std::size_t index_of(const std::string& task_id) const;
  bool contains(const std::string& task_id) const;

  /// Indices into edges() of the incoming / outgoing edges of a task.
  const std::vector<std::size_t>& in_edges(std::size_t task) const { return in_edges_[task]; }
  const std::vector<std::size_t>& out_edges(std::size_t task) const { return out_edges_[task]; }
  /// Task indices of an edge's endpoints.
  std::size_t edge_src(std::size_t edge) const { return edge_ends_[edge].first; }
  std::size_t edge_dst(std::size_t edge) const { return edge_ends_[edge].second; }
  std::vector<std::size_t> predecessors(std::size_t task) const;
  std::vector<std::size_t> successors(std::size_t task) const;

  /// Kahn order with ties broken by task id.
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  /// True if a directed path leads from `from` to `to` (from != to).
  bool reaches(std::size_t from, std::size_t to) const;
  /// Neither task reaches the other: they may run concurrently.
  bool parallel(std::size_t a, std::size_t b) const;

  /// Bytes the task reads: incoming edge volumes when it has predecessors,
  /// otherwise f / I_read (0 without an intensity).
  double read_bytes(std::size_t task) const;
  /// Bytes the task writes: outgoing edge volumes when it has successors,
  /// otherwise f / I_write.
  double write_bytes(std::size_t task) const;

  bool operator==(const TaskGraph& other) const {
    return name_ == other.name_ && tasks_ == other.tasks_ && edges_ == other.edges_;
  }

 private:
  std::string name_;
  std::vector<Task> tasks_;
  std::vector<DataEdge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> edge_ends_;
  std::vector<std::vector<std::size_t>> in_edges_;
  std::vector<std::vector<std::size_t>> out_edges_;
  std::vector<std::size_t> topo_;
  // reach_[a * n + b] == 1 when a path a -> b exists.
  std::vector<std::uint8_t> reach_;
};

using WorkloadSet = std::vector<TaskGraph>;

struct WorkloadCharacteristics {
  double avg_f = 0.0;
  double avg_i_read = 0.0;
  double avg_i_write = 0.0;
  double avg_data_movement = 0.0;  // bytes per task, read + write
  double avg_llp = 0.0;
  double talp = 1.0;
};

/// 1 + number of unordered task pairs with no directed path between them.
double compute_talp(const TaskGraph& g);
/// Mean of task llp values; throws EmptyGraphError on an empty graph.
double compute_llp_avg(const TaskGraph& g);
WorkloadCharacteristics characterize(const TaskGraph& g);

enum class GraphShape { Chain, Diamond, FanOut, Independent, RandomDag };

struct SynthSpec {
  std::string name = "synthetic";
  std::string id_prefix = "T";
  GraphShape shape = GraphShape::Chain;
  std::size_t tasks = 4;
  double f_min = 1e6, f_max = 1e7;
  double bytes_min = 1e4, bytes_max = 1e5;
  double llp_min = 1.0, llp_max = 64.0;
  double i_read = 8.0, i_write = 8.0;
  std::vector<double> bursts = {32.0, 64.0, 128.0};
  double edge_probability = 0.3;  // RandomDag only
  std::uint64_t seed = 1;
};

/// Deterministic synthetic workload; throws InvalidSpecError.
TaskGraph synth_workload(const SynthSpec& spec);
GraphShape parse_shape(const std::string& name);

}  // namespace dse
