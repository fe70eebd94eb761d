#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dse/budget.hpp"
#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/moves.hpp"
#include "dse/simulator.hpp"
#include "dse/workload.hpp"

namespace dse {

using Rng = std::mt19937_64;

/// How much architectural reasoning the annealer uses.
///  sa:        random task, block and move
///  task:      bottleneck task, random block and move
///  taskblock: bottleneck task and block, random move
///  full:      bottleneck task and block, heuristic move selection
enum class Awareness { Sa, Task, TaskBlock, Full };
const char* to_string(Awareness a);
Awareness parse_awareness(const std::string& s);

struct ExplorerConfig {
  std::size_t neighbors = 4;
  std::size_t max_iterations = 1000;
  double t0 = 0.0;          // absolute initial temperature; 0 means t0_factor x initial distance
  double t0_factor = 0.1;
  double cooling = 0.98;
  double epsilon = 0.05;    // chance of targeting a random unmet metric
  std::uint64_t seed = 1;
  std::array<double, kMoveTypeCount> weights{16.0, 8.0, 4.0, 2.0, 1.0};  // indexed by MoveType
  Awareness awareness = Awareness::Full;
  DesignBounds bounds;
  std::size_t locality_hops = 1;  // migrate is also proposed beyond this many NoC hops
  bool stop_on_budget = true;
  std::optional<double> stop_distance;  // also stop once the best distance drops to this
  std::size_t threads = 1;              // concurrent neighbor simulations
  std::size_t checkpoint_every = 0;

  /// Throws InvalidSpecError.
  void validate() const;
};

enum class Boundedness { Computation, Communication };
const char* to_string(Boundedness b);

struct IterationRecord {
  std::size_t iteration = 0;
  Metric metric;
  std::string workload;            // workload of the targeted task
  std::optional<TaskKey> task;
  BlockId block;
  std::size_t k = 1;
  std::optional<Move> move;        // best neighbor; empty when no move applied
  std::vector<MoveType> candidates;  // move families considered
  bool used_heuristic = false;
  std::vector<double> candidate_distances;
  double accepted_distance = 0.0;  // distance of the current design after this iteration
  double best_distance = 0.0;
  double temperature = 0.0;
  bool accepted = false;
  bool improved = false;
  Boundedness boundedness = Boundedness::Computation;
  std::string high_level;  // mapping / allocation / customization
  std::string low_level;   // swapped knob, empty for structural moves

  bool operator==(const IterationRecord&) const = default;
};

struct ExplorationTrace {
  std::uint64_t seed = 0;
  Awareness awareness = Awareness::Full;
  double initial_distance = 0.0;
  std::vector<IterationRecord> records;

  bool operator==(const ExplorationTrace&) const = default;
};

/// Everything needed to continue an interrupted run.
struct AnnealState {
  std::size_t next_iteration = 0;
  std::string rng_state;
  double temperature = 0.0;
  std::size_t k = 1;
  DesignPoint current;
  double current_distance = 0.0;
  DesignPoint best;
  double best_distance = 0.0;
  bool best_met = false;
  ExplorationTrace trace;
};

struct ExploreResult {
  DesignPoint best;
  double best_distance = 0.0;
  MetricValues best_metrics;
  bool met = false;
  ExplorationTrace trace;
  std::size_t simulations = 0;
};

struct AnnealHooks {
  std::function<void(const SimResult&)> on_simulate;
  std::function<void(const AnnealState&)> on_checkpoint;
};

/// Targeted block and (when one exists) the task driving it.
struct Selection {
  Metric metric;
  std::optional<TaskKey> task;
  BlockId block;
};

/// Metric with the largest normalized overshoot; ties resolve latency <
/// power < area, then by workload. With probability epsilon a uniformly
/// random unmet metric instead. Throws AllMetricsMetError.
Metric select_metric(const SimResult& result, const Budget& budget, double epsilon, Rng& rng);

/// k-th (1-based) candidate: for latency the k-th longest task of the
/// metric's workload and its dominant bottleneck block; for power/area the
/// k-th block by energy/area and its most energy-hungry task.
/// Throws ExhaustedCandidatesError.
Selection select_task_block(const SimResult& result, const Metric& metric, const DesignPoint& design, std::size_t k);

/// Tasks whose execution or traffic touches a block.
std::vector<TaskKey> block_users(const SimResult& result, const BlockId& block);

/// Two tasks may overlap in time: different workloads, or incomparable in
/// their dependency graph.
bool tasks_parallel(const WorkloadSet& workloads, const TaskKey& a, const TaskKey& b);

/// Move families worth trying for a selection, from the bottleneck kind.
std::vector<MoveType> heuristic_candidates(const Selection& sel, const DesignPoint& design, const SimResult& result,
                                      const WorkloadSet& workloads, std::size_t locality_hops = 1);

/// Feasible concretizations of each move family, best first, with the
/// designs they produce.
struct MoveMenu {
  std::vector<MoveType> candidates;
  std::array<std::vector<Move>, kMoveTypeCount> options;
  std::array<std::vector<DesignPoint>, kMoveTypeCount> designs;
  bool used_heuristic = false;

  bool empty() const;
};

MoveMenu build_menu(const Selection& sel, const DesignPoint& design, const SimResult& result,
                    const MoveContext& ctx, const ExplorerConfig& cfg);

struct PickedMove {
  MoveType type;
  std::size_t index;
};

/// A feasible family sampled in proportion to its precedence
/// weight (uniformly below full awareness), then one concretization.
/// Throws NoApplicableMoveError.
PickedMove sample_move(const MoveMenu& menu, const ExplorerConfig& cfg, Rng& rng);

/// build_menu + sample_move.
Move select_move(const Selection& sel, const DesignPoint& design, const SimResult& result, const MoveContext& ctx,
                 const ExplorerConfig& cfg, Rng& rng);

/// Simulated annealing from `start` (base_design when null), or from a
/// checkpointed state. Deterministic for a given seed.
ExploreResult anneal(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                     const ExplorerConfig& config, const AnnealHooks& hooks = {},
                     const DesignPoint* start = nullptr, const AnnealState* resume = nullptr);

/// anneal() at the given awareness level.
ExploreResult naive_sa_baseline(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                                ExplorerConfig config, Awareness level, const AnnealHooks& hooks = {});

/// "mapping", "allocation" or "customization".
const char* high_level_of(MoveType t);

}  // namespace dse
