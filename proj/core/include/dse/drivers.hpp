#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dse/budget.hpp"
#include "dse/explorer.hpp"
#include "dse/hardware.hpp"
#include "dse/io.hpp"
#include "dse/ip_database.hpp"
#include "dse/workload.hpp"

namespace dse {

struct ParetoPoint {
  double power_w = 0.0;
  double area_mm2 = 0.0;
  double grid_pct = 0.0;                       // budget fraction that produced it (per-workload points)
  std::map<std::string, double> latency_s;
  std::vector<std::size_t> parts;              // per-workload front indices (combined points)
};

/// True when a is no worse than b in power and area and better in one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);
/// Non-dominated subset, sorted by power then area; exact duplicates kept once.
std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points);

struct SweepConfig {
  double grid_pct = 5.0;
  ExplorerConfig explorer;
  std::size_t max_permutations = 1'000'000;
};

struct SweepResult {
  std::map<std::string, std::vector<ParetoPoint>> fronts;
  std::vector<ParetoPoint> combined;  // every permutation of per-workload front points
  std::vector<ParetoPoint> combined_front;
  std::size_t runs = 0;
};

/// For each workload and each grid fraction g in (0, 100] %, anneals the
/// workload alone against {its latency budget, g x system power, g x system
/// area}; designs meeting the latency budget form the workload's power/area
/// front. System candidates add power and area over one front point per
/// workload. Throws SpaceTooLargeError past max_permutations.
SweepResult run_sweep(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                      const SweepConfig& config);

struct SubBudget {
  double power_w = 0.0;
  double area_mm2 = 0.0;
};

struct SystemOutcome {
  MetricValues metrics;
  double distance = 0.0;
  bool met = false;
  std::map<std::string, double> signed_pct;  // (Bud - Des) / Bud x 100 per metric label
};

struct DivideConquerResult {
  std::map<std::string, ExploreResult> parts;
  SystemOutcome myopic;    // parts composed: power and area add, latencies kept
  SystemOutcome holistic;  // one exploration over all workloads
  double power_degradation = 0.0;  // (myopic - holistic) / holistic
  double area_degradation = 0.0;
  double distance_degradation = 0.0;  // myopic - holistic
};

/// Myopic per-workload explorations (with `sub_budgets`, or an even split
/// of the system power and area) against one holistic exploration on the
/// same seed.
DivideConquerResult run_divide_conquer(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                                       const ExplorerConfig& config,
                                       const std::optional<std::map<std::string, SubBudget>>& sub_budgets = {});

SystemOutcome outcome_of(const MetricValues& v, const Budget& b);

/// Random valid design over the workloads: up to `max_blocks` blocks,
/// chained NoCs, random knobs, random mapping.
DesignPoint random_design(const WorkloadSet& workloads, const IpDatabase& db, Rng& rng, std::size_t max_blocks = 20);

struct ValidationCase {
  WorkloadSet workloads;
  IpDatabase db;
  DesignPoint design;
};

/// Seeded random (design, workload) pair with at most `max_tasks` tasks.
ValidationCase random_case(std::uint64_t seed, std::size_t max_tasks = 30, std::size_t max_blocks = 20);

struct ValidationRow {
  std::size_t trial = 0;
  std::size_t tasks = 0;
  std::size_t blocks = 0;
  double phase_latency_s = 0.0;
  double oracle_latency_s = 0.0;
  double rel_error = 0.0;           // worst over workloads
  double makespan_rel_error = 0.0;  // whole-design latency
  double phase_wall_s = 0.0;
  double oracle_wall_s = 0.0;
  double conservation_error = 0.0;
  double speedup() const { return phase_wall_s > 0.0 ? oracle_wall_s / phase_wall_s : 0.0; }
};

struct ValidationSummary {
  std::vector<ValidationRow> rows;
  double max_rel_error = 0.0;
  double max_makespan_rel_error = 0.0;
  double median_speedup = 0.0;
  double total_wall_s = 0.0;
};

/// Phase simulation against the fixed-step oracle at dt = rel_dt x makespan
/// over `trials` random cases.
ValidationSummary run_validation(std::size_t trials, double rel_dt, std::uint64_t seed, std::size_t max_tasks = 30,
                                 std::size_t max_blocks = 20);

double median(std::vector<double> v);

extern const char* const kParetoCsvHeader;
extern const char* const kValidationCsvHeader;
extern const char* const kDivideConquerCsvHeader;
void write_sweep_csv(std::ostream& os, const SweepResult& r, const RunInfo& info);
void write_validation_csv(std::ostream& os, const ValidationSummary& s, const RunInfo& info);
void write_divide_conquer_csv(std::ostream& os, const DivideConquerResult& r, const RunInfo& info);

}  // namespace dse
