#pragma once

#include <cstddef>
#include <vector>

#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/simulator.hpp"
#include "dse/workload.hpp"

namespace dse {

struct OracleConfig {
  double dt_s = 1e-6;
  std::size_t max_steps = 50'000'000;
};

/// Fixed-timestep reference simulator. Uses the same sharing laws as the
/// phase simulator but recomputes rates every step and retires a task at
/// the end of the step in which its last resource drains. Converges to the
/// phase simulator as dt -> 0. Throws StepBudgetExceededError.
SimResult oracle_simulate(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                          const OracleConfig& config);

/// Oracle with dt = relative_dt x (phase-simulated makespan).
SimResult oracle_simulate_relative(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                                   double relative_dt, std::size_t max_steps = 50'000'000);

/// Exhaustive enumeration of a bounded space: every partition of the tasks
/// onto at most `bounds.max_pes` processing elements, every PE option (GPP
/// frequency, and accelerator frequency x unroll when allowed), and every
/// NoC and memory setting, behind one NoC and one memory. Order is
/// canonical and independent of any seed. Throws SpaceTooLargeError when
/// the count exceeds `cap`.
std::vector<DesignPoint> enumerate_space(const WorkloadSet& workloads, const IpDatabase& db,
                                         const DesignBounds& bounds, std::size_t cap = 100'000);

/// Number of designs enumerate_space would produce, without building them.
std::size_t count_space(const WorkloadSet& workloads, const IpDatabase& db, const DesignBounds& bounds);

}  // namespace dse
