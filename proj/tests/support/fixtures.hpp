#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dse/explorer.hpp"
#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/simulator.hpp"
#include "dse/workload.hpp"

namespace fx {

using namespace dse;

/// Round-number database: a GPP at f MHz peaks at f x 1e6 ops/s, NoC and
/// memory bandwidth is f x 1e6 x width bytes/s, every entry exists for every
/// ladder point. Accelerators (a_peak = 10 x unroll) for the listed tasks.
IpDatabase round_db(const std::vector<std::string>& acc_tasks = {});

Task task(const std::string& id, double f, double i_read = 0.0, double i_write = 0.0, double burst = 64.0);
TaskGraph chain(const std::string& name, std::size_t n, double f, double bytes);
TaskGraph diamond(const std::string& name, double f, double bytes);
TaskGraph independent(const std::string& name, std::size_t n, double f);

/// One PE, one NoC, one memory at the given knobs with everything mapped on them.
DesignPoint single(const WorkloadSet& w, int pe_mhz = 100, int noc_mhz = 100, int noc_width = 4, int mem_mhz = 100,
                   int mem_width = 4);

/// Simulates and records the conservation error in a process-wide tally.
SimResult sim(const DesignPoint& d, const WorkloadSet& w, const IpDatabase& db);
void tally(const SimResult& r);
std::size_t tally_count();
double tally_max_error();

/// Hand-built 20-iteration trace. Iteration i improves the distance by
/// 0.01 i from an initial 3.0. Focus pattern:
///   metric       latency(w) for i < 10, then power
///   workload     alternates a, b
///   high_level   mapping when (i / 4) is even, customization otherwise
///   low_level    "freq" at i = 5, 6, empty elsewhere
///   boundedness  computation for i < 15, then communication
ExplorationTrace scripted_trace();

/// Same bits.
bool same(double a, double b);

}  // namespace fx
