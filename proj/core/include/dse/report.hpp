#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dse/explorer.hpp"
#include "dse/hardware.hpp"
#include "dse/simulator.hpp"

namespace dse {

/// Population standard deviation over mean; 0 for fewer than one value or a
/// zero mean.
double coefficient_of_variation(const std::vector<double>& values);

/// Phase-duration-weighted mean number of PEs with work in progress.
/// Needs a result simulated with phase recording.
double accelerator_level_parallelism(const SimResult& result);

struct DesignSummary {
  std::map<std::string, std::size_t> block_counts;  // by kind name
  std::size_t total_blocks = 0;
  double cv_pe_freq = 0.0;
  double cv_noc_freq = 0.0;
  double cv_noc_width = 0.0;
  double cv_mem_freq = 0.0;
  double cv_mem_width = 0.0;
  std::map<BlockId, double> mem_area_mm2;
  double alp = 0.0;
  std::map<std::string, double> bottleneck_share;  // fraction of bottleneck time by block kind
};

DesignSummary summarize(const DesignPoint& design, const SimResult& result);

/// (iteration, best distance so far), starting with the initial design at -1.
std::vector<std::pair<long, double>> convergence_curve(const ExplorationTrace& trace);

}  // namespace dse
