#include "dse/report.hpp"

#include <cmath>
#include <numeric>

namespace dse {

double coefficient_of_variation(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / n) / mean;
}

double accelerator_level_parallelism(const SimResult& result) {
  if (result.makespan_s <= 0.0) return 0.0;
  double weighted = 0.0;
  for (const auto& p : result.phases) weighted += static_cast<double>(p.active_pes) * p.duration_s;
  return weighted / result.makespan_s;
}

DesignSummary summarize(const DesignPoint& design, const SimResult& result) {
  DesignSummary s;
  std::vector<double> pe_f, noc_f, noc_w, mem_f, mem_w;
  for (const auto& [id, b] : design.topology.blocks()) {
    ++s.block_counts[to_string(b.kind)];
    ++s.total_blocks;
    if (is_pe(b.kind)) {
      pe_f.push_back(b.freq_mhz);
    } else if (is_noc(b.kind)) {
      noc_f.push_back(b.freq_mhz);
      noc_w.push_back(b.bus_width_b);
    } else {
      mem_f.push_back(b.freq_mhz);
      mem_w.push_back(b.bus_width_b);
      auto it = result.block_area_mm2.find(id);
      s.mem_area_mm2[id] = it == result.block_area_mm2.end() ? 0.0 : it->second;
    }
  }
  s.cv_pe_freq = coefficient_of_variation(pe_f);
  s.cv_noc_freq = coefficient_of_variation(noc_f);
  s.cv_noc_width = coefficient_of_variation(noc_w);
  s.cv_mem_freq = coefficient_of_variation(mem_f);
  s.cv_mem_width = coefficient_of_variation(mem_w);
  s.alp = accelerator_level_parallelism(result);

  double total = 0.0;
  for (const auto& [kind, t] : result.bottleneck_histogram) total += t;
  for (const auto& [kind, t] : result.bottleneck_histogram)
    s.bottleneck_share[to_string(kind)] = total > 0.0 ? t / total : 0.0;
  return s;
}

std::vector<std::pair<long, double>> convergence_curve(const ExplorationTrace& trace) {
  std::vector<std::pair<long, double>> out;
  out.emplace_back(-1, trace.initial_distance);
  for (const auto& r : trace.records) out.emplace_back(static_cast<long>(r.iteration), r.best_distance);
  return out;
}

}  // namespace dse
