#pragma once

#include <array>
#include <string>
#include <vector>

#include "dse/explorer.hpp"

namespace dse {

/// How often the explorer changed focus along one vector, and how much the
/// distance improved on the iterations where it did.
struct VectorRate {
  std::string vector;
  std::size_t switches = 0;
  double deployment_rate = 0.0;          // switches / (iterations - 1)
  double convergence_attribution = 0.0;  // mean distance drop on switching iterations
};

struct CodesignReport {
  std::size_t iterations = 0;
  std::vector<VectorRate> vectors;  // metric, workload, high_level, low_level, boundedness
  double convergence_rate = 0.0;    // mean distance drop per iteration

  /// Throws std::out_of_range for an unknown vector name.
  const VectorRate& at(const std::string& vector) const;
};

inline constexpr std::array<const char*, 5> kCodesignVectors = {"metric", "workload", "high_level", "low_level",
                                                                 "boundedness"};

/// Focus of one record along a named vector.
std::string focus_of(const IterationRecord& r, const std::string& vector);

/// Throws EmptyTraceError.
CodesignReport analyze_codesign(const ExplorationTrace& trace);

}  // namespace dse
