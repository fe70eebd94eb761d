#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace dse {

struct SimResult;

inline constexpr double kDefaultAlphaMet = 0.05;

/// Per-workload latency targets plus system power and area targets, all in
/// SI units (s, W) except area (mm^2).
struct Budget {
  std::map<std::string, double> latency_s;
  double power_w = 0.0;
  double area_mm2 = 0.0;
  double alpha_met = kDefaultAlphaMet;

  /// Throws InvalidSpecError unless every target is positive and 0 <= alpha <= 1.
  void validate() const;
  bool operator==(const Budget&) const = default;
};

struct MetricValues {
  std::map<std::string, double> latency_s;
  double power_w = 0.0;
  double area_mm2 = 0.0;

  static MetricValues from(const SimResult& r);
};

enum class MetricKind { Latency = 0, Power = 1, Area = 2 };
const char* to_string(MetricKind k);

/// A single budgeted quantity. Latency metrics name their workload.
struct Metric {
  MetricKind kind = MetricKind::Latency;
  std::string workload;

  auto operator<=>(const Metric&) const = default;
  bool operator==(const Metric&) const = default;
  std::string label() const;
};

struct MetricTerm {
  Metric metric;
  double design = 0.0;
  double budget = 0.0;
  double overshoot = 0.0;  // (design - budget) / budget
  bool met() const { return design <= budget; }
};

/// One term per budgeted workload latency, then power, then area.
/// Workloads without a latency value are skipped.
std::vector<MetricTerm> metric_terms(const MetricValues& v, const Budget& b);

/// Sum of normalized overshoots; terms already within budget are scaled by
/// alpha_met.
double distance_to_budget(const MetricValues& v, const Budget& b);

/// Every metric at or below its target.
bool meets_budget(const MetricValues& v, const Budget& b);

}  // namespace dse
