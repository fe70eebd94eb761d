#include "dse/budget.hpp"

#include <cmath>

#include "dse/errors.hpp"
#include "dse/simulator.hpp"

namespace dse {

void Budget::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  for (const auto& [w, l] : latency_s)
    if (!positive(l)) throw InvalidSpecError("latency budget for '" + w + "' must be positive");
  if (!positive(power_w)) throw InvalidSpecError("power budget must be positive");
  if (!positive(area_mm2)) throw InvalidSpecError("area budget must be positive");
  if (!(alpha_met >= 0.0 && alpha_met <= 1.0)) throw InvalidSpecError("alpha_met must lie in [0, 1]");
}

MetricValues MetricValues::from(const SimResult& r) {
  return {r.workload_latency_s, r.power_w, r.area_mm2};
}

const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Latency: return "latency";
    case MetricKind::Power: return "power";
    case MetricKind::Area: return "area";
  }
  return "?";
}

std::string Metric::label() const {
  return kind == MetricKind::Latency ? std::string("latency:") + workload : to_string(kind);
}

std::vector<MetricTerm> metric_terms(const MetricValues& v, const Budget& b) {
  std::vector<MetricTerm> terms;
  auto add = [&](Metric m, double design, double budget) {
    terms.push_back({std::move(m), design, budget, (design - budget) / budget});
  };
  for (const auto& [w, bud] : b.latency_s) {
    auto it = v.latency_s.find(w);
    if (it != v.latency_s.end()) add({MetricKind::Latency, w}, it->second, bud);
  }
  add({MetricKind::Power, {}}, v.power_w, b.power_w);
  add({MetricKind::Area, {}}, v.area_mm2, b.area_mm2);
  return terms;
}

double distance_to_budget(const MetricValues& v, const Budget& b) {
  double d = 0.0;
  for (const auto& t : metric_terms(v, b)) d += (t.design > t.budget ? 1.0 : b.alpha_met) * t.overshoot;
  return d;
}

bool meets_budget(const MetricValues& v, const Budget& b) {
  for (const auto& t : metric_terms(v, b))
    if (!t.met()) return false;
  return true;
}

}  // namespace dse
