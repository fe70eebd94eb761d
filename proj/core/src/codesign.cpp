#include "dse/codesign.hpp"

#include <stdexcept>

#include "dse/errors.hpp"

namespace dse {

const VectorRate& CodesignReport::at(const std::string& vector) const {
  for (const auto& v : vectors)
    if (v.vector == vector) return v;
  throw std::out_of_range("no co-design vector '" + vector + "'");
}

std::string focus_of(const IterationRecord& r, const std::string& vector) {
  if (vector == "metric") return r.metric.label();
  if (vector == "workload") return r.workload;
  if (vector == "high_level") return r.high_level;
  if (vector == "low_level") return r.low_level;
  if (vector == "boundedness") return to_string(r.boundedness);
  throw std::out_of_range("no co-design vector '" + vector + "'");
}

CodesignReport analyze_codesign(const ExplorationTrace& trace) {
  if (trace.records.empty()) throw EmptyTraceError("co-design analysis needs at least one iteration");
  const auto& recs = trace.records;
  CodesignReport rep;
  rep.iterations = recs.size();

  // Improvement of iteration i: drop of the current design's distance.
  std::vector<double> gain(recs.size());
  double prev = trace.initial_distance;
  double total = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    gain[i] = prev - recs[i].accepted_distance;
    prev = recs[i].accepted_distance;
    total += gain[i];
  }
  rep.convergence_rate = total / static_cast<double>(recs.size());

  for (const char* name : kCodesignVectors) {
    VectorRate v;
    v.vector = name;
    double gained = 0.0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      if (focus_of(recs[i], name) == focus_of(recs[i - 1], name)) continue;
      ++v.switches;
      gained += gain[i];
    }
    if (recs.size() > 1) v.deployment_rate = static_cast<double>(v.switches) / static_cast<double>(recs.size() - 1);
    if (v.switches) v.convergence_attribution = gained / static_cast<double>(v.switches);
    rep.vectors.push_back(v);
  }
  return rep;
}

}  // namespace dse
