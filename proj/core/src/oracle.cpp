#include "dse/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dse/errors.hpp"

namespace dse {

namespace {

// A resource counts as drained once less than this fraction of one step's
// worth of work remains.
constexpr double kDrainFraction = 1e-9;

}  // namespace

SimResult oracle_simulate(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                          const OracleConfig& config) {
  if (!(config.dt_s > 0.0)) throw InvalidSpecError("oracle timestep must be positive");
  const SimModel model = SimModel::compile(design, workloads, db);
  const std::size_t n = model.tasks.size();

  SimResult r;
  r.tasks.resize(n);
  std::vector<double> ops_left(n);
  std::vector<std::vector<double>> bytes_left(n);
  std::vector<std::size_t> unmet(n);
  std::vector<bool> finished(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = model.tasks[i];
    r.tasks[i].key = t.key;
    r.tasks[i].pe = model.blocks[t.pe].id;
    r.tasks[i].total_ops = t.ops;
    r.tasks[i].total_bytes = t.total_bytes();
    ops_left[i] = t.ops;
    for (const auto& s : t.streams) bytes_left[i].push_back(s.bytes);
    unmet[i] = t.preds.size();
  }
  for (const auto& w : model.workloads) r.workload_latency_s[w] = 0.0;

  RateEngine engine(model);
  std::vector<TaskRates> rates;
  std::vector<std::size_t> active;  // in start order
  std::vector<std::size_t> ready;
  std::size_t completed = 0;
  std::size_t step = 0;
  double t_now = 0.0;

  auto retire = [&](std::size_t i) {
    finished[i] = true;
    r.tasks[i].finish_s = t_now;
    auto& lat = r.workload_latency_s[model.workloads[model.tasks[i].workload]];
    lat = std::max(lat, t_now);
    ++completed;
    for (std::size_t s : model.tasks[i].succs)
      if (--unmet[s] == 0) ready.push_back(s);
  };
  auto drained = [&](std::size_t i) {
    if (ops_left[i] > 0.0) return false;
    for (double b : bytes_left[i])
      if (b > 0.0) return false;
    return true;
  };

  for (std::size_t i = 0; i < n; ++i)
    if (unmet[i] == 0) ready.push_back(i);

  while (completed < n) {
    // Admit ready tasks at the step boundary.
    std::vector<std::size_t> admitted;
    while (!ready.empty()) {
      std::vector<std::size_t> now_ready;
      now_ready.swap(ready);
      std::sort(now_ready.begin(), now_ready.end());
      for (std::size_t i : now_ready) {
        r.tasks[i].start_s = t_now;
        if (drained(i))
          retire(i);
        else
          admitted.push_back(i);
      }
    }
    std::sort(admitted.begin(), admitted.end());
    active.insert(active.end(), admitted.begin(), admitted.end());
    if (completed == n) break;
    if (active.empty()) throw NoRunningTaskError("oracle: nothing runnable");
    if (step >= config.max_steps) throw StepBudgetExceededError("oracle exceeded its step budget");

    engine.compute(active, rates);
    const double dt = config.dt_s;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t i = active[k];
      const CompiledTask& task = model.tasks[i];

      // Attribute the step to whichever resource would take longest to drain.
      std::size_t limiter = task.pe;
      double worst = ops_left[i] > 0.0 ? ops_left[i] / rates[k].compute : 0.0;
      for (std::size_t s = 0; s < task.streams.size(); ++s) {
        if (bytes_left[i][s] <= 0.0) continue;
        double need = bytes_left[i][s] / rates[k].streams[s].rate;
        if (need > worst) {
          worst = need;
          limiter = rates[k].streams[s].bottleneck;
        }
      }
      r.tasks[i].bottleneck_s[model.blocks[limiter].id] += dt;
      r.block_bottleneck_s[model.blocks[limiter].id] += dt;
      r.bottleneck_histogram[model.blocks[limiter].kind] += dt;

      if (ops_left[i] > 0.0) {
        double work = rates[k].compute * dt;
        double used = std::min(work, ops_left[i]);
        ops_left[i] -= used;
        if (ops_left[i] <= kDrainFraction * work) {
          used += ops_left[i];
          ops_left[i] = 0.0;
        }
        r.tasks[i].processed_ops += used;
        r.block_busy_s[model.blocks[task.pe].id] += dt;
      }
      for (std::size_t s = 0; s < task.streams.size(); ++s) {
        if (bytes_left[i][s] <= 0.0) continue;
        double work = rates[k].streams[s].rate * dt;
        double used = std::min(work, bytes_left[i][s]);
        bytes_left[i][s] -= used;
        if (bytes_left[i][s] <= kDrainFraction * work) {
          used += bytes_left[i][s];
          bytes_left[i][s] = 0.0;
        }
        r.tasks[i].processed_bytes += used;
      }
    }

    ++step;
    t_now = static_cast<double>(step) * dt;
    std::vector<std::size_t> keep;
    keep.reserve(active.size());
    for (std::size_t i : active) {
      if (drained(i))
        retire(i);
      else
        keep.push_back(i);
    }
    active.swap(keep);
  }

  r.makespan_s = t_now;
  r.phase_count = step;
  detail::finalize_result(model, r);
  return r;
}

SimResult oracle_simulate_relative(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                                   double relative_dt, std::size_t max_steps) {
  SimOptions quick;
  quick.record_phases = false;
  double makespan = simulate(design, workloads, db, quick).makespan_s;
  OracleConfig cfg;
  cfg.dt_s = makespan > 0.0 ? relative_dt * makespan : 1.0;
  cfg.max_steps = max_steps;
  return oracle_simulate(design, workloads, db, cfg);
}

}  // namespace dse
