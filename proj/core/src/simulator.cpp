#include "dse/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dse/errors.hpp"

namespace dse {

TaskProgress TaskProgress::fresh(const CompiledTask& t) {
  TaskProgress p;
  p.compute = t.ops;
  p.streams.reserve(t.streams.size());
  for (const auto& s : t.streams) p.streams.push_back(s.bytes);
  return p;
}

bool TaskProgress::finished() const {
  return compute <= 0.0 && std::all_of(streams.begin(), streams.end(), [](double v) { return v <= 0.0; });
}

Completion completion_time(const CompiledTask& task, const TaskProgress& progress, const TaskRates& rates) {
  Completion c;
  c.block = task.pe;
  if (progress.compute > 0.0) {
    if (!(rates.compute > 0.0)) throw ZeroRateError("task " + to_string(task.key) + " has no compute rate");
    c.seconds = progress.compute * rates.pe_share / task.peak_ops_s;
  }
  for (std::size_t k = 0; k < progress.streams.size(); ++k) {
    if (progress.streams[k] <= 0.0) continue;
    const StreamRate& r = rates.streams[k];
    if (!(r.rate > 0.0)) throw ZeroRateError("task " + to_string(task.key) + " has a starved data stream");
    double t = progress.streams[k] / r.rate;
    if (t > c.seconds) {
      c.seconds = t;
      c.resource = static_cast<int>(k);
      c.block = r.bottleneck;
    }
  }
  return c;
}

double phase_duration(std::span<const Completion> completions) {
  if (completions.empty()) throw NoRunningTaskError("phase with no running task");
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : completions) d = std::min(d, c.seconds);
  return d;
}

BlockId TaskStats::dominant_bottleneck() const {
  BlockId best = pe;
  double t = -1.0;
  for (const auto& [block, s] : bottleneck_s) {
    if (s > t) {
      t = s;
      best = block;
    }
  }
  return best;
}

double SimResult::max_conservation_error() const {
  double worst = 0.0;
  auto rel = [](double done, double total) {
    if (total == 0.0) return std::abs(done);
    return std::abs(done - total) / total;
  };
  for (const auto& t : tasks) {
    worst = std::max(worst, rel(t.processed_ops, t.total_ops));
    worst = std::max(worst, rel(t.processed_bytes, t.total_bytes));
  }
  return worst;
}

const TaskStats& SimResult::task(const TaskKey& key) const {
  for (const auto& t : tasks)
    if (t.key == key) return t;
  throw InvalidDesignError("no task " + to_string(key) + " in result");
}

namespace detail {

void finalize_result(const SimModel& model, SimResult& r) {
  double leak = 0.0;
  r.area_mm2 = 0.0;
  std::vector<double> block_energy(model.blocks.size());
  for (std::size_t b = 0; b < model.blocks.size(); ++b) {
    leak += model.blocks[b].leak_w;
    r.area_mm2 += model.blocks[b].area_mm2;
    r.block_area_mm2.emplace_hint(r.block_area_mm2.end(), model.blocks[b].id, model.blocks[b].area_mm2);
    block_energy[b] = model.blocks[b].leak_w * r.makespan_s;
  }
  r.dynamic_energy_j = 0.0;
  for (std::size_t i = 0; i < model.tasks.size(); ++i) {
    TaskStats& ts = r.tasks[i];
    ts.energy_j.reserve(model.task_block_energy[i].size());
    for (const auto& [block, e] : model.task_block_energy[i]) {
      // Energy tracks processed work, which equals the task's total on completion.
      ts.energy_j.append(model.blocks[block].id, e);
      block_energy[block] += e;
      r.dynamic_energy_j += e;
    }
  }
  for (std::size_t b = 0; b < model.blocks.size(); ++b)
    r.block_energy_j.emplace_hint(r.block_energy_j.end(), model.blocks[b].id, block_energy[b]);
  r.energy_j = r.dynamic_energy_j + leak * r.makespan_s;
  r.power_w = r.makespan_s > 0.0 ? r.energy_j / r.makespan_s : leak;
}

}  // namespace detail

namespace {

// Multiplicative slack used to decide which tasks end with the phase.
constexpr double kFinishSlack = 1e-12;

bool has_work(const CompiledTask& t) { return t.ops > 0.0 || t.total_bytes() > 0.0; }

}  // namespace

SimResult simulate(const DesignPoint& design, const WorkloadSet& workloads, const IpDatabase& db,
                   const SimOptions& options) {
  const SimModel model = SimModel::compile(design, workloads, db);
  const std::size_t n = model.tasks.size();

  SimResult r;
  r.tasks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = model.tasks[i];
    r.tasks[i].key = t.key;
    r.tasks[i].pe = model.blocks[t.pe].id;
    r.tasks[i].total_ops = t.ops;
    r.tasks[i].total_bytes = t.total_bytes();
  }
  for (const auto& w : model.workloads) r.workload_latency_s[w] = 0.0;

  std::vector<TaskProgress> progress(n);
  std::vector<std::size_t> waiting(n);
  for (std::size_t i = 0; i < n; ++i) {
    progress[i] = TaskProgress::fresh(model.tasks[i]);
    waiting[i] = model.tasks[i].preds.size();
  }

  RateEngine engine(model);
  std::vector<std::size_t> running;
  std::vector<TaskRates> rates;
  std::vector<Completion> completions;
  std::vector<std::size_t> released;
  const std::size_t nb = model.blocks.size();
  std::vector<char> block_used(nb);
  std::vector<char> pe_active(nb);
  // Per-block and per-task tallies, copied into the id-keyed maps at the end.
  std::vector<double> block_busy(nb, 0.0), block_bottleneck(nb, 0.0);
  std::vector<char> busy_seen(nb, 0), bottleneck_seen(nb, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> task_bottleneck(n);
  std::vector<double*> latency_of;
  for (const auto& w : model.workloads) latency_of.push_back(&r.workload_latency_s[w]);
  std::size_t done = 0;
  double now = 0.0;

  auto finish = [&](std::size_t i) {
    progress[i].state = TaskState::Done;
    r.tasks[i].finish_s = now;
    double& lat = *latency_of[model.tasks[i].workload];
    lat = std::max(lat, now);
    ++done;
    for (std::size_t s : model.tasks[i].succs)
      if (--waiting[s] == 0) released.push_back(s);
  };

  for (std::size_t i = 0; i < n; ++i)
    if (waiting[i] == 0) released.push_back(i);

  std::vector<std::size_t> starting, batch, still;
  for (;;) {
    // Start everything that became ready at `now`; zero-work tasks complete on the spot.
    starting.clear();
    while (!released.empty()) {
      batch.clear();
      batch.swap(released);
      std::sort(batch.begin(), batch.end());
      for (std::size_t i : batch) {
        r.tasks[i].start_s = now;
        if (!has_work(model.tasks[i])) {
          finish(i);
        } else {
          progress[i].state = TaskState::Running;
          starting.push_back(i);
        }
      }
    }
    std::sort(starting.begin(), starting.end());
    running.insert(running.end(), starting.begin(), starting.end());

    if (running.empty()) {
      if (done == n) break;
      throw NoRunningTaskError("no runnable task with " + std::to_string(n - done) + " unfinished");
    }

    engine.compute(running, rates);
    completions.resize(running.size());
    for (std::size_t k = 0; k < running.size(); ++k)
      completions[k] = completion_time(model.tasks[running[k]], progress[running[k]], rates[k]);
    const double duration = phase_duration(completions);
    const double cutoff = duration * (1.0 + kFinishSlack);

    PhaseRecord phase;
    if (options.record_phases) {
      phase.index = r.phase_count;
      phase.start_s = now;
      phase.duration_s = duration;
    }
    std::fill(block_used.begin(), block_used.end(), 0);
    std::fill(pe_active.begin(), pe_active.end(), 0);

    for (std::size_t k = 0; k < running.size(); ++k) {
      const std::size_t i = running[k];
      const CompiledTask& task = model.tasks[i];
      TaskProgress& p = progress[i];
      const bool ends = completions[k].seconds <= cutoff;

      if (p.compute > 0.0) pe_active[task.pe] = 1;
      block_used[task.pe] = 1;
      const double ops = ends ? p.compute : std::min(p.compute, rates[k].compute * duration);
      r.tasks[i].processed_ops += ops;
      p.compute = ends ? 0.0 : std::max(0.0, p.compute - ops);
      for (std::size_t s = 0; s < task.streams.size(); ++s) {
        const auto& stream = task.streams[s];
        if (p.streams[s] > 0.0) {
          for (std::size_t h = stream.hop_begin; h < stream.hop_end; ++h) block_used[model.hops[h]] = 1;
          block_used[stream.mem] = 1;
        }
        const double bytes = ends ? p.streams[s] : std::min(p.streams[s], rates[k].streams[s].rate * duration);
        r.tasks[i].processed_bytes += bytes;
        p.streams[s] = ends ? 0.0 : std::max(0.0, p.streams[s] - bytes);
      }

      const std::size_t limiter = completions[k].block;
      auto& tb = task_bottleneck[i];
      auto hit = std::find_if(tb.begin(), tb.end(), [&](const auto& e) { return e.first == limiter; });
      if (hit == tb.end())
        tb.emplace_back(limiter, duration);
      else
        hit->second += duration;
      block_bottleneck[limiter] += duration;
      bottleneck_seen[limiter] = 1;
      r.bottleneck_histogram[model.blocks[limiter].kind] += duration;
      if (options.record_phases) {
        phase.running.push_back(task.key);
        phase.bottleneck.push_back(model.blocks[limiter].id);
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if (block_used[b]) {
        block_busy[b] += duration;
        busy_seen[b] = 1;
      }
      if (pe_active[b]) ++phase.active_pes;
    }
    if (options.record_phases) r.phases.push_back(std::move(phase));
    ++r.phase_count;

    now += duration;
    still.clear();
    for (std::size_t k = 0; k < running.size(); ++k) {
      if (completions[k].seconds <= cutoff)
        finish(running[k]);
      else
        still.push_back(running[k]);
    }
    running.swap(still);
  }

  for (std::size_t b = 0; b < nb; ++b) {
    if (busy_seen[b]) r.block_busy_s.emplace_hint(r.block_busy_s.end(), model.blocks[b].id, block_busy[b]);
    if (bottleneck_seen[b])
      r.block_bottleneck_s.emplace_hint(r.block_bottleneck_s.end(), model.blocks[b].id, block_bottleneck[b]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [b, secs] : task_bottleneck[i]) r.tasks[i].bottleneck_s.append(model.blocks[b].id, secs);

  r.makespan_s = now;
  detail::finalize_result(model, r);
  return r;
}

PowerArea estimate_power_area(const DesignPoint& design, const SimResult& result, const IpDatabase& db) {
  PowerArea pa;
  double leak = 0.0;
  for (const auto& [id, b] : design.topology.blocks()) {
    switch (b.kind) {
      case BlockKind::PeGpp: {
        const GppEntry* e = db.find_gpp(b.freq_mhz);
        if (!e) throw MissingDatabaseEntryError("no GPP entry for " + id);
        leak += e->leak_w;
        pa.area_mm2 += e->area_mm2;
        break;
      }
      case BlockKind::PeAcc:
        for (const auto& key : design.tasks_on(id)) {
          const AccEntry* e = db.find_acc(key.task, b.unroll);
          if (!e) throw MissingDatabaseEntryError("no accelerator entry for task " + to_string(key));
          leak += e->leak_w;
          pa.area_mm2 += e->area_mm2;
        }
        break;
      case BlockKind::Noc: {
        const NocEntry* e = db.find_noc(b.freq_mhz, b.bus_width_b);
        if (!e) throw MissingDatabaseEntryError("no NoC entry for " + id);
        leak += e->leak_w;
        pa.area_mm2 += e->area_mm2;
        break;
      }
      case BlockKind::MemDram:
      case BlockKind::MemSram: {
        const MemEntry* e = db.find_mem(mem_kind(b.kind), b.freq_mhz, b.bus_width_b);
        if (!e) throw MissingDatabaseEntryError("no memory entry for " + id);
        leak += e->leak_w;
        pa.area_mm2 += e->area_mm2;
        break;
      }
    }
  }
  pa.power_w = result.makespan_s > 0.0 ? result.energy_j / result.makespan_s : leak;
  return pa;
}

}  // namespace dse
