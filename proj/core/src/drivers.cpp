#include "dse/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dse/errors.hpp"
#include "dse/oracle.hpp"
#include "dse/simulator.hpp"

namespace dse {

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.power_w <= b.power_w && a.area_mm2 <= b.area_mm2 && (a.power_w < b.power_w || a.area_mm2 < b.area_mm2);
}

std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < points.size() && keep; ++j) {
      if (i == j) continue;
      if (dominates(points[j], points[i])) keep = false;
      // identical points: keep the first occurrence only
      if (j < i && points[j].power_w == points[i].power_w && points[j].area_mm2 == points[i].area_mm2) keep = false;
    }
    if (keep) out.push_back(points[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.power_w != b.power_w ? a.power_w < b.power_w : a.area_mm2 < b.area_mm2;
  });
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- sweep

SweepResult run_sweep(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                      const SweepConfig& config) {
  if (workloads.empty()) throw InvalidSpecError("sweep needs at least one workload");
  if (!(config.grid_pct > 0.0 && config.grid_pct <= 100.0)) throw InvalidSpecError("grid_pct must lie in (0, 100]");
  budget.validate();
  SweepResult res;
  const auto steps = static_cast<std::size_t>(std::floor(100.0 / config.grid_pct + 1e-9));

  for (const auto& g : workloads) {
    auto lat = budget.latency_s.find(g.name());
    if (lat == budget.latency_s.end()) throw InvalidSpecError("no latency budget for workload '" + g.name() + "'");
    std::vector<ParetoPoint> found;
    for (std::size_t i = 1; i <= steps; ++i) {
      const double pct = config.grid_pct * static_cast<double>(i);
      Budget b;
      b.latency_s[g.name()] = lat->second;
      b.power_w = budget.power_w * pct / 100.0;
      b.area_mm2 = budget.area_mm2 * pct / 100.0;
      b.alpha_met = budget.alpha_met;
      ExploreResult r = anneal({g}, db, b, config.explorer);
      ++res.runs;
      if (r.best_metrics.latency_s.at(g.name()) > lat->second) continue;
      ParetoPoint p;
      p.power_w = r.best_metrics.power_w;
      p.area_mm2 = r.best_metrics.area_mm2;
      p.grid_pct = pct;
      p.latency_s = r.best_metrics.latency_s;
      found.push_back(std::move(p));
    }
    res.fronts[g.name()] = pareto_front(found);
  }

  std::size_t total = 1;
  for (const auto& [_, f] : res.fronts) {
    if (f.empty()) {
      total = 0;
      break;
    }
    if (total > config.max_permutations / f.size()) throw SpaceTooLargeError("too many front permutations");
    total *= f.size();
  }
  std::vector<const std::vector<ParetoPoint>*> fronts;
  for (const auto& [_, f] : res.fronts) fronts.push_back(&f);
  std::vector<std::size_t> idx(fronts.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    ParetoPoint c;
    for (std::size_t w = 0; w < fronts.size(); ++w) {
      const ParetoPoint& p = (*fronts[w])[idx[w]];
      c.power_w += p.power_w;
      c.area_mm2 += p.area_mm2;
      for (const auto& [name, l] : p.latency_s) c.latency_s[name] = l;
      c.parts.push_back(idx[w]);
    }
    res.combined.push_back(std::move(c));
    for (std::size_t w = fronts.size(); w-- > 0;) {
      if (++idx[w] < fronts[w]->size()) break;
      idx[w] = 0;
    }
  }
  res.combined_front = pareto_front(res.combined);
  return res;
}

// ---------------------------------------------------------------- divide and conquer

SystemOutcome outcome_of(const MetricValues& v, const Budget& b) {
  SystemOutcome o;
  o.metrics = v;
  o.distance = distance_to_budget(v, b);
  o.met = meets_budget(v, b);
  for (const auto& t : metric_terms(v, b)) o.signed_pct[t.metric.label()] = (t.budget - t.design) / t.budget * 100.0;
  return o;
}

DivideConquerResult run_divide_conquer(const WorkloadSet& workloads, const IpDatabase& db, const Budget& budget,
                                       const ExplorerConfig& config,
                                       const std::optional<std::map<std::string, SubBudget>>& sub_budgets) {
  if (workloads.empty()) throw InvalidSpecError("divide-and-conquer needs at least one workload");
  budget.validate();
  DivideConquerResult res;
  MetricValues composed;
  const double share = 1.0 / static_cast<double>(workloads.size());
  for (const auto& g : workloads) {
    Budget b;
    auto lat = budget.latency_s.find(g.name());
    if (lat == budget.latency_s.end()) throw InvalidSpecError("no latency budget for workload '" + g.name() + "'");
    b.latency_s[g.name()] = lat->second;
    b.alpha_met = budget.alpha_met;
    if (sub_budgets) {
      auto it = sub_budgets->find(g.name());
      if (it == sub_budgets->end()) throw InvalidSpecError("no sub-budget for workload '" + g.name() + "'");
      b.power_w = it->second.power_w;
      b.area_mm2 = it->second.area_mm2;
    } else {
      b.power_w = budget.power_w * share;
      b.area_mm2 = budget.area_mm2 * share;
    }
    ExploreResult r = anneal({g}, db, b, config);
    composed.latency_s[g.name()] = r.best_metrics.latency_s.at(g.name());
    composed.power_w += r.best_metrics.power_w;
    composed.area_mm2 += r.best_metrics.area_mm2;
    res.parts.emplace(g.name(), std::move(r));
  }
  res.myopic = outcome_of(composed, budget);
  ExploreResult whole = anneal(workloads, db, budget, config);
  res.holistic = outcome_of(whole.best_metrics, budget);
  auto rel = [](double a, double b) { return b != 0.0 ? (a - b) / b : 0.0; };
  res.power_degradation = rel(res.myopic.metrics.power_w, res.holistic.metrics.power_w);
  res.area_degradation = rel(res.myopic.metrics.area_mm2, res.holistic.metrics.area_mm2);
  res.distance_degradation = res.myopic.distance - res.holistic.distance;
  return res;
}

// ---------------------------------------------------------------- validation corpus

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t uniform(std::size_t lo, std::size_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

DesignPoint random_design(const WorkloadSet& workloads, const IpDatabase& db, Rng& rng, std::size_t max_blocks) {
  if (max_blocks < 3) throw InvalidSpecError("a design needs at least three blocks");
  std::vector<TaskKey> keys;
  for (const auto& g : workloads)
    for (const auto& t : g.tasks()) keys.push_back({g.name(), t.id});
  if (keys.empty()) throw EmptyGraphError("no tasks to map");

  std::vector<int> gpp_freqs;
  for (const auto& e : db.gpp()) gpp_freqs.push_back(e.freq_mhz);
  std::vector<std::pair<int, int>> nocs, drams, srams;
  for (const auto& e : db.noc()) nocs.emplace_back(e.freq_mhz, e.width_b);
  for (const auto& e : db.mem()) (e.kind == MemKind::Dram ? drams : srams).emplace_back(e.freq_mhz, e.width_b);
  if (gpp_freqs.empty()) throw MissingGppEntryError("database has no GPP entries");
  if (nocs.empty() || (drams.empty() && srams.empty()))
    throw MissingDatabaseEntryError("database lacks NoC or memory entries");

  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::size_t budget = max_blocks;
    const std::size_t n_noc = uniform(1, std::min<std::size_t>(3, budget - 2), rng);
    const std::size_t n_mem = uniform(1, std::min<std::size_t>(3, budget - n_noc - 1), rng);
    const std::size_t n_pe = uniform(1, std::min<std::size_t>({6, keys.size(), budget - n_noc - n_mem}), rng);

    DesignPoint d;
    for (std::size_t i = 0; i < n_noc; ++i) {
      auto [f, w] = pick(nocs, rng);
      d.topology.add({"noc" + std::to_string(i), BlockKind::Noc, f, w, static_cast<int>(uniform(1, 4, rng)), 1});
      if (i) d.topology.connect("noc" + std::to_string(i - 1), "noc" + std::to_string(i));
    }
    for (std::size_t i = 0; i < n_mem; ++i) {
      const bool sram = !srams.empty() && (drams.empty() || uniform(0, 3, rng) == 0);
      auto [f, w] = pick(sram ? srams : drams, rng);
      BlockId id = "mem" + std::to_string(i);
      d.topology.add({id, sram ? BlockKind::MemSram : BlockKind::MemDram, f, w, 1, 1});
      d.topology.connect(id, "noc" + std::to_string(uniform(0, n_noc - 1, rng)));
    }
    for (std::size_t i = 0; i < n_pe; ++i) {
      BlockId id = "pe" + std::to_string(i);
      d.topology.add({id, BlockKind::PeGpp, pick(gpp_freqs, rng), 0, 1, 1});
      d.topology.connect(id, "noc" + std::to_string(uniform(0, n_noc - 1, rng)));
    }
    for (const auto& k : keys) {
      d.mapping.task_to_pe[k] = "pe" + std::to_string(uniform(0, n_pe - 1, rng));
      d.mapping.task_to_mem[k] = "mem" + std::to_string(uniform(0, n_mem - 1, rng));
    }
    // Turn some PEs into accelerators where every hosted task has an entry.
    for (std::size_t i = 0; i < n_pe; ++i) {
      BlockId id = "pe" + std::to_string(i);
      auto hosted = d.tasks_on(id);
      if (hosted.empty() || uniform(0, 2, rng) != 0) continue;
      const int unroll = 1 << uniform(0, 3, rng);
      bool ok = std::all_of(hosted.begin(), hosted.end(), [&](const TaskKey& k) { return db.find_acc(k.task, unroll); });
      if (!ok) continue;
      auto& b = d.topology.block(id);
      b.kind = BlockKind::PeAcc;
      b.unroll = unroll;
    }
    if (validate_design(d, workloads, &db).empty()) return d;
  }
  throw InvalidDesignError("could not draw a valid random design");
}

ValidationCase random_case(std::uint64_t seed, std::size_t max_tasks, std::size_t max_blocks) {
  Rng rng(seed);
  ValidationCase c;
  const std::size_t n_workloads = std::min<std::size_t>(uniform(1, 2, rng), std::max<std::size_t>(1, max_tasks / 2));
  std::size_t remaining = max_tasks;
  const std::vector<GraphShape> shapes = {GraphShape::Chain, GraphShape::Diamond, GraphShape::FanOut,
                                          GraphShape::Independent, GraphShape::RandomDag};
  for (std::size_t w = 0; w < n_workloads; ++w) {
    SynthSpec s;
    s.name = "w" + std::to_string(w);
    s.shape = pick(shapes, rng);
    const std::size_t cap = w + 1 == n_workloads ? remaining : remaining / 2;
    s.tasks = uniform(std::min<std::size_t>(2, cap), std::max<std::size_t>(2, cap), rng);
    s.tasks = std::min(s.tasks, cap);
    if (s.shape == GraphShape::Diamond && s.tasks < 3) s.shape = GraphShape::Chain;
    remaining -= s.tasks;
    s.edge_probability = 0.3;
    s.seed = rng();
    c.workloads.push_back(synth_workload(s));
  }
  c.db = synth_database(c.workloads);
  c.design = random_design(c.workloads, c.db, rng, max_blocks);
  return c;
}

ValidationSummary run_validation(std::size_t trials, double rel_dt, std::uint64_t seed, std::size_t max_tasks,
                                 std::size_t max_blocks) {
  if (!(rel_dt > 0.0)) throw InvalidSpecError("relative dt must be positive");
  using clock = std::chrono::steady_clock;
  ValidationSummary s;
  const auto t_begin = clock::now();
  std::vector<double> speedups;
  for (std::size_t i = 0; i < trials; ++i) {
    ValidationCase c = random_case(seed + i, max_tasks, max_blocks);
    ValidationRow row;
    row.trial = i;
    for (const auto& g : c.workloads) row.tasks += g.size();
    row.blocks = c.design.topology.blocks().size();

    // Repeat the phase simulation until the timing is measurable.
    SimResult fast;
    std::size_t reps = 0;
    const auto p0 = clock::now();
    do {
      fast = simulate(c.design, c.workloads, c.db, SimOptions{false});
      ++reps;
    } while (std::chrono::duration<double>(clock::now() - p0).count() < 2e-3);
    row.phase_wall_s = std::chrono::duration<double>(clock::now() - p0).count() / static_cast<double>(reps);

    OracleConfig oc;
    oc.dt_s = rel_dt * fast.makespan_s;
    const auto o0 = clock::now();
    SimResult slow = oracle_simulate(c.design, c.workloads, c.db, oc);
    row.oracle_wall_s = std::chrono::duration<double>(clock::now() - o0).count();

    row.phase_latency_s = fast.makespan_s;
    row.oracle_latency_s = slow.makespan_s;
    for (const auto& [w, l] : fast.workload_latency_s) {
      const double o = slow.workload_latency_s.at(w);
      row.rel_error = std::max(row.rel_error, o > 0.0 ? std::abs(l - o) / o : std::abs(l - o));
    }
    row.makespan_rel_error = slow.makespan_s > 0.0 ? std::abs(fast.makespan_s - slow.makespan_s) / slow.makespan_s
                                                   : std::abs(fast.makespan_s - slow.makespan_s);
    s.max_makespan_rel_error = std::max(s.max_makespan_rel_error, row.makespan_rel_error);
    row.conservation_error = std::max(fast.max_conservation_error(), slow.max_conservation_error());
    s.max_rel_error = std::max(s.max_rel_error, row.rel_error);
    speedups.push_back(row.speedup());
    s.rows.push_back(row);
  }
  s.median_speedup = median(speedups);
  s.total_wall_s = std::chrono::duration<double>(clock::now() - t_begin).count();
  return s;
}

// ---------------------------------------------------------------- CSV

const char* const kParetoCsvHeader = "scope,index,grid_pct,power_w,area_mm2,on_front,parts";
const char* const kValidationCsvHeader =
    "trial,tasks,blocks,phase_latency_s,oracle_latency_s,rel_error,phase_wall_s,oracle_wall_s,speedup";
const char* const kDivideConquerCsvHeader = "mode,metric,value,signed_distance_pct";

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& r, const RunInfo& info) {
  os << provenance_line(info) << "\n" << kParetoCsvHeader << "\n";
  for (const auto& [name, front] : r.fronts)
    for (std::size_t i = 0; i < front.size(); ++i)
      os << csv_field(name) << ',' << i << ',' << fmt(front[i].grid_pct) << ',' << fmt(front[i].power_w) << ','
         << fmt(front[i].area_mm2) << ",1,\n";
  for (std::size_t i = 0; i < r.combined.size(); ++i) {
    const auto& p = r.combined[i];
    bool on = std::any_of(r.combined_front.begin(), r.combined_front.end(),
                          [&](const ParetoPoint& q) { return q.parts == p.parts; });
    std::string parts;
    for (std::size_t k : p.parts) parts += (parts.empty() ? "" : ";") + std::to_string(k);
    os << "system," << i << ",," << fmt(p.power_w) << ',' << fmt(p.area_mm2) << ',' << (on ? 1 : 0) << ',' << parts
       << "\n";
  }
}

void write_validation_csv(std::ostream& os, const ValidationSummary& s, const RunInfo& info) {
  os << provenance_line(info) << "\n" << kValidationCsvHeader << "\n";
  for (const auto& r : s.rows)
    os << r.trial << ',' << r.tasks << ',' << r.blocks << ',' << fmt(r.phase_latency_s) << ','
       << fmt(r.oracle_latency_s) << ',' << fmt(r.rel_error) << ',' << fmt(r.phase_wall_s) << ','
       << fmt(r.oracle_wall_s) << ',' << fmt(r.speedup()) << "\n";
}

void write_divide_conquer_csv(std::ostream& os, const DivideConquerResult& r, const RunInfo& info) {
  os << provenance_line(info) << "\n" << kDivideConquerCsvHeader << "\n";
  auto rows = [&](const char* mode, const SystemOutcome& o) {
    auto emit = [&](const std::string& label, double design) {
      os << mode << ',' << csv_field(label) << ',' << fmt(design) << ',';
      auto it = o.signed_pct.find(label);
      os << (it == o.signed_pct.end() ? "" : fmt(it->second)) << "\n";
    };
    for (const auto& [w, l] : o.metrics.latency_s) emit("latency:" + w, l);
    emit("power", o.metrics.power_w);
    emit("area", o.metrics.area_mm2);
    os << mode << ",distance," << fmt(o.distance) << ",\n";
  };
  rows("myopic", r.myopic);
  rows("holistic", r.holistic);
}

}  // namespace dse
