#include <benchmark/benchmark.h>

#include "dse/drivers.hpp"
#include "dse/explorer.hpp"
#include "dse/oracle.hpp"
#include "dse/simulator.hpp"

using namespace dse;

namespace {

struct Fixture {
  WorkloadSet w;
  IpDatabase db;
  DesignPoint design;
  Budget budget;

  explicit Fixture(std::size_t tasks) {
    SynthSpec a, b;
    a.name = "a";
    a.shape = GraphShape::RandomDag;
    a.tasks = tasks;
    a.seed = 11;
    b.name = "b";
    b.id_prefix = "U";
    b.shape = GraphShape::Diamond;
    b.tasks = tasks;
    b.seed = 12;
    w = {synth_workload(a), synth_workload(b)};
    db = synth_database(w);
    design = base_design(w, db);
    const auto base = simulate(design, w, db);
    for (const auto& [name, lat] : base.workload_latency_s) budget.latency_s[name] = lat * 0.2;
    budget.power_w = base.power_w * 1.5;
    budget.area_mm2 = base.area_mm2 * 4.0;
  }
};

void BM_Simulate(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  SimOptions opt;
  opt.record_phases = false;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(f.design, f.w, f.db, opt));
}
BENCHMARK(BM_Simulate)->Arg(8)->Arg(16)->Arg(32);

void BM_SimulateRandomCase(benchmark::State& state) {
  const auto c = random_case(static_cast<std::uint64_t>(state.range(0)));
  SimOptions opt;
  opt.record_phases = false;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c.design, c.workloads, c.db, opt));
}
BENCHMARK(BM_SimulateRandomCase)->Arg(1)->Arg(2)->Arg(3);

void BM_Oracle(benchmark::State& state) {
  Fixture f(8);
  const double rel = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_simulate_relative(f.design, f.w, f.db, rel));
}
BENCHMARK(BM_Oracle)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Anneal(benchmark::State& state) {
  Fixture f(8);
  ExplorerConfig cfg;
  cfg.max_iterations = static_cast<std::size_t>(state.range(0));
  cfg.stop_on_budget = false;
  for (auto _ : state) benchmark::DoNotOptimize(anneal(f.w, f.db, f.budget, cfg));
}
BENCHMARK(BM_Anneal)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
