#include <doctest.h>

#include <algorithm>

#include "dse/errors.hpp"
#include "dse/report.hpp"
#include "dse/simulator.hpp"
#include "fixtures.hpp"

using namespace dse;

namespace {

TaskGraph one(double f, double ir, double iw, double burst = 64.0) {
  return TaskGraph::build("w", {fx::task("T", f, ir, iw, burst)}, {});
}

}  // namespace

TEST_CASE("contention-free single task hits the roofline closed form exactly") {
  auto db = fx::round_db();
  struct Case {
    double f, ir, iw;
    int pe, noc, nw, mem, mw;
  };
  for (Case c : {Case{1e6, 8, 8, 100, 100, 4, 100, 4}, Case{1e6, 0.01, 4, 100, 100, 4, 200, 8},
                 Case{4e5, 2, 0.001, 800, 200, 16, 100, 32}, Case{3e6, 0.5, 0.25, 400, 800, 4, 800, 256},
                 Case{7e5, 0, 0, 200, 100, 4, 100, 4}}) {
    WorkloadSet w{one(c.f, c.ir, c.iw)};
    auto d = fx::single(w, c.pe, c.noc, c.nw, c.mem, c.mw);
    auto r = fx::sim(d, w, db);
    const double p = c.pe * 1e6;
    const double b = std::min(c.noc * 1e6 * c.nw, c.mem * 1e6 * c.mw);
    const double dr = c.ir > 0 ? c.f / c.ir : 0.0;
    const double dw = c.iw > 0 ? c.f / c.iw : 0.0;
    const double expect = std::max({c.f / p, dr / b, dw / b});
    CHECK(fx::same(r.workload_latency_s.at("w"), expect));
    CHECK(r.max_conservation_error() <= 1e-12);
  }
}

TEST_CASE("n identical compute-only co-runners on one GPP finish at n f / p") {
  auto db = fx::round_db();
  for (std::size_t n = 1; n <= 9; ++n) {
    for (double f : {1e6, 3.7e5, 12345.0}) {
      WorkloadSet w{fx::independent("w", n, f)};
      auto r = fx::sim(fx::single(w, 200), w, db);
      const double expect = static_cast<double>(n) * f / 200e6;
      CHECK(fx::same(r.makespan_s, expect));
      for (const auto& t : r.tasks) CHECK(fx::same(t.finish_s, expect));
      CHECK(r.phase_count == 1);
    }
  }
}

TEST_CASE("diamond on one GPP follows the phase schedule") {
  auto db = fx::round_db();
  WorkloadSet w{fx::diamond("d", 1e6, 0)};
  auto r = fx::sim(fx::single(w), w, db);
  // A alone, B||C at half speed until B ends, C alone, D alone
  CHECK(r.makespan_s == doctest::Approx(5e6 / 1e8).epsilon(1e-12));
  CHECK(r.task({"d", "B"}).finish_s == doctest::Approx(3e6 / 1e8));
  CHECK(r.task({"d", "C"}).finish_s == doctest::Approx(4e6 / 1e8));
  CHECK(r.phase_count == 4);
  REQUIRE(r.phases.size() == 4);
  CHECK(r.phases[1].running.size() == 2);
  CHECK(accelerator_level_parallelism(r) == doctest::Approx(1.0));
}

TEST_CASE("NoC aggregate share splits bandwidth between users") {
  auto db = fx::round_db();
  // Two communication-bound tasks on two PEs behind one NoC; the memory is wide.
  WorkloadSet w{TaskGraph::build("w", {fx::task("A", 1, 1e-6), fx::task("B", 1, 1e-6)}, {})};
  auto d = fx::single(w, 100, 100, 4, 800, 256);
  d.topology.add({"pe1", BlockKind::PeGpp, 100, 0, 1, 1});
  d.topology.connect("pe1", "noc0");
  d.mapping.task_to_pe[{"w", "B"}] = "pe1";
  auto r = fx::sim(d, w, db);
  const double bytes = 1.0 / 1e-6;
  CHECK(r.makespan_s == doctest::Approx(bytes / (4e8 / 2)));
  CHECK(r.task({"w", "A"}).dominant_bottleneck() == "noc0");
  CHECK(r.bottleneck_histogram.at(BlockKind::Noc) > 0.0);
}

TEST_CASE("links and memory share bandwidth in proportion to bursts") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("A", 1, 1e-6, 0, 64), fx::task("B", 1, 1e-6, 0, 192)}, {})};
  auto d = fx::single(w, 100, 100, 4, 800, 256);
  d.topology.add({"pe1", BlockKind::PeGpp, 100, 0, 1, 1});
  d.topology.connect("pe1", "noc0");
  d.mapping.task_to_pe[{"w", "B"}] = "pe1";
  auto model = SimModel::compile(d, w, db);
  std::vector<std::size_t> both{0, 1};
  auto rates = block_rates(model, both);
  const double b = 4e8;
  CHECK(rates[0].streams[0].rate == doctest::Approx(b * 64 / 256));  // one link, burst share
  CHECK(rates[1].streams[0].rate == doctest::Approx(b / 2));         // capped by the aggregate share

  d.topology.block("noc0").links = 2;
  auto model2 = SimModel::compile(d, w, db);
  auto rates2 = block_rates(model2, both);
  CHECK(rates2[0].streams[0].rate == doctest::Approx(b / 2));
  CHECK(rates2[1].streams[0].rate == doctest::Approx(b / 2));

  // Memory burst share: narrow memory, wide NoC.
  auto m = fx::single(w, 100, 800, 256, 100, 4);
  m.topology.add({"pe1", BlockKind::PeGpp, 100, 0, 1, 1});
  m.topology.connect("pe1", "noc0");
  m.mapping.task_to_pe[{"w", "B"}] = "pe1";
  auto model3 = SimModel::compile(m, w, db);
  auto rates3 = block_rates(model3, both);
  CHECK(rates3[0].streams[0].rate == doctest::Approx(4e8 * 64 / 256));
  CHECK(rates3[1].streams[0].rate == doctest::Approx(4e8 * 192 / 256));
  CHECK(model3.blocks[rates3[0].streams[0].bottleneck].id == "mem0");
}

TEST_CASE("read and write use separate channels") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("A", 1, 1e-6, 0), fx::task("B", 1, 0, 1e-6)}, {})};
  auto d = fx::single(w);
  d.topology.add({"pe1", BlockKind::PeGpp, 100, 0, 1, 1});
  d.topology.connect("pe1", "noc0");
  d.mapping.task_to_pe[{"w", "B"}] = "pe1";
  auto r = fx::sim(d, w, db);
  CHECK(r.makespan_s == doctest::Approx(1e6 / 4e8));  // no sharing across directions
}

TEST_CASE("ties between equal NoC and memory go to the NoC") {
  auto db = fx::round_db();
  WorkloadSet w{one(1, 1e-6, 0)};
  auto r = fx::sim(fx::single(w), w, db);
  CHECK(r.tasks[0].dominant_bottleneck() == "noc0");
}

TEST_CASE("zero-work tasks complete instantly") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("A", 0), fx::task("B", 1e6)}, {{"A", "B", 0}})};
  auto r = fx::sim(fx::single(w), w, db);
  CHECK(r.task({"w", "A"}).finish_s == 0.0);
  CHECK(fx::same(r.makespan_s, 1e6 / 1e8));
  WorkloadSet empty{TaskGraph::build("e", {fx::task("Z", 0)}, {})};
  auto z = fx::sim(fx::single(empty), empty, db);
  CHECK(z.makespan_s == 0.0);
  CHECK(z.power_w > 0.0);  // leakage only
}

TEST_CASE("energy, power and area") {
  auto db = fx::round_db();
  WorkloadSet w{one(1e6, 10, 0)};
  auto d = fx::single(w);
  auto r = fx::sim(d, w, db);
  const double bytes = 1e5;
  const double dyn = 1e-9 * 1e6 + bytes * (1e-12 + 1e-11);
  const double leak = 1e-3 + 1e-4 + 1e-4;
  CHECK(r.dynamic_energy_j == doctest::Approx(dyn));
  CHECK(r.energy_j == doctest::Approx(dyn + leak * r.makespan_s));
  CHECK(r.power_w == doctest::Approx(r.energy_j / r.makespan_s));
  CHECK(r.area_mm2 == doctest::Approx(1.0 + 0.04 + 1.004));
  auto pa = estimate_power_area(d, r, db);
  CHECK(pa.power_w == doctest::Approx(r.power_w));
  CHECK(pa.area_mm2 == doctest::Approx(r.area_mm2));
}

TEST_CASE("accelerators scale the reference GPP and sum hosted entries") {
  auto db = fx::round_db({"A", "B"});
  WorkloadSet w{TaskGraph::build("w", {fx::task("A", 1e6), fx::task("B", 1e6)}, {})};
  auto d = fx::single(w, 200);
  d.topology.block("pe0").kind = BlockKind::PeAcc;
  d.topology.block("pe0").unroll = 2;
  auto r = fx::sim(d, w, db);
  const double peak = 20.0 * 200e6;  // a_peak(unroll 2) x reference peak at 200 MHz
  CHECK(r.makespan_s == doctest::Approx(2 * 1e6 / peak));
  CHECK(r.block_area_mm2.at("pe0") == doctest::Approx(2 * 1.0));
  CHECK(r.area_mm2 == doctest::Approx(2.0 + 0.04 + 1.004));
}

TEST_CASE("workloads run concurrently with separate latencies") {
  auto db = fx::round_db();
  WorkloadSet w{fx::chain("a", 2, 1e6, 0), fx::chain("b", 1, 1e6, 0)};
  auto r = fx::sim(fx::single(w), w, db);
  CHECK(r.workload_latency_s.at("b") == doctest::Approx(2e6 / 1e8));
  CHECK(r.workload_latency_s.at("a") == doctest::Approx(3e6 / 1e8));
  CHECK(r.makespan_s == r.workload_latency_s.at("a"));
}

TEST_CASE("completion and phase helpers") {
  CompiledTask t;
  t.peak_ops_s = 10;
  t.streams.push_back({});
  TaskProgress p;
  p.compute = 10;
  p.streams = {20};
  TaskRates rates;
  rates.compute = 10;
  rates.streams = {{20, 3}};
  auto c = completion_time(t, p, rates);
  CHECK(c.seconds == 1.0);
  CHECK(c.resource == -1);  // compute wins the tie
  rates.streams[0].rate = 10;
  c = completion_time(t, p, rates);
  CHECK(c.resource == 0);
  CHECK(c.block == 3);
  rates.streams[0].rate = 0;
  CHECK_THROWS_AS(completion_time(t, p, rates), ZeroRateError);
  CHECK_THROWS_AS(phase_duration({}), NoRunningTaskError);
  std::vector<Completion> cs{{3.0, -1, 0}, {1.5, -1, 0}};
  CHECK(phase_duration(cs) == 1.5);
}

TEST_CASE("unreachable memories and missing entries fail compilation") {
  auto db = fx::round_db();
  WorkloadSet w{one(1, 1, 1)};
  auto d = fx::single(w);
  d.topology.disconnect("noc0", "mem0");
  CHECK_THROWS_AS(simulate(d, w, db), UnreachableError);
  d = fx::single(w);
  d.topology.block("pe0").kind = BlockKind::PeAcc;
  CHECK_THROWS_AS(simulate(d, w, db), MissingDatabaseEntryError);
}

TEST_CASE("conservation held on every simulation in this suite") {
  CHECK(fx::tally_count() > 0);
  CHECK(fx::tally_max_error() <= 1e-9);
}
