#include <doctest.h>

#include "dse/errors.hpp"
#include "dse/workload.hpp"
#include "fixtures.hpp"

using namespace dse;

TEST_CASE("two-task chain builds with topological order") {
  auto g = TaskGraph::build("w", {fx::task("T1", 10), fx::task("T2", 10)}, {{"T1", "T2", 1024}});
  CHECK(g.size() == 2);
  CHECK(g.edges().size() == 1);
  REQUIRE(g.topological_order().size() == 2);
  CHECK(g.tasks()[g.topological_order()[0]].id == "T1");
  CHECK(g.tasks()[g.topological_order()[1]].id == "T2");
  CHECK(g.reaches(0, 1));
  CHECK_FALSE(g.reaches(1, 0));
  CHECK_FALSE(g.parallel(0, 1));
}

TEST_CASE("cycles and dangling edges are rejected") {
  CHECK_THROWS_AS(TaskGraph::build("w", {fx::task("A", 1), fx::task("B", 1)}, {{"A", "B", 1}, {"B", "A", 1}}),
                  CycleError);
  CHECK_THROWS_AS(TaskGraph::build("w", {fx::task("A", 1)}, {{"A", "A", 1}}), CycleError);
  CHECK_THROWS_AS(TaskGraph::build("w", {fx::task("A", 1)}, {{"A", "Z", 1}}), DanglingEdgeError);
  CHECK_THROWS_AS(TaskGraph::build("w", {fx::task("A", 1), fx::task("A", 2)}, {}), SchemaError);
  CHECK_THROWS_AS(TaskGraph::build("", {fx::task("A", 1)}, {}), SchemaError);
  CHECK_THROWS_AS(TaskGraph::build("w", {fx::task("A", -1)}, {}), SchemaError);
}

TEST_CASE("topological ties break by id") {
  auto g = TaskGraph::build("w", {fx::task("c", 1), fx::task("a", 1), fx::task("b", 1)}, {});
  std::vector<std::string> order;
  for (auto i : g.topological_order()) order.push_back(g.tasks()[i].id);
  CHECK(order == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("read and write bytes come from edges or intensities") {
  auto g = TaskGraph::build("w", {fx::task("A", 800, 8, 4), fx::task("B", 100), fx::task("C", 100, 0, 0)},
                            {{"A", "B", 50}, {"A", "C", 30}, {"B", "C", 20}});
  const auto a = g.index_of("A"), b = g.index_of("B"), c = g.index_of("C");
  CHECK(g.read_bytes(a) == doctest::Approx(100));  // 800 / 8, no in-edges
  CHECK(g.write_bytes(a) == 80);                   // out-edges win over intensity
  CHECK(g.read_bytes(b) == 50);
  CHECK(g.write_bytes(b) == 20);
  CHECK(g.read_bytes(c) == 50);
  CHECK(g.write_bytes(c) == 0);  // sink without intensity
}

TEST_CASE("TaLP counts incomparable pairs") {
  CHECK(compute_talp(fx::chain("c", 5, 1, 1)) == 1.0);
  CHECK(compute_talp(fx::independent("i", 4, 1)) == 7.0);  // 1 + C(4,2)
  CHECK(compute_talp(fx::diamond("d", 1, 1)) == 2.0);      // B || C
}

TEST_CASE("LLP and characterization") {
  Task a = fx::task("A", 10, 2, 5);
  a.llp = 4;
  Task b = fx::task("B", 30, 2, 5);
  b.llp = 8;
  auto g = TaskGraph::build("w", {a, b}, {{"A", "B", 10}});
  CHECK(compute_llp_avg(g) == 6.0);
  auto c = characterize(g);
  CHECK(c.avg_f == 20.0);
  CHECK(c.avg_llp == 6.0);
  CHECK(c.talp == 1.0);
  // A reads 10/2 = 5 and writes 10; B reads 10 and writes 30/5 = 6.
  CHECK(c.avg_data_movement == doctest::Approx((5.0 + 10.0 + 10.0 + 6.0) / 2));
  CHECK_THROWS_AS(compute_llp_avg(TaskGraph()), EmptyGraphError);
}

TEST_CASE("synthetic workloads are deterministic and shaped") {
  SynthSpec s;
  s.tasks = 12;
  s.seed = 7;
  for (auto shape : {GraphShape::Chain, GraphShape::Diamond, GraphShape::FanOut, GraphShape::Independent,
                     GraphShape::RandomDag}) {
    s.shape = shape;
    auto a = synth_workload(s);
    auto b = synth_workload(s);
    CHECK(a == b);
    CHECK(a.size() == 12);
  }
  s.shape = GraphShape::Chain;
  CHECK(compute_talp(synth_workload(s)) == 1.0);
  s.shape = GraphShape::Independent;
  CHECK(synth_workload(s).edges().empty());
  s.seed = 8;
  s.shape = GraphShape::RandomDag;
  auto c = synth_workload(s);
  s.seed = 7;
  CHECK_FALSE(c == synth_workload(s));
  CHECK(parse_shape("fanout") == GraphShape::FanOut);
  CHECK_THROWS_AS(parse_shape("star"), InvalidSpecError);
}
