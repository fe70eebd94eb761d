#include <doctest.h>

#include <cmath>
#include <set>

#include "dse/errors.hpp"
#include "dse/oracle.hpp"
#include "fixtures.hpp"

using namespace dse;

TEST_CASE("oracle matches a single task within one step") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("T", 1e6, 4, 2)}, {})};
  auto d = fx::single(w);
  auto phase = fx::sim(d, w, db);
  const double dt = 1e-5;
  auto o = oracle_simulate(d, w, db, {dt});
  CHECK(std::abs(o.makespan_s - phase.makespan_s) <= dt * (1 + 1e-9));
  CHECK(o.max_conservation_error() <= 1e-9);
}

TEST_CASE("oracle tracks the diamond within one percent at fine steps") {
  auto db = fx::round_db();
  WorkloadSet w{fx::diamond("d", 1e6, 1e4)};
  auto d = fx::single(w);
  auto phase = fx::sim(d, w, db);
  auto o = oracle_simulate_relative(d, w, db, 1e-3);
  CHECK(std::abs(o.makespan_s - phase.makespan_s) / phase.makespan_s <= 0.01);
  CHECK(o.max_conservation_error() <= 1e-9);
  CHECK(o.energy_j == doctest::Approx(phase.energy_j).epsilon(0.01));
}

TEST_CASE("oracle error shrinks at first order as the step shrinks") {
  auto db = fx::round_db();
  WorkloadSet w{fx::diamond("d", 1e6, 1e5)};
  auto d = fx::single(w);
  const double exact = fx::sim(d, w, db).makespan_s;
  // Offsetting the step keeps phase boundaries off the grid.
  double e1 = std::abs(oracle_simulate(d, w, db, {exact * 0.0137}).makespan_s - exact);
  double e2 = std::abs(oracle_simulate(d, w, db, {exact * 0.0137 / 8}).makespan_s - exact);
  CHECK(e2 < e1);
  CHECK(e2 <= exact * 0.0137 / 8 * 4);
}

TEST_CASE("oracle step budget") {
  auto db = fx::round_db();
  WorkloadSet w{fx::chain("c", 3, 1e6, 10)};
  CHECK_THROWS_AS(oracle_simulate(fx::single(w), w, db, {1e-9, 100}), StepBudgetExceededError);
}

TEST_CASE("enumeration counts and order") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("T", 1e6, 4)}, {})};
  DesignBounds b;
  b.max_pes = 1;
  b.allow_acc = false;
  b.allow_sram = false;
  b.noc_freqs = {100};
  b.noc_widths = {4};
  b.mem_freqs = {100};
  b.mem_widths = {4};
  auto all = enumerate_space(w, db, b);
  CHECK(all.size() == 4);
  CHECK(count_space(w, db, b) == 4);
  std::set<std::string> sigs;
  for (const auto& d : all) {
    CHECK(validate_design(d, w, &db).empty());
    sigs.insert(canonical_signature(d));
  }
  CHECK(sigs.size() == all.size());
  CHECK(enumerate_space(w, db, b).front().same_hardware_and_mapping(all.front()));

  WorkloadSet two{fx::independent("w", 2, 1e6)};
  b.max_pes = 2;
  b.pe_freqs = {100};
  // {T0,T1} together or apart; apart with identical PEs is one design up to renaming
  CHECK(count_space(two, db, b) == enumerate_space(two, db, b).size());
  CHECK(enumerate_space(two, db, b).size() == 2);
  CHECK_THROWS_AS(enumerate_space(two, db, b, 1), SpaceTooLargeError);
}

TEST_CASE("oracle agrees with the phase simulator when the step divides the makespan") {
  auto db = fx::round_db();
  WorkloadSet w{TaskGraph::build("w", {fx::task("T", 1e6, 2, 8)}, {})};
  auto d = fx::single(w);
  auto phase = fx::sim(d, w, db);
  for (int steps : {10, 64, 1000}) {
    auto o = oracle_simulate(d, w, db, {phase.makespan_s / steps});
    CHECK(o.makespan_s == doctest::Approx(phase.makespan_s).epsilon(1e-9));
  }
}
