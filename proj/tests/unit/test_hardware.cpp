#include <doctest.h>

#include "dse/errors.hpp"
#include "dse/hardware.hpp"
#include "fixtures.hpp"

using namespace dse;

namespace {

bool mentions(const std::vector<std::string>& issues, const std::string& what) {
  for (const auto& s : issues)
    if (s.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("base design is one GPP, one NoC, one DRAM at the lowest settings") {
  WorkloadSet w{fx::chain("w", 3, 100, 10)};
  auto db = fx::round_db();
  auto d = base_design(w, db);
  CHECK(d.topology.blocks().size() == 3);
  CHECK(d.topology.block("pe0").kind == BlockKind::PeGpp);
  CHECK(d.topology.block("pe0").freq_mhz == 100);
  CHECK(d.topology.block("noc0").bus_width_b == 4);
  CHECK(d.topology.block("mem0").kind == BlockKind::MemDram);
  CHECK(d.tasks_on("pe0").size() == 3);
  CHECK(validate_design(d, w, &db).empty());

  DesignBounds b;
  b.pe_freqs = {400, 800};
  CHECK(base_design(w, db, b).topology.block("pe0").freq_mhz == 400);
  CHECK_THROWS_AS(base_design(w, IpDatabase({}, {}, {{100, 4, 0, 0, 1}}, {{MemKind::Dram, 100, 4, 0, 0, 1}})),
                  MissingGppEntryError);
}

TEST_CASE("bandwidth is frequency times width") {
  HardwareBlock n{"noc0", BlockKind::Noc, 200, 16, 1, 1};
  CHECK(n.b_peak() == 200e6 * 16);
  HardwareBlock p{"pe0", BlockKind::PeGpp, 200, 0, 1, 1};
  CHECK(p.b_peak() == 0.0);
}

TEST_CASE("validation reports broken invariants") {
  WorkloadSet w{fx::chain("w", 2, 100, 10)};
  auto db = fx::round_db();
  auto good = fx::single(w);
  CHECK(validate_design(good, w, &db).empty());

  auto d = good;
  d.topology.connect("pe0", "mem0");
  CHECK(mentions(validate_design(d, w), "bypasses the NoC"));

  d = good;
  d.topology.block("pe0").freq_mhz = 300;
  CHECK(mentions(validate_design(d, w), "not on ladder"));

  d = good;
  d.mapping.task_to_pe.erase({"w", "T0"});
  CHECK(mentions(validate_design(d, w), "not mapped"));

  d = good;
  d.mapping.task_to_pe[{"w", "ghost"}] = "pe0";
  CHECK_FALSE(validate_design(d, w).empty());

  d = good;
  d.topology.disconnect("noc0", "mem0");
  CHECK(mentions(validate_design(d, w), "cannot reach"));

  d = good;
  d.topology.block("pe0").kind = BlockKind::PeAcc;
  CHECK(mentions(validate_design(d, w, &db), "no accelerator entry"));
  CHECK(validate_design(d, w).empty());  // structurally fine without a database
}

TEST_CASE("routes take the shortest NoC path with the smallest ids") {
  WorkloadSet w{fx::chain("w", 1, 100, 10)};
  DesignPoint d;
  d.topology.add({"pe0", BlockKind::PeGpp, 100, 0, 1, 1});
  for (auto id : {"noc0", "noc1", "noc2", "noc3"}) d.topology.add({id, BlockKind::Noc, 100, 4, 1, 1});
  d.topology.add({"mem0", BlockKind::MemDram, 100, 4, 1, 1});
  // pe0 - noc2 - noc3 - mem0 and pe0 - noc1 - noc0 - mem0: equal length, noc1 < noc2 wins
  d.topology.connect("pe0", "noc2");
  d.topology.connect("noc2", "noc3");
  d.topology.connect("noc3", "mem0");
  d.topology.connect("pe0", "noc1");
  d.topology.connect("noc1", "noc0");
  d.topology.connect("noc0", "mem0");
  d.mapping.task_to_pe[{"w", "T0"}] = "pe0";
  d.mapping.task_to_mem[{"w", "T0"}] = "mem0";
  CHECK(route(d, "pe0", "mem0") == std::vector<BlockId>{"noc1", "noc0"});
  d.topology.connect("noc2", "mem0");
  CHECK(route(d, "pe0", "mem0") == std::vector<BlockId>{"noc2"});
  CHECK_THROWS_AS(route(d, "mem0", "pe0"), UnreachableError);
}

TEST_CASE("fresh ids fill the smallest gap") {
  WorkloadSet w{fx::chain("w", 1, 100, 10)};
  auto d = fx::single(w);
  CHECK(d.fresh_id(BlockClass::Pe) == "pe1");
  d.topology.add({"pe2", BlockKind::PeGpp, 100, 0, 1, 1});
  CHECK(d.fresh_id(BlockClass::Pe) == "pe1");
  CHECK(d.fresh_id(BlockClass::Noc) == "noc1");
  CHECK(d.fresh_id(BlockClass::Mem) == "mem1");
}

TEST_CASE("canonical signature ignores block names") {
  WorkloadSet w{fx::independent("w", 2, 100)};
  auto a = fx::single(w);
  a.topology.add({"pe1", BlockKind::PeGpp, 200, 0, 1, 1});
  a.topology.connect("pe1", "noc0");
  a.mapping.task_to_pe[{"w", "T1"}] = "pe1";

  auto b = fx::single(w);
  b.topology.remove("pe0");
  b.topology.add({"pe7", BlockKind::PeGpp, 100, 0, 1, 1});
  b.topology.add({"pe3", BlockKind::PeGpp, 200, 0, 1, 1});
  b.topology.connect("pe7", "noc0");
  b.topology.connect("pe3", "noc0");
  b.mapping.task_to_pe[{"w", "T0"}] = "pe7";
  b.mapping.task_to_pe[{"w", "T1"}] = "pe3";
  CHECK(canonical_signature(a) == canonical_signature(b));
  b.topology.block("pe3").freq_mhz = 400;
  CHECK(canonical_signature(a) != canonical_signature(b));
}

TEST_CASE("topology bookkeeping") {
  Topology t;
  t.add({"a", BlockKind::Noc, 100, 4, 1, 1});
  t.add({"b", BlockKind::PeGpp, 100, 0, 1, 1});
  t.connect("b", "a");
  CHECK(t.connected("a", "b"));
  CHECK(t.links().begin()->first == "a");
  CHECK(t.neighbors("a") == std::vector<BlockId>{"b"});
  t.remove("b");
  CHECK(t.links().empty());
  CHECK(t.count(BlockClass::Pe) == 0);
}
