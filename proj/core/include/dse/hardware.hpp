#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dse/ip_database.hpp"
#include "dse/workload.hpp"

namespace dse {

inline constexpr std::array<int, 4> kFreqLadderMhz = {100, 200, 400, 800};
inline constexpr std::array<int, 7> kBusWidthLadder = {4, 8, 16, 32, 64, 128, 256};

enum class BlockKind { PeGpp, PeAcc, Noc, MemDram, MemSram };

const char* to_string(BlockKind k);
BlockKind parse_block_kind(const std::string& s);

inline bool is_pe(BlockKind k) { return k == BlockKind::PeGpp || k == BlockKind::PeAcc; }
inline bool is_mem(BlockKind k) { return k == BlockKind::MemDram || k == BlockKind::MemSram; }
inline bool is_noc(BlockKind k) { return k == BlockKind::Noc; }
inline MemKind mem_kind(BlockKind k) { return k == BlockKind::MemSram ? MemKind::Sram : MemKind::Dram; }

/// Coarse category used for join compatibility and id prefixes: processing
/// element, interconnect, or memory.
enum class BlockClass { Pe, Noc, Mem };
BlockClass block_class(BlockKind k);

using BlockId = std::string;

struct HardwareBlock {
  BlockId id;
  BlockKind kind = BlockKind::PeGpp;
  int freq_mhz = 100;
  int bus_width_b = 0;  // NoC / Mem only
  int links = 1;        // NoC only
  int unroll = 1;       // meaningful on PE_ACC; kept across subtype swaps

  /// Bytes per second: freq x bus width. Zero for processing elements.
  double b_peak() const { return is_pe(kind) ? 0.0 : freq_mhz * 1e6 * bus_width_b; }
  /// Same kind and knob settings (ids excluded).
  bool same_knobs(const HardwareBlock& o) const {
    return kind == o.kind && freq_mhz == o.freq_mhz && bus_width_b == o.bus_width_b && links == o.links &&
           unroll == o.unroll;
  }
  bool operator==(const HardwareBlock&) const = default;
};

struct TaskKey {
  std::string workload;
  std::string task;
  auto operator<=>(const TaskKey&) const = default;
  bool operator==(const TaskKey&) const = default;
};

std::string to_string(const TaskKey& k);

/// Undirected block graph. Links are stored with the smaller id first.
class Topology {
 public:
  const std::map<BlockId, HardwareBlock>& blocks() const { return blocks_; }
  const std::set<std::pair<BlockId, BlockId>>& links() const { return links_; }

  bool has(const BlockId& id) const { return blocks_.count(id) != 0; }
  const HardwareBlock& block(const BlockId& id) const;
  HardwareBlock& block(const BlockId& id);

  void add(HardwareBlock b);
  /// Removes the block and every link touching it.
  void remove(const BlockId& id);
  void connect(const BlockId& a, const BlockId& b);
  void disconnect(const BlockId& a, const BlockId& b);
  bool connected(const BlockId& a, const BlockId& b) const;
  /// Sorted neighbor ids.
  std::vector<BlockId> neighbors(const BlockId& id) const;

  std::vector<BlockId> ids_of(BlockClass c) const;
  std::size_t count(BlockClass c) const;

  bool operator==(const Topology&) const = default;

 private:
  std::map<BlockId, HardwareBlock> blocks_;
  std::set<std::pair<BlockId, BlockId>> links_;
};

/// Task placement: each task runs on one processing element and keeps its
/// output buffer in one memory. A data edge lives in its producer's memory.
struct Mapping {
  std::map<TaskKey, BlockId> task_to_pe;
  std::map<TaskKey, BlockId> task_to_mem;
  bool operator==(const Mapping&) const = default;
};

struct DesignPoint {
  Topology topology;
  Mapping mapping;
  std::vector<std::string> provenance;  // applied move descriptions

  /// Smallest unused id with the class prefix ("pe", "noc", "mem").
  BlockId fresh_id(BlockClass c) const;
  /// Memory holding the data of an edge of `workload`.
  const BlockId& edge_mem(const std::string& workload, const DataEdge& e) const;

  /// Tasks hosted on a PE, or whose output buffer lives in a Mem, in key order.
  std::vector<TaskKey> tasks_on(const BlockId& block) const;

  /// Topology and mapping equal; provenance ignored.
  bool same_hardware_and_mapping(const DesignPoint& o) const {
    return topology == o.topology && mapping == o.mapping;
  }
};

/// Limits on the region of the design space the explorer and the
/// enumerator may visit.
struct DesignBounds {
  std::size_t max_pes = 12;
  std::size_t max_nocs = 3;
  std::size_t max_mems = 4;
  std::size_t max_blocks = 20;
  std::vector<int> pe_freqs{kFreqLadderMhz.begin(), kFreqLadderMhz.end()};
  std::vector<int> noc_freqs{kFreqLadderMhz.begin(), kFreqLadderMhz.end()};
  std::vector<int> noc_widths{kBusWidthLadder.begin(), kBusWidthLadder.end()};
  std::vector<int> mem_freqs{kFreqLadderMhz.begin(), kFreqLadderMhz.end()};
  std::vector<int> mem_widths{kBusWidthLadder.begin(), kBusWidthLadder.end()};
  bool allow_acc = true;
  bool allow_sram = true;
  int max_unroll = 8;

  std::size_t max_of(BlockClass c) const {
    return c == BlockClass::Pe ? max_pes : c == BlockClass::Noc ? max_nocs : max_mems;
  }
};

/// One GPP, one NoC and one DRAM, every task of every workload on them.
/// Knobs start at the lowest setting the database (and bounds) allow.
/// Throws MissingGppEntryError / MissingDatabaseEntryError.
DesignPoint base_design(const WorkloadSet& workloads, const IpDatabase& db, const DesignBounds& bounds = {});

/// Violated invariants as human-readable lines; empty means valid. With a
/// database, also checks that every block has the entries it needs.
std::vector<std::string> validate_design(const DesignPoint& d, const WorkloadSet& workloads,
                                         const IpDatabase* db = nullptr);

/// Shortest NoC path from a PE to a Mem; among equal-length paths the
/// lexicographically smallest id sequence wins. Throws UnreachableError.
std::vector<BlockId> route(const DesignPoint& d, const BlockId& pe, const BlockId& mem);

/// Route used by the consumer of an edge to read the edge's data.
std::vector<BlockId> route_edge(const DesignPoint& d, const TaskGraph& g, const DataEdge& e);

/// Label-independent description of a design, used to deduplicate
/// enumerations and compare designs up to block renaming.
std::string canonical_signature(const DesignPoint& d);

}  // namespace dse
