#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/workload.hpp"

namespace dse {

enum class Knob { Freq, BusWidth, Subtype, Unroll };
enum class Direction { Up, Down };

const char* to_string(Knob k);
const char* to_string(Direction d);

/// One ladder step of one knob. Subtype "up" is GPP->ACC or DRAM->SRAM.
struct SwapMove {
  BlockId block;
  Knob knob = Knob::Freq;
  Direction direction = Direction::Up;
  bool operator==(const SwapMove&) const = default;
};

/// Duplicates `block` as `clone` (same knobs), links the clone to
/// `clone_links`, unlinks `detach` from the original, and moves `tasks`
/// (PE: execution, Mem: output buffers) to the clone. NoC forks move PEs
/// through `detach`/`clone_links` instead of tasks.
struct ForkMove {
  BlockId block;
  BlockId clone;
  std::vector<TaskKey> tasks;
  std::vector<BlockId> clone_links;
  std::vector<BlockId> detach;
  bool operator==(const ForkMove&) const = default;
};

/// Folds `absorbed` into `survivor` (identical kind and knobs): its tasks
/// and links move over and it is deleted. The recorded task and link lists
/// describe `absorbed` at selection time and make the move invertible.
struct JoinMove {
  BlockId survivor;
  BlockId absorbed;
  std::vector<TaskKey> tasks;
  std::vector<BlockId> absorbed_links;
  std::vector<BlockId> added_links;  // links the survivor gains
  bool operator==(const JoinMove&) const = default;
};

/// Remaps one task between two PEs, or its output buffer between two memories.
struct MigrateMove {
  TaskKey task;
  BlockId src;
  BlockId dst;
  bool operator==(const MigrateMove&) const = default;
};

/// Fork followed by a swap on the clone.
struct ForkSwapMove {
  ForkMove fork;
  SwapMove swap;
  bool operator==(const ForkSwapMove&) const = default;
};

/// Inverse of ForkSwap: swap the clone back, then join it.
struct SwapJoinMove {
  SwapMove swap;
  JoinMove join;
  bool operator==(const SwapJoinMove&) const = default;
};

using Move = std::variant<SwapMove, ForkMove, JoinMove, MigrateMove, ForkSwapMove, SwapJoinMove>;

/// Move families ordered by development cost, cheapest first.
enum class MoveType { Join = 0, Migrate = 1, Fork = 2, Swap = 3, ForkSwap = 4 };
inline constexpr std::size_t kMoveTypeCount = 5;
const char* to_string(MoveType t);
MoveType parse_move_type(const std::string& s);

MoveType move_type(const Move& m);
std::string describe(const Move& m);

/// Everything a move needs to check feasibility.
struct MoveContext {
  const WorkloadSet& workloads;
  const IpDatabase& db;
  const DesignBounds& bounds;
};

/// The block after one knob step, or std::nullopt when the step leaves the
/// ladder, the bounds, or the database. `why` receives the reason.
std::optional<HardwareBlock> swapped_block(const DesignPoint& d, const SwapMove& s, const MoveContext& ctx,
                                           std::string* why = nullptr);

/// Applies one move to a copy of `d`. The result passes validate_design.
/// Throws InfeasibleMoveError.
DesignPoint apply_move(const DesignPoint& d, const Move& m, const MoveContext& ctx);

/// The move that undoes `m`.
Move invert_move(const Move& m);

/// Fork/Join builders that capture the bookkeeping needed for inversion.
ForkMove make_fork(const DesignPoint& d, const BlockId& block, const TaskKey& task);
std::optional<JoinMove> make_join(const DesignPoint& d, const BlockId& survivor, const BlockId& absorbed);

}  // namespace dse
