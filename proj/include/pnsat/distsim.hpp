#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnsat/explicit.hpp"
#include "pnsat/mdd.hpp"
#include "pnsat/model.hpp"

namespace pnsat {

struct WorkstationMetrics {
  std::uint64_t states = 0;  // states owned at the end
  std::uint64_t nodes = 0;   // decision-diagram nodes resident at the end
  std::uint64_t cache_entries = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t items_sent = 0;  // states, or nodes of the sent diagrams
  std::uint64_t items_received = 0;
  std::uint64_t cross_transitions = 0;
  std::uint64_t duplicates_received = 0;
  std::uint64_t idle_steps = 0;
  std::uint64_t work_steps = 0;
  std::uint64_t requests = 0;
  std::uint64_t replies = 0;
  std::uint64_t migrated_states = 0;

  WorkstationMetrics& operator+=(const WorkstationMetrics& o);
  bool operator==(const WorkstationMetrics&) const = default;
};

struct SimMetrics {
  std::string mode;
  std::uint32_t workstations = 0;
  std::uint64_t steps = 0;
  std::uint64_t termination_rounds = 0;
  BigInt state_count = 0;
  std::vector<WorkstationMetrics> per_workstation;
  // Vertical: sum of per-workstation diagram sizes minus the size of their
  // union, and that union's size.
  std::optional<std::int64_t> duplicated_nodes;
  std::optional<std::uint64_t> union_nodes;
  std::optional<std::uint64_t> leaf_moves;

  WorkstationMetrics totals() const;
};

/// Bookkeeping shared by the message-passing modes.
struct SimOutcome {
  std::uint64_t quiescent_step = 0;  // first step after which nothing is pending
  std::uint64_t terminated_step = 0;
  bool inboxes_empty = true;
  bool ownership_sound = true;
};

struct ExplicitSimConfig {
  std::uint32_t buffer = 64;
  std::optional<std::size_t> state_cap;
  /// Check the tree partition's balance every this many rounds (0: never).
  std::uint32_t rebalance_every = 0;
  double rebalance_threshold = 2.0;
  /// Random extra network delay in [0, max_delay] steps, drawn from `seed`.
  std::uint32_t max_delay = 0;
  std::uint64_t seed = 0;
};

struct ExplicitSimResult {
  SimMetrics metrics;
  SimOutcome outcome;
  std::vector<std::vector<GlobalState>> stores;  // sorted, per workstation

  std::vector<GlobalState> all_states() const;
};

ExplicitSimResult run_explicit(Model& m, PartitionFn part, const ExplicitSimConfig& cfg = {});

/// Conjunction of value ranges on single levels; `hi` is inclusive.
struct RangeConstraint {
  int level = 0;
  std::uint32_t lo = 0;
  std::uint32_t hi = UINT32_MAX;
};

using Window = std::vector<RangeConstraint>;

/// Restricts `x` to the window.
StateSet restrict_to(const StateSet& x, const Window& w);
/// The window over the forest's current domains.
StateSet window_set(Forest& f, const Window& w);
/// Pairwise disjoint and covering the forest's current potential space.
bool windows_partition(Forest& f, const std::vector<Window>& windows);
/// N windows splitting the top level's values: {0}, {1}, ..., {N-1, N, ...}.
std::vector<Window> top_level_windows(int levels, std::uint32_t n);

class InvalidPartition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VerticalSimConfig {
  std::optional<std::size_t> node_cap;
  std::uint32_t max_delay = 0;
  std::uint64_t seed = 0;
};

struct VerticalSimResult {
  SimMetrics metrics;
  SimOutcome outcome;
  std::vector<StateSet> owned;  // Y_w
  StateSet all;                 // union of the Y_w
};

/// Throws InvalidPartition when the windows do not partition the space.
VerticalSimResult run_vertical_bfs(Model& m, Forest& f, const std::vector<Window>& windows,
                                   const VerticalSimConfig& cfg = {});

/// Workstation w (1-based) owns levels [bottom, top]; top = bottom - 1 is
/// an empty range.
struct LevelRange {
  int top = 0;
  int bottom = 0;

  bool operator==(const LevelRange&) const = default;
};

/// Ranges ordered by workstation; workstation 1 holds the bottom levels and
/// workstation N the top ones. With more workstations than levels the
/// surplus ones get empty ranges.
bool ranges_partition(int levels, const std::vector<LevelRange>& ranges);
std::vector<LevelRange> equal_ranges(int levels, std::uint32_t n);

struct HorizontalSimConfig {
  std::optional<std::size_t> node_cap;
  bool chained = false;
};

struct HorizontalSimResult {
  SimMetrics metrics;
  StateSet states;
  std::uint64_t resident_nodes = 0;  // summed over workstations
};

/// Throws InvalidPartition when the ranges do not partition the levels.
HorizontalSimResult run_horizontal_saturation(Model& m, Forest& f,
                                              const std::vector<LevelRange>& ranges,
                                              const HorizontalSimConfig& cfg = {});

}  // namespace pnsat
