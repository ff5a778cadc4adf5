#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnsat/kronecker.hpp"
#include "pnsat/mdd.hpp"
#include "pnsat/model.hpp"
#include "pnsat/schedule.hpp"

namespace pnsat {

struct RunMetrics {
  std::string strategy;
  std::uint64_t iterations = 0;
  std::uint64_t relprod_calls = 0;
  std::uint64_t union_calls = 0;
  std::uint64_t peak_nodes = 0;
  std::uint64_t final_nodes = 0;
  BigInt state_count = 0;
  double wall_time_ms = 0.0;
  // Breadth-first only: largest node counts of the image and frontier sets.
  std::optional<std::uint64_t> peak_image_nodes;
  std::optional<std::uint64_t> peak_frontier_nodes;
};

struct GenerationOptions {
  std::optional<std::size_t> node_cap;
  /// Sweep the forest at phase boundaries (after each breadth-first
  /// iteration, after a saturation run).
  bool collect_garbage = true;
  bool measure_time = false;
};

struct Generation {
  StateSet states;
  RunMetrics metrics;
};

/// One firing decision of chained saturation, with the graph it was taken
/// on and the edges still waiting at that moment.
struct ChainStep {
  std::uint64_t instance = 0;  // which node saturation this belongs to
  int level = 0;
  std::uint32_t vertices = 0;
  LocalEdge fired;
  std::vector<LocalEdge> edges;
  std::vector<LocalEdge> pending;
};

struct ChainLog {
  std::vector<ChainStep> steps;
};

StateSet initial_set(const Model& m, Forest& f);
/// N_alpha(X) for a single event.
StateSet fire_set(const KroneckerRelation& rel, const StateSet& x, std::size_t event);
/// N(X), or the backward image for a backward relation.
StateSet image(const KroneckerRelation& rel, const StateSet& x);

Generation bfs_generate(Model& m, Forest& f, const GenerationOptions& opts = {});
Generation saturate(Model& m, Forest& f, const GenerationOptions& opts = {});
Generation chained_saturate(Model& m, Forest& f, const GenerationOptions& opts = {},
                            ChainLog* log = nullptr);

/// Saturation engine. Nodes are saturated bottom-up; a node created below
/// the level being saturated is saturated before its parent continues.
class Saturator {
 public:
  enum class Order { Fixed, Chained };

  Saturator(Forest& f, const KroneckerRelation& rel, Order order, ChainLog* log = nullptr);

  /// Saturated version of node `p` at `level`.
  NodeId saturate(int level, NodeId p);
  /// Saturated image of the already-saturated node `q` under relation node `r`.
  NodeId fire(int level, NodeId q, RelRef r);

  std::uint64_t fire_calls() const { return fire_calls_; }
  std::uint64_t node_saturations() const { return node_saturations_; }

 private:
  void saturate_node(int level, std::vector<NodeId>& t);
  void saturate_fixed(int level, std::vector<NodeId>& t);
  void saturate_chained(int level, std::vector<NodeId>& t);
  NodeId fire_edge(int level, std::vector<NodeId>& t, LocalEdge e);

  Forest& f_;
  const KroneckerRelation& rel_;
  Order order_;
  ChainLog* log_;
  std::uint32_t sat_op_;
  std::uint32_t fire_op_;
  std::uint64_t fire_calls_ = 0;
  std::uint64_t node_saturations_ = 0;
};

/// Chained firing order for one node under the union of the events whose
/// top is `level`, plus the source pairs that could fire independently.
FiringSchedule firing_schedule(Forest& f, const KroneckerRelation& rel, int level, NodeId p);

// CTL base operators, evaluated inside `universe` (normally the reachable
// states).
StateSet ex(const Model& m, const StateSet& a, const StateSet& universe);
StateSet eu(const Model& m, const StateSet& a, const StateSet& b, const StateSet& universe);
StateSet eg(const Model& m, const StateSet& a, const StateSet& universe);

enum class Comparison { Equal, AtLeast, AtMost };

/// States of the forest's current potential space whose component at
/// `level` satisfies the comparison.
StateSet predicate_set(Forest& f, int level, Comparison cmp, std::uint32_t value);

}  // namespace pnsat
