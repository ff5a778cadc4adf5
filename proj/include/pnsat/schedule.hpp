#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pnsat/mdd.hpp"

namespace pnsat {

using LocalEdge = std::pair<std::uint32_t, std::uint32_t>;

/// Directed graph over the local states 0..vertices-1 of one level.
struct TransitionGraph {
  std::uint32_t vertices = 0;
  std::vector<LocalEdge> edges;  // sorted, unique
};

/// Strongly connected components numbered in a topological order of the
/// condensation. Among valid orders the one that repeatedly emits the ready
/// component with the smallest vertex is chosen, so the numbering is
/// canonical.
struct Condensation {
  std::vector<std::uint32_t> component;  // per vertex
  std::uint32_t count = 0;
};

Condensation condense(const TransitionGraph& g);

/// Dynamic transition graph of a node whose children are `children`: edge
/// (i,j) when child i is non-empty, the relation maps i to j and child j is
/// not yet the full set below.
TransitionGraph dynamic_graph(Forest& f, int level, std::span<const NodeId> children,
                              const RelationView& rel, RelRef r);

/// Expected growth of child j's path count from firing (i,j).
inline long double phi_delta(long double space, long double phi_from, long double phi_rel,
                             long double phi_to) {
  return space * phi_from * phi_rel * (1.0L - phi_to);
}

struct FiringSchedule {
  std::vector<LocalEdge> order;
  /// Unordered pairs {i,j}, i<j, of non-empty children with no path either
  /// way in the graph.
  std::vector<LocalEdge> parallel_safe;
};

using RelFullness = std::function<long double(std::uint32_t from, std::uint32_t to)>;

/// Static chained order for one node: components in topological order;
/// inside a component its internal edges by decreasing phi_delta, then the
/// edges leaving it, ties broken by (i,j).
FiringSchedule firing_schedule(Forest& f, int level, NodeId p, const RelationView& rel, RelRef r,
                               const RelFullness& rel_fullness = {});

}  // namespace pnsat
