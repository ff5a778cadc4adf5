#pragma once

#include <vector>

#include "pnsat/mdd.hpp"
#include "pnsat/model.hpp"

namespace pnsat {

enum class Direction { Forward, Backward };

/// The disjunctive partition grouped by top level: bucket k holds every
/// event whose highest touched level is k.
struct EventSchedule {
  std::vector<std::vector<std::size_t>> by_top;  // index 0 unused

  explicit EventSchedule(const Model& m);
  const std::vector<std::size_t>& bucket(int level) const { return by_top[level]; }
};

/// Next-state relation of a model, kept as per-event Kronecker products.
///
/// Relation nodes come in two kinds. An event node (event, k) stands for the
/// event restricted to levels k..1; below the event's lowest touched level
/// it collapses to the identity. A group node k stands for the union of the
/// events whose top is k (the r_k used by chained saturation) and only
/// exists at level k. The backward direction swaps take and put, which is
/// exact for place/transition nets.
class KroneckerRelation : public RelationView {
 public:
  KroneckerRelation(const Model& m, Direction dir = Direction::Forward);

  const Model& model() const { return *model_; }
  Direction direction() const { return dir_; }
  const EventSchedule& schedule() const { return schedule_; }
  const std::vector<std::size_t>& bucket(int level) const { return schedule_.bucket(level); }

  RelRef event_ref(std::size_t event, int level) const;
  RelRef group_ref(int level) const;

  void edges(int level, RelRef r, std::uint32_t from, std::vector<RelEdge>& out) const override;
  /// Local successor of `from` at `level` for one event; `from` itself when
  /// the event does not touch the level.
  std::optional<std::uint32_t> local_step(std::size_t event, int level, std::uint32_t from) const;

  /// Fraction of the levels below `level` on which the event's remaining
  /// local functions are enabled, using the forest's current domains.
  long double enabled_fraction(std::size_t event, int level, const Forest& f) const;

 private:
  const Model* model_;
  Direction dir_;
  EventSchedule schedule_;
  std::uint32_t levels_;
  std::uint32_t events_;
};

}  // namespace pnsat
