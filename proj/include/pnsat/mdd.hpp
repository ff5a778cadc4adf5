#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pnsat/model.hpp"

namespace pnsat {

using BigInt = boost::multiprecision::cpp_int;
using NodeId = std::uint32_t;

/// Id 0 is the empty set at every level; at level 0 id 1 is the accepting
/// terminal.
inline constexpr NodeId kZero = 0;
inline constexpr NodeId kOne = 1;

struct NodeRef {
  int level = 0;
  NodeId id = kZero;

  bool operator==(const NodeRef&) const = default;
};

class NodeCapExceeded : public std::runtime_error {
 public:
  explicit NodeCapExceeded(std::size_t cap)
      : std::runtime_error("node cap of " + std::to_string(cap) + " exceeded") {}
};

// Relations are kept intensional: a RelationView answers, for a relation
// node `r` at some level and a local state, which local states follow and
// which relation node continues the product below.
using RelRef = std::uint32_t;
inline constexpr RelRef kRelEmpty = 0;
inline constexpr RelRef kRelIdentity = 1;

struct RelEdge {
  std::uint32_t to = 0;
  RelRef below = kRelEmpty;

  bool operator==(const RelEdge&) const = default;
};

class RelationView {
 public:
  RelationView();
  virtual ~RelationView() = default;

  virtual void edges(int level, RelRef r, std::uint32_t from, std::vector<RelEdge>& out) const = 0;

  /// Distinguishes views inside the shared operation caches.
  std::uint32_t tag() const { return tag_; }

 private:
  std::uint32_t tag_;
};

/// Relation spelled out edge by edge.
class TableRelation : public RelationView {
 public:
  void add_edge(int level, RelRef r, std::uint32_t from, std::uint32_t to, RelRef below);
  void edges(int level, RelRef r, std::uint32_t from, std::vector<RelEdge>& out) const override;

 private:
  std::map<std::tuple<int, RelRef, std::uint32_t>, std::vector<RelEdge>> table_;
};

struct RelCall {
  int level = 0;
  NodeId node = kZero;
  RelRef rel = kRelEmpty;

  bool operator==(const RelCall&) const = default;
};

struct CacheKey {
  std::uint32_t op = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;

  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint32_t v : {k.op, k.a, k.b, k.c}) {
      h ^= v;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

// Operation codes below 16 belong to the forest itself.
inline constexpr std::uint32_t kOpUnion = 1;
inline constexpr std::uint32_t kOpIntersect = 2;
inline constexpr std::uint32_t kOpDifference = 3;
inline constexpr std::uint32_t kOpRelProd = 4;
inline constexpr std::uint32_t kOpRestrict = 5;
inline constexpr std::uint32_t kOpUser = 16;

/// Notified around every non-trivial operation on level `to` issued from
/// level `from` (from = to + 1; calls from outside the forest report L + 1).
class DescentObserver {
 public:
  virtual ~DescentObserver() = default;
  virtual void enter(int from, int to) = 0;
  virtual void leave(int from, int to) = 0;
};

struct ForestCounters {
  std::uint64_t union_calls = 0;
  std::uint64_t relprod_calls = 0;
};

/// Quasi-reduced MDD forest over levels L..1 with one unique table and one
/// operation cache per level. Child vectors are stored without trailing
/// zeros, so reading past a node's width yields the empty set and nodes
/// stay valid when a domain grows.
class Forest {
 public:
  explicit Forest(int levels);
  Forest(const Forest&) = delete;
  Forest& operator=(const Forest&) = delete;

  int levels() const { return levels_; }
  std::uint32_t domain(int level) const { return tables_[level].domain; }
  void ensure_domain(int level, std::uint32_t size);
  /// Grow every level to at least the model's current domain.
  void sync_domains(const Model& m);

  /// Canonical node; grows the level's domain to fit the children.
  NodeId node(int level, std::vector<NodeId> children);
  /// Checked variant: children must sit one level down and fit the domain.
  NodeRef make_node(int level, std::span<const NodeRef> children);

  std::span<const NodeId> children(int level, NodeId p) const;
  NodeId child(int level, NodeId p, std::uint32_t i) const;
  std::uint32_t width(int level, NodeId p) const {
    return static_cast<std::uint32_t>(children(level, p).size());
  }

  NodeId unite(int level, NodeId a, NodeId b);
  NodeId intersect(int level, NodeId a, NodeId b);
  NodeId difference(int level, NodeId a, NodeId b);
  /// Image of `p` under relation node `r`. When `log` is set every
  /// invocation, recursive ones included, is appended to it.
  NodeId rel_product(int level, NodeId p, const RelationView& rel, RelRef r,
                     std::vector<RelCall>* log = nullptr);
  /// Keep only the paths whose component at `target` lies in [lo, hi].
  NodeId restrict_range(int level, NodeId p, int target, std::uint32_t lo, std::uint32_t hi);

  /// All tuples over the current domains of levels `level`..1.
  NodeId full(int level);
  NodeId singleton(const GlobalState& s);
  NodeId from_states(std::span<const GlobalState> states);

  const BigInt& path_count(int level, NodeId p);
  /// Fraction of levels `level`..1's product space encoded by `p`.
  long double fullness(int level, NodeId p);
  bool is_full(int level, NodeId p);
  /// Product of the domains of levels `level`..1.
  const BigInt& space_size(int level) const;

  /// States of a level-L root in lexicographic order; throws
  /// std::length_error when more than `limit` would be produced.
  std::vector<GlobalState> enumerate(NodeId root, std::size_t limit);

  /// One line per reachable node, `L<level>:<id> -> [child,...]`, levels
  /// top-down and ids ascending.
  std::string dump(std::span<const NodeRef> roots) const;
  /// Non-terminal, non-empty nodes reachable from the roots, per level
  /// (index 0 unused).
  std::vector<std::size_t> reachable_per_level(std::span<const NodeRef> roots) const;
  std::size_t reachable_nodes(std::span<const NodeRef> roots) const;

  std::size_t live_nodes() const { return live_; }
  std::size_t live_nodes(int level) const { return tables_[level].live; }
  std::size_t peak_nodes() const { return peak_; }
  void reset_peak() { peak_ = live_; }
  void set_node_cap(std::optional<std::size_t> cap) { cap_ = cap; }

  /// Mark-and-sweep from pinned roots plus `extra` roots. Invalidates every
  /// cache and every unpinned id not reachable from `extra`.
  void collect_garbage(std::span<const NodeRef> extra = {});
  void clear_caches();
  std::size_t cache_entries(int level) const { return tables_[level].cache.size(); }

  std::optional<NodeId> cache_find(int level, const CacheKey& key) const;
  void cache_store(int level, const CacheKey& key, NodeId result);

  ForestCounters& counters() { return counters_; }
  const ForestCounters& counters() const { return counters_; }

  void pin(NodeId root);
  void unpin(NodeId root);

  void set_observer(DescentObserver* o) { observer_ = o; }
  DescentObserver* observer() const { return observer_; }

 private:
  struct ChildrenHash {
    std::size_t operator()(const std::vector<NodeId>& v) const noexcept;
  };
  struct Table {
    std::uint32_t domain = 1;
    std::vector<std::vector<NodeId>> nodes;
    std::vector<char> alive;
    std::vector<NodeId> free;
    std::unordered_map<std::vector<NodeId>, NodeId, ChildrenHash> unique;
    std::unordered_map<CacheKey, NodeId, CacheKeyHash> cache;
    std::unordered_map<NodeId, BigInt> counts;
    std::size_t live = 0;
  };

  template <class Fn>
  NodeId apply(std::uint32_t op, int level, NodeId a, NodeId b, Fn terminal);
  void enumerate_rec(int level, NodeId p, GlobalState& cur, std::vector<GlobalState>& out);
  std::vector<std::vector<char>> mark(std::span<const NodeRef> roots) const;

  int levels_;
  std::vector<Table> tables_;  // index 1..L
  std::vector<NodeId> full_;   // memo of full(level), cleared on growth or sweep
  mutable std::vector<BigInt> space_;  // memo of space_size, empty when stale
  std::unordered_map<NodeId, std::size_t> pins_;
  std::size_t live_ = 0;
  std::size_t peak_ = 0;
  std::optional<std::size_t> cap_;
  ForestCounters counters_;
  DescentObserver* observer_ = nullptr;
};

/// Brackets a recursive call for the forest's descent observer.
class Descent {
 public:
  Descent(DescentObserver* o, int from, int to) : o_(o), from_(from), to_(to) {
    if (o_) o_->enter(from_, to_);
  }
  ~Descent() {
    if (o_) o_->leave(from_, to_);
  }
  Descent(const Descent&) = delete;
  Descent& operator=(const Descent&) = delete;

 private:
  DescentObserver* o_;
  int from_, to_;
};

/// A set of global states: a pinned level-L root in a forest.
class StateSet {
 public:
  StateSet() = default;
  StateSet(Forest& forest, NodeId root);
  StateSet(const StateSet& o);
  StateSet(StateSet&& o) noexcept;
  StateSet& operator=(const StateSet& o);
  StateSet& operator=(StateSet&& o) noexcept;
  ~StateSet();

  Forest* forest() const { return forest_; }
  NodeId root() const { return root_; }
  NodeRef ref() const { return {forest_ ? forest_->levels() : 0, root_}; }
  bool empty() const { return root_ == kZero; }
  BigInt count() const;
  std::vector<GlobalState> enumerate(std::size_t limit) const;

  bool operator==(const StateSet& o) const { return forest_ == o.forest_ && root_ == o.root_; }

 private:
  void release();

  Forest* forest_ = nullptr;
  NodeId root_ = kZero;
};

StateSet unite(const StateSet& a, const StateSet& b);
StateSet intersect(const StateSet& a, const StateSet& b);
StateSet difference(const StateSet& a, const StateSet& b);
/// a ⊆ b
bool subset_of(const StateSet& a, const StateSet& b);

StateSet empty_set(Forest& f);
StateSet full_set(Forest& f);
StateSet make_set(Forest& f, std::span<const GlobalState> states);

}  // namespace pnsat
