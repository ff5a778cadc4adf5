#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "pnsat/model.hpp"

namespace pnsat {

struct StateHash {
  std::size_t operator()(const GlobalState& s) const noexcept;
};

class StateCapExceeded : public std::runtime_error {
 public:
  explicit StateCapExceeded(std::size_t cap)
      : std::runtime_error("state cap of " + std::to_string(cap) + " exceeded") {}
};

/// Visited states plus a FIFO of states still to explore.
class ExplicitStore {
 public:
  /// Adds a new state to both the visited set and the frontier; false when
  /// already visited.
  bool insert(const GlobalState& s);
  /// Adds a state that needs no further exploration.
  bool insert_explored(const GlobalState& s) { return visited_.insert(s).second; }
  bool contains(const GlobalState& s) const { return visited_.count(s) != 0; }
  bool frontier_empty() const { return frontier_.empty(); }
  std::size_t frontier_size() const { return frontier_.size(); }
  GlobalState pop();
  std::size_t size() const { return visited_.size(); }

  /// Removes every state satisfying `pred`; `unexplored` receives those
  /// that were still waiting in the frontier.
  template <class Pred>
  std::vector<GlobalState> extract_if(Pred pred, std::vector<GlobalState>& unexplored);

  std::vector<GlobalState> sorted() const;
  /// One state per line, components in decimal separated by spaces.
  std::string dump() const;

 private:
  std::unordered_set<GlobalState, StateHash> visited_;
  std::deque<GlobalState> frontier_;
};

template <class Pred>
std::vector<GlobalState> ExplicitStore::extract_if(Pred pred, std::vector<GlobalState>& unexplored) {
  std::vector<GlobalState> out;
  for (auto it = visited_.begin(); it != visited_.end();) {
    if (pred(*it)) {
      out.push_back(*it);
      it = visited_.erase(it);
    } else {
      ++it;
    }
  }
  std::deque<GlobalState> keep;
  for (auto& s : frontier_) (pred(s) ? unexplored.push_back(s) : keep.push_back(s));
  frontier_ = std::move(keep);
  return out;
}

struct ExplicitGeneration {
  ExplicitStore store;
  std::uint64_t expanded = 0;
  std::uint64_t transitions = 0;
};

/// Breadth-first enumeration of the reachable states.
ExplicitGeneration explicit_generate(Model& m, std::optional<std::size_t> cap = {});

/// Owner = h mod N, plus 1, where h is the 64-bit FNV-1a hash of the
/// selected components (four little-endian bytes each, level L down to
/// level 1) with its upper half folded onto its lower half.
class HashPartition {
 public:
  HashPartition(int levels, std::vector<int> selected, std::uint32_t n);

  std::uint32_t route(const GlobalState& s) const;
  std::uint32_t workstations() const { return n_; }
  const std::vector<int>& selected() const { return selected_; }

  static std::uint64_t fnv1a(std::span<const std::uint32_t> values);

 private:
  int levels_;
  std::vector<int> selected_;  // descending
  std::uint32_t n_;
};

/// Shared top of a search tree: M-1 sorted boundary keys split the
/// lexicographic order of global states into M leaves, each owned by one
/// workstation.
class TreePartition {
 public:
  TreePartition(std::vector<GlobalState> keys, std::vector<std::uint32_t> leaf_owner,
                std::uint32_t n);

  /// Keys are quantiles of the first `warmup` states found breadth-first;
  /// leaves are dealt to owners round-robin. `leaves` defaults to 16 N.
  static TreePartition from_warmup(Model& m, std::uint32_t n,
                                   std::optional<std::uint32_t> leaves = {},
                                   std::size_t warmup = 1000);

  std::uint32_t leaf_of(const GlobalState& s) const;
  std::uint32_t route(const GlobalState& s) const { return owner_[leaf_of(s)]; }
  std::uint32_t leaves() const { return static_cast<std::uint32_t>(owner_.size()); }
  std::uint32_t workstations() const { return n_; }
  std::uint32_t owner(std::uint32_t leaf) const { return owner_[leaf]; }
  void assign(std::uint32_t leaf, std::uint32_t owner);
  const std::vector<GlobalState>& keys() const { return keys_; }

 private:
  std::vector<GlobalState> keys_;
  std::vector<std::uint32_t> owner_;
  std::uint32_t n_;
};

/// Every state goes to one workstation.
struct ConstantPartition {
  std::uint32_t owner = 1;
  std::uint32_t n = 1;

  std::uint32_t route(const GlobalState&) const { return owner; }
  std::uint32_t workstations() const { return n; }
};

using PartitionFn = std::variant<HashPartition, TreePartition, ConstantPartition>;

std::uint32_t route(const PartitionFn& p, const GlobalState& s);
std::uint32_t workstations(const PartitionFn& p);

struct LeafMove {
  std::uint32_t leaf = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;

  bool operator==(const LeafMove&) const = default;
};

/// Max/min ratio of per-owner loads; infinite when some owner is empty and
/// another is not, 1 when all are empty.
double load_ratio(std::span<const std::uint64_t> owner_loads);

/// Greedy leaf moves from the most to the least loaded owner while the
/// ratio exceeds `threshold` and a single move improves the balance.
/// `leaf_loads` has one entry per leaf; the partition is left unchanged.
std::vector<LeafMove> rebalance(const TreePartition& p, std::span<const std::uint64_t> leaf_loads,
                                double threshold = 2.0);

}  // namespace pnsat
