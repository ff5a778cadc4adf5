#include <algorithm>
#include <limits>

#include "pnsat/explicit.hpp"

namespace pnsat {

HashPartition::HashPartition(int levels, std::vector<int> selected, std::uint32_t n)
    : levels_(levels), selected_(std::move(selected)), n_(n) {
  if (n_ == 0) throw std::invalid_argument("hash partition needs at least one workstation");
  if (selected_.empty()) throw std::invalid_argument("hash partition needs a selected level");
  for (int k : selected_)
    if (k < 1 || k > levels_) throw std::invalid_argument("selected level out of range");
  std::sort(selected_.begin(), selected_.end(), std::greater<>());
  selected_.erase(std::unique(selected_.begin(), selected_.end()), selected_.end());
}

std::uint64_t HashPartition::fnv1a(std::span<const std::uint32_t> values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint32_t v : values) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::uint32_t HashPartition::route(const GlobalState& s) const {
  std::vector<std::uint32_t> values;
  values.reserve(selected_.size());
  for (int k : selected_) values.push_back(s[static_cast<std::size_t>(levels_ - k)]);
  const std::uint64_t h = fnv1a(values);
  return static_cast<std::uint32_t>((h ^ (h >> 32)) % n_) + 1;
}

TreePartition::TreePartition(std::vector<GlobalState> keys, std::vector<std::uint32_t> leaf_owner,
                             std::uint32_t n)
    : keys_(std::move(keys)), owner_(std::move(leaf_owner)), n_(n) {
  if (owner_.size() != keys_.size() + 1)
    throw std::invalid_argument("tree partition needs one more leaf than keys");
  if (owner_.size() < n_) throw std::invalid_argument("tree partition needs at least N leaves");
  if (!std::is_sorted(keys_.begin(), keys_.end()))
    throw std::invalid_argument("tree partition keys must be sorted");
  for (auto o : owner_)
    if (o < 1 || o > n_) throw std::invalid_argument("leaf owner out of range");
}

TreePartition TreePartition::from_warmup(Model& m, std::uint32_t n,
                                         std::optional<std::uint32_t> leaves, std::size_t warmup) {
  if (n == 0) throw std::invalid_argument("tree partition needs at least one workstation");
  const std::uint32_t leaf_count = leaves.value_or(16 * n);
  if (leaf_count < n) throw std::invalid_argument("tree partition needs at least N leaves");

  ExplicitStore seen;
  for (const auto& s : m.initial_states()) seen.insert(s);
  while (!seen.frontier_empty() && seen.size() < warmup) {
    GlobalState s = seen.pop();
    for (const auto& t : next_states(m, s)) {
      if (seen.size() >= warmup) break;
      seen.insert(t);
    }
  }
  std::vector<GlobalState> sample = seen.sorted();
  std::vector<GlobalState> keys;
  for (std::uint32_t q = 1; q < leaf_count; ++q)
    keys.push_back(sample[std::min(sample.size() - 1, q * sample.size() / leaf_count)]);
  std::vector<std::uint32_t> owner(leaf_count);
  for (std::uint32_t l = 0; l < leaf_count; ++l) owner[l] = l % n + 1;
  return TreePartition(std::move(keys), std::move(owner), n);
}

std::uint32_t TreePartition::leaf_of(const GlobalState& s) const {
  return static_cast<std::uint32_t>(std::upper_bound(keys_.begin(), keys_.end(), s) - keys_.begin());
}

void TreePartition::assign(std::uint32_t leaf, std::uint32_t owner) {
  if (owner < 1 || owner > n_) throw std::invalid_argument("leaf owner out of range");
  owner_.at(leaf) = owner;
}

std::uint32_t route(const PartitionFn& p, const GlobalState& s) {
  return std::visit([&](const auto& fn) { return fn.route(s); }, p);
}

std::uint32_t workstations(const PartitionFn& p) {
  return std::visit([](const auto& fn) { return fn.workstations(); }, p);
}

double load_ratio(std::span<const std::uint64_t> owner_loads) {
  if (owner_loads.empty()) return 1.0;
  auto [lo, hi] = std::minmax_element(owner_loads.begin(), owner_loads.end());
  if (*hi == 0) return 1.0;
  if (*lo == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

namespace {

struct Balance {
  double ratio;
  std::uint64_t spread;

  bool operator<(const Balance& o) const {
    return ratio != o.ratio ? ratio < o.ratio : spread < o.spread;
  }
};

Balance balance_of(std::span<const std::uint64_t> loads) {
  auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
  return {load_ratio(loads), *hi - *lo};
}

}  // namespace

std::vector<LeafMove> rebalance(const TreePartition& p, std::span<const std::uint64_t> leaf_loads,
                                double threshold) {
  if (leaf_loads.size() != p.leaves()) throw std::invalid_argument("one load per leaf expected");
  std::vector<std::uint32_t> owner(p.leaves());
  std::vector<std::uint64_t> loads(p.workstations(), 0);
  for (std::uint32_t l = 0; l < p.leaves(); ++l) {
    owner[l] = p.owner(l);
    loads[owner[l] - 1] += leaf_loads[l];
  }

  std::vector<LeafMove> moves;
  while (load_ratio(loads) > threshold) {
    const auto from = static_cast<std::uint32_t>(
        std::max_element(loads.begin(), loads.end()) - loads.begin()) + 1;
    const auto to = static_cast<std::uint32_t>(
        std::min_element(loads.begin(), loads.end()) - loads.begin()) + 1;
    Balance best = balance_of(loads);
    std::optional<std::uint32_t> pick;
    for (std::uint32_t l = 0; l < p.leaves(); ++l) {
      if (owner[l] != from || leaf_loads[l] == 0) continue;
      loads[from - 1] -= leaf_loads[l];
      loads[to - 1] += leaf_loads[l];
      const Balance b = balance_of(loads);
      loads[from - 1] += leaf_loads[l];
      loads[to - 1] -= leaf_loads[l];
      if (b < best) {
        best = b;
        pick = l;
      }
    }
    if (!pick) break;
    loads[from - 1] -= leaf_loads[*pick];
    loads[to - 1] += leaf_loads[*pick];
    owner[*pick] = to;
    moves.push_back({*pick, from, to});
  }
  return moves;
}

}  // namespace pnsat
