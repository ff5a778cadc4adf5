#include "pnsat/mdd.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace pnsat {

namespace {
std::atomic<std::uint32_t> next_relation_tag{1};
}

RelationView::RelationView() : tag_(next_relation_tag.fetch_add(1)) {}

void TableRelation::add_edge(int level, RelRef r, std::uint32_t from, std::uint32_t to,
                             RelRef below) {
  table_[{level, r, from}].push_back({to, below});
}

void TableRelation::edges(int level, RelRef r, std::uint32_t from,
                          std::vector<RelEdge>& out) const {
  auto it = table_.find({level, r, from});
  if (it != table_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
}

std::size_t Forest::ChildrenHash::operator()(const std::vector<NodeId>& v) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull ^ v.size();
  for (NodeId x : v) {
    h ^= x;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 32));
}

Forest::Forest(int levels) : levels_(levels), tables_(levels + 1), full_(levels + 1, kZero) {
  if (levels < 1) throw std::invalid_argument("forest needs at least one level");
  for (int k = 1; k <= levels; ++k) {
    auto& t = tables_[k];
    t.nodes.emplace_back();  // the empty-set node, never freed
    t.alive.push_back(1);
    t.unique.emplace(std::vector<NodeId>{}, kZero);
  }
}

void Forest::ensure_domain(int level, std::uint32_t size) {
  auto& d = tables_[level].domain;
  if (size > d) {
    d = size;
    std::fill(full_.begin(), full_.end(), kZero);
    space_.clear();
  }
}

void Forest::sync_domains(const Model& m) {
  for (int k = 1; k <= levels_; ++k) ensure_domain(k, m.domain(k));
}

NodeId Forest::node(int level, std::vector<NodeId> children) {
  while (!children.empty() && children.back() == kZero) children.pop_back();
  if (children.empty()) return kZero;
  auto& t = tables_[level];
  if (children.size() > t.domain) ensure_domain(level, static_cast<std::uint32_t>(children.size()));
  if (auto it = t.unique.find(children); it != t.unique.end()) return it->second;
  if (cap_ && live_ >= *cap_) throw NodeCapExceeded(*cap_);
  NodeId id;
  if (!t.free.empty()) {
    id = t.free.back();
    t.free.pop_back();
    t.nodes[id] = children;
    t.alive[id] = 1;
  } else {
    id = static_cast<NodeId>(t.nodes.size());
    t.nodes.push_back(children);
    t.alive.push_back(1);
  }
  t.unique.emplace(std::move(children), id);
  ++t.live;
  ++live_;
  peak_ = std::max(peak_, live_);
  return id;
}

NodeRef Forest::make_node(int level, std::span<const NodeRef> children) {
  if (level < 1 || level > levels_) throw std::invalid_argument("level out of range");
  if (children.size() > domain(level))
    throw std::invalid_argument("more children than the level's domain");
  std::vector<NodeId> ids;
  ids.reserve(children.size());
  for (const auto& c : children) {
    if (c.level != level - 1) throw std::invalid_argument("child level mismatch");
    if (c.level == 0 ? c.id > kOne
                     : (c.id >= tables_[c.level].nodes.size() || !tables_[c.level].alive[c.id]))
      throw std::invalid_argument("child id is not a live node");
    ids.push_back(c.id);
  }
  return {level, node(level, std::move(ids))};
}

std::span<const NodeId> Forest::children(int level, NodeId p) const {
  return tables_[level].nodes[p];
}

NodeId Forest::child(int level, NodeId p, std::uint32_t i) const {
  const auto& ch = tables_[level].nodes[p];
  return i < ch.size() ? ch[i] : kZero;
}

template <class Fn>
NodeId Forest::apply(std::uint32_t op, int level, NodeId a, NodeId b, Fn terminal) {
  if (auto r = terminal(a, b)) return *r;
  Descent d(observer_, level + 1, level);
  if (op == kOpUnion || op == kOpIntersect) {
    if (a > b) std::swap(a, b);
  }
  const CacheKey key{op, a, b, 0};
  if (auto hit = cache_find(level, key)) return *hit;
  std::vector<NodeId> ca(children(level, a).begin(), children(level, a).end());
  std::vector<NodeId> cb(children(level, b).begin(), children(level, b).end());
  std::size_t width = op == kOpUnion ? std::max(ca.size(), cb.size())
                      : op == kOpIntersect ? std::min(ca.size(), cb.size())
                                           : ca.size();
  std::vector<NodeId> out(width, kZero);
  for (std::size_t i = 0; i < width; ++i) {
    NodeId x = i < ca.size() ? ca[i] : kZero;
    NodeId y = i < cb.size() ? cb[i] : kZero;
    switch (op) {
      case kOpUnion: out[i] = unite(level - 1, x, y); break;
      case kOpIntersect: out[i] = intersect(level - 1, x, y); break;
      default: out[i] = difference(level - 1, x, y); break;
    }
  }
  NodeId r = node(level, std::move(out));
  cache_store(level, key, r);
  return r;
}

NodeId Forest::unite(int level, NodeId a, NodeId b) {
  ++counters_.union_calls;
  return apply(kOpUnion, level, a, b, [level](NodeId x, NodeId y) -> std::optional<NodeId> {
    if (x == y || y == kZero) return x;
    if (x == kZero) return y;
    if (level == 0) return kOne;
    return std::nullopt;
  });
}

NodeId Forest::intersect(int level, NodeId a, NodeId b) {
  return apply(kOpIntersect, level, a, b, [level](NodeId x, NodeId y) -> std::optional<NodeId> {
    if (x == kZero || y == kZero) return kZero;
    if (x == y || level == 0) return x;
    return std::nullopt;
  });
}

NodeId Forest::difference(int level, NodeId a, NodeId b) {
  return apply(kOpDifference, level, a, b, [level](NodeId x, NodeId y) -> std::optional<NodeId> {
    if (x == kZero || x == y) return kZero;
    if (y == kZero) return x;
    if (level == 0) return kZero;
    return std::nullopt;
  });
}

NodeId Forest::rel_product(int level, NodeId p, const RelationView& rel, RelRef r,
                           std::vector<RelCall>* log) {
  ++counters_.relprod_calls;
  if (log) log->push_back({level, p, r});
  if (p == kZero || r == kRelEmpty) return kZero;
  if (r == kRelIdentity || level == 0) return p;
  Descent d(observer_, level + 1, level);
  const CacheKey key{kOpRelProd, p, r, rel.tag()};
  if (auto hit = cache_find(level, key)) return *hit;
  std::vector<NodeId> kids(children(level, p).begin(), children(level, p).end());
  std::vector<NodeId> acc;
  std::vector<RelEdge> edges;
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    if (kids[i] == kZero) continue;
    edges.clear();
    rel.edges(level, r, i, edges);
    for (const auto& e : edges) {
      NodeId f = rel_product(level - 1, kids[i], rel, e.below, log);
      if (f == kZero) continue;
      if (e.to >= acc.size()) acc.resize(e.to + 1, kZero);
      acc[e.to] = unite(level - 1, acc[e.to], f);
    }
  }
  NodeId res = node(level, std::move(acc));
  cache_store(level, key, res);
  return res;
}

NodeId Forest::restrict_range(int level, NodeId p, int target, std::uint32_t lo,
                              std::uint32_t hi) {
  if (target < 1 || target > levels_) throw std::invalid_argument("restrict target level out of range");
  if (p == kZero || level < target) return p;
  Descent d(observer_, level + 1, level);
  const CacheKey key{kOpRestrict | (static_cast<std::uint32_t>(target) << 8), p, lo, hi};
  if (auto hit = cache_find(level, key)) return *hit;
  std::vector<NodeId> kids(children(level, p).begin(), children(level, p).end());
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    if (level == target) {
      if (i < lo || i > hi) kids[i] = kZero;
    } else if (kids[i] != kZero) {
      kids[i] = restrict_range(level - 1, kids[i], target, lo, hi);
    }
  }
  NodeId res = node(level, std::move(kids));
  cache_store(level, key, res);
  return res;
}

NodeId Forest::full(int level) {
  if (level == 0) return kOne;
  if (full_[level] != kZero) return full_[level];
  NodeId below = full(level - 1);
  NodeId r = node(level, std::vector<NodeId>(domain(level), below));
  full_[level] = r;
  return r;
}

NodeId Forest::singleton(const GlobalState& s) {
  if (s.size() != static_cast<std::size_t>(levels_))
    throw std::invalid_argument("state length differs from forest levels");
  NodeId cur = kOne;
  for (int k = 1; k <= levels_; ++k) {
    std::uint32_t v = s[static_cast<std::size_t>(levels_ - k)];
    std::vector<NodeId> ch(v + 1, kZero);
    ch[v] = cur;
    cur = node(k, std::move(ch));
  }
  return cur;
}

NodeId Forest::from_states(std::span<const GlobalState> states) {
  NodeId acc = kZero;
  for (const auto& s : states) acc = unite(levels_, acc, singleton(s));
  return acc;
}

const BigInt& Forest::path_count(int level, NodeId p) {
  static const BigInt zero = 0;
  static const BigInt one = 1;
  if (p == kZero) return zero;
  if (level == 0) return one;
  auto& counts = tables_[level].counts;
  if (auto it = counts.find(p); it != counts.end()) return it->second;
  BigInt total = 0;
  std::vector<NodeId> kids(children(level, p).begin(), children(level, p).end());
  for (NodeId c : kids) total += path_count(level - 1, c);
  return tables_[level].counts.emplace(p, std::move(total)).first->second;
}

const BigInt& Forest::space_size(int level) const {
  if (space_.empty()) {
    space_.resize(levels_ + 1);
    space_[0] = 1;
    for (int k = 1; k <= levels_; ++k) space_[k] = space_[k - 1] * domain(k);
  }
  return space_[level];
}

long double Forest::fullness(int level, NodeId p) {
  if (p == kZero) return 0.0L;
  if (level == 0) return 1.0L;
  return path_count(level, p).convert_to<long double>() /
         space_size(level).convert_to<long double>();
}

bool Forest::is_full(int level, NodeId p) {
  if (p == kZero) return false;
  if (level == 0) return true;
  return path_count(level, p) == space_size(level);
}

std::vector<GlobalState> Forest::enumerate(NodeId root, std::size_t limit) {
  if (path_count(levels_, root) > limit)
    throw std::length_error("state set larger than enumeration limit");
  std::vector<GlobalState> out;
  GlobalState cur(static_cast<std::size_t>(levels_), 0);
  enumerate_rec(levels_, root, cur, out);
  return out;
}

void Forest::enumerate_rec(int level, NodeId p, GlobalState& cur, std::vector<GlobalState>& out) {
  if (p == kZero) return;
  if (level == 0) {
    out.push_back(cur);
    return;
  }
  auto kids = children(level, p);
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    if (kids[i] == kZero) continue;
    cur[static_cast<std::size_t>(levels_ - level)] = i;
    enumerate_rec(level - 1, kids[i], cur, out);
  }
}

std::vector<std::vector<char>> Forest::mark(std::span<const NodeRef> roots) const {
  std::vector<std::vector<char>> marks(levels_ + 1);
  for (int k = 1; k <= levels_; ++k) marks[k].assign(tables_[k].nodes.size(), 0);
  for (const auto& r : roots)
    if (r.level >= 1 && r.id != kZero) marks[r.level][r.id] = 1;
  for (auto [id, count] : pins_)
    if (id != kZero) marks[levels_][id] = 1;
  for (int k = levels_; k >= 2; --k) {
    for (NodeId id = 1; id < marks[k].size(); ++id) {
      if (!marks[k][id]) continue;
      for (NodeId c : tables_[k].nodes[id])
        if (c != kZero) marks[k - 1][c] = 1;
    }
  }
  return marks;
}

std::string Forest::dump(std::span<const NodeRef> roots) const {
  std::vector<std::vector<char>> marks(levels_ + 1);
  for (int k = 1; k <= levels_; ++k) marks[k].assign(tables_[k].nodes.size(), 0);
  for (const auto& r : roots)
    if (r.level >= 1) marks[r.level][r.id] = 1;
  for (int k = levels_; k >= 2; --k)
    for (NodeId id = 0; id < marks[k].size(); ++id)
      if (marks[k][id])
        for (NodeId c : tables_[k].nodes[id])
          if (c != kZero) marks[k - 1][c] = 1;
  std::ostringstream out;
  for (int k = levels_; k >= 1; --k) {
    for (NodeId id = 0; id < marks[k].size(); ++id) {
      if (!marks[k][id]) continue;
      out << 'L' << k << ':' << id << " -> [";
      const auto& ch = tables_[k].nodes[id];
      for (std::size_t i = 0; i < ch.size(); ++i) out << (i ? "," : "") << ch[i];
      out << "]\n";
    }
  }
  return out.str();
}

std::vector<std::size_t> Forest::reachable_per_level(std::span<const NodeRef> roots) const {
  std::vector<std::vector<char>> marks(levels_ + 1);
  for (int k = 1; k <= levels_; ++k) marks[k].assign(tables_[k].nodes.size(), 0);
  for (const auto& r : roots)
    if (r.level >= 1 && r.id != kZero) marks[r.level][r.id] = 1;
  std::vector<std::size_t> per(levels_ + 1, 0);
  for (int k = levels_; k >= 1; --k) {
    for (NodeId id = 1; id < marks[k].size(); ++id) {
      if (!marks[k][id]) continue;
      ++per[k];
      if (k >= 2)
        for (NodeId c : tables_[k].nodes[id])
          if (c != kZero) marks[k - 1][c] = 1;
    }
  }
  return per;
}

std::size_t Forest::reachable_nodes(std::span<const NodeRef> roots) const {
  std::size_t total = 0;
  for (std::size_t n : reachable_per_level(roots)) total += n;
  return total;
}

void Forest::collect_garbage(std::span<const NodeRef> extra) {
  auto marks = mark(extra);
  for (int k = 1; k <= levels_; ++k) {
    auto& t = tables_[k];
    for (NodeId id = 1; id < t.nodes.size(); ++id) {
      if (!t.alive[id] || marks[k][id]) continue;
      t.unique.erase(t.nodes[id]);
      t.nodes[id].clear();
      t.nodes[id].shrink_to_fit();
      t.alive[id] = 0;
      t.free.push_back(id);
      --t.live;
      --live_;
    }
    // Reuse low ids first so allocation order stays independent of history.
    std::sort(t.free.begin(), t.free.end(), std::greater<>());
  }
  clear_caches();
}

void Forest::clear_caches() {
  for (int k = 1; k <= levels_; ++k) {
    tables_[k].cache.clear();
    tables_[k].counts.clear();
  }
  std::fill(full_.begin(), full_.end(), kZero);
}

std::optional<NodeId> Forest::cache_find(int level, const CacheKey& key) const {
  const auto& c = tables_[level].cache;
  if (auto it = c.find(key); it != c.end()) return it->second;
  return std::nullopt;
}

void Forest::cache_store(int level, const CacheKey& key, NodeId result) {
  tables_[level].cache[key] = result;
}

void Forest::pin(NodeId root) {
  if (root != kZero) ++pins_[root];
}

void Forest::unpin(NodeId root) {
  if (root == kZero) return;
  auto it = pins_.find(root);
  if (it != pins_.end() && --it->second == 0) pins_.erase(it);
}

StateSet::StateSet(Forest& forest, NodeId root) : forest_(&forest), root_(root) {
  forest_->pin(root_);
}

StateSet::StateSet(const StateSet& o) : forest_(o.forest_), root_(o.root_) {
  if (forest_) forest_->pin(root_);
}

StateSet::StateSet(StateSet&& o) noexcept : forest_(o.forest_), root_(o.root_) {
  o.forest_ = nullptr;
  o.root_ = kZero;
}

StateSet& StateSet::operator=(const StateSet& o) {
  if (this != &o) {
    if (o.forest_) o.forest_->pin(o.root_);
    release();
    forest_ = o.forest_;
    root_ = o.root_;
  }
  return *this;
}

StateSet& StateSet::operator=(StateSet&& o) noexcept {
  if (this != &o) {
    release();
    forest_ = o.forest_;
    root_ = o.root_;
    o.forest_ = nullptr;
    o.root_ = kZero;
  }
  return *this;
}

StateSet::~StateSet() { release(); }

void StateSet::release() {
  if (forest_) forest_->unpin(root_);
  forest_ = nullptr;
  root_ = kZero;
}

BigInt StateSet::count() const {
  if (!forest_) return 0;
  return forest_->path_count(forest_->levels(), root_);
}

std::vector<GlobalState> StateSet::enumerate(std::size_t limit) const {
  if (!forest_) return {};
  return forest_->enumerate(root_, limit);
}

namespace {
Forest& same_forest(const StateSet& a, const StateSet& b) {
  if (!a.forest() || a.forest() != b.forest())
    throw std::invalid_argument("state sets belong to different forests");
  return *a.forest();
}
}  // namespace

StateSet unite(const StateSet& a, const StateSet& b) {
  Forest& f = same_forest(a, b);
  return {f, f.unite(f.levels(), a.root(), b.root())};
}

StateSet intersect(const StateSet& a, const StateSet& b) {
  Forest& f = same_forest(a, b);
  return {f, f.intersect(f.levels(), a.root(), b.root())};
}

StateSet difference(const StateSet& a, const StateSet& b) {
  Forest& f = same_forest(a, b);
  return {f, f.difference(f.levels(), a.root(), b.root())};
}

bool subset_of(const StateSet& a, const StateSet& b) { return difference(a, b).empty(); }

StateSet empty_set(Forest& f) { return {f, kZero}; }
StateSet full_set(Forest& f) { return {f, f.full(f.levels())}; }
StateSet make_set(Forest& f, std::span<const GlobalState> states) {
  return {f, f.from_states(states)};
}

}  // namespace pnsat
