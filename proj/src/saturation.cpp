#include <algorithm>
#include <map>

#include "pnsat/symbolic.hpp"

namespace pnsat {

Saturator::Saturator(Forest& f, const KroneckerRelation& rel, Order order, ChainLog* log)
    : f_(f),
      rel_(rel),
      order_(order),
      log_(log),
      sat_op_(order == Order::Fixed ? kOpUser : kOpUser + 2),
      fire_op_(sat_op_ + 1) {}

NodeId Saturator::saturate(int level, NodeId p) {
  if (level == 0 || p == kZero) return p;
  Descent d(f_.observer(), level + 1, level);
  const CacheKey key{sat_op_, p, rel_.tag(), 0};
  if (auto hit = f_.cache_find(level, key)) return *hit;
  std::vector<NodeId> t(f_.children(level, p).begin(), f_.children(level, p).end());
  for (auto& c : t)
    if (c != kZero) c = saturate(level - 1, c);
  saturate_node(level, t);
  NodeId r = f_.node(level, std::move(t));
  f_.cache_store(level, key, r);
  f_.cache_store(level, {sat_op_, r, rel_.tag(), 0}, r);
  return r;
}

NodeId Saturator::fire(int level, NodeId q, RelRef r) {
  ++fire_calls_;
  if (q == kZero || r == kRelEmpty) return kZero;
  if (r == kRelIdentity || level == 0) return q;
  Descent d(f_.observer(), level + 1, level);
  const CacheKey key{fire_op_, q, r, rel_.tag()};
  if (auto hit = f_.cache_find(level, key)) return *hit;
  std::vector<NodeId> kids(f_.children(level, q).begin(), f_.children(level, q).end());
  std::vector<NodeId> acc;
  std::vector<RelEdge> edges;
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    if (kids[i] == kZero) continue;
    edges.clear();
    rel_.edges(level, r, i, edges);
    for (const auto& e : edges) {
      NodeId g = fire(level - 1, kids[i], e.below);
      if (g == kZero) continue;
      if (e.to >= acc.size()) acc.resize(e.to + 1, kZero);
      acc[e.to] = f_.unite(level - 1, acc[e.to], g);
    }
  }
  // Children are unions of saturated nodes, hence saturated themselves.
  saturate_node(level, acc);
  NodeId res = f_.node(level, std::move(acc));
  f_.cache_store(level, key, res);
  f_.cache_store(level, {sat_op_, res, rel_.tag(), 0}, res);
  return res;
}

void Saturator::saturate_node(int level, std::vector<NodeId>& t) {
  ++node_saturations_;
  if (rel_.bucket(level).empty()) return;
  if (order_ == Order::Fixed)
    saturate_fixed(level, t);
  else
    saturate_chained(level, t);
}

void Saturator::saturate_fixed(int level, std::vector<NodeId>& t) {
  std::vector<RelEdge> edges;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e : rel_.bucket(level)) {
      const RelRef r = rel_.event_ref(e, level);
      for (std::uint32_t i = 0; i < t.size(); ++i) {
        if (t[i] == kZero) continue;
        edges.clear();
        rel_.edges(level, r, i, edges);
        for (const auto& edge : edges) {
          NodeId g = fire(level - 1, t[i], edge.below);
          if (g == kZero) continue;
          if (edge.to >= t.size()) t.resize(edge.to + 1, kZero);
          NodeId u = f_.unite(level - 1, t[edge.to], g);
          if (u != t[edge.to]) {
            t[edge.to] = u;
            changed = true;
          }
        }
      }
    }
  }
}

NodeId Saturator::fire_edge(int level, std::vector<NodeId>& t, LocalEdge e) {
  NodeId acc = kZero;
  for (std::size_t ev : rel_.bucket(level)) {
    if (rel_.local_step(ev, level, e.first) != e.second) continue;
    NodeId g = fire(level - 1, t[e.first], rel_.event_ref(ev, level - 1));
    acc = f_.unite(level - 1, acc, g);
  }
  return acc;
}

void Saturator::saturate_chained(int level, std::vector<NodeId>& t) {
  const std::uint64_t instance = node_saturations_;
  const RelRef group = rel_.group_ref(level);
  std::map<LocalEdge, NodeId> fired_with;  // source child at the last firing
  std::map<LocalEdge, long double> rel_phi;

  auto child = [&](std::uint32_t i) { return i < t.size() ? t[i] : kZero; };
  auto pending = [&](const LocalEdge& e) {
    auto it = fired_with.find(e);
    return it == fired_with.end() || it->second != child(e.first);
  };
  auto phi_r = [&](const LocalEdge& e) {
    auto it = rel_phi.find(e);
    if (it != rel_phi.end()) return it->second;
    long double sum = 0.0L;
    for (std::size_t ev : rel_.bucket(level))
      if (rel_.local_step(ev, level, e.first) == e.second)
        sum += rel_.enabled_fraction(ev, level, f_);
    return rel_phi[e] = std::min(sum, 1.0L);
  };

  TransitionGraph g;
  Condensation cond;
  std::vector<std::vector<LocalEdge>> inside, leaving;
  long double space = 0.0L;
  bool stale = true;

  for (;;) {
    if (stale) {
      g = dynamic_graph(f_, level, t, rel_, group);
      cond = condense(g);
      inside.assign(cond.count, {});
      leaving.assign(cond.count, {});
      for (const auto& e : g.edges) {
        const auto c = cond.component[e.first];
        (cond.component[e.second] == c ? inside : leaving)[c].push_back(e);
      }
      space = f_.space_size(level).convert_to<long double>();
      stale = false;
    }

    // First component in topological order with outstanding work: its
    // internal edges converge before any edge leaves it.
    std::optional<LocalEdge> best;
    long double best_score = 0.0L;
    auto consider = [&](const std::vector<LocalEdge>& candidates) {
      for (const auto& e : candidates) {
        if (!pending(e)) continue;
        long double s = phi_delta(space, f_.fullness(level - 1, child(e.first)), phi_r(e),
                                  f_.fullness(level - 1, child(e.second)));
        if (!best || s > best_score) {
          best = e;
          best_score = s;
        }
      }
    };
    for (std::uint32_t c = 0; c < cond.count && !best; ++c) {
      consider(inside[c]);
      if (!best) consider(leaving[c]);
    }
    if (!best) break;

    if (log_) {
      ChainStep step{instance, level, g.vertices, *best, g.edges, {}};
      for (const auto& e : g.edges)
        if (pending(e)) step.pending.push_back(e);
      log_->steps.push_back(std::move(step));
    }

    const auto [i, j] = *best;
    const NodeId source = t[i];
    NodeId gained = fire_edge(level, t, *best);
    fired_with[*best] = source;
    if (gained == kZero) continue;
    if (j >= t.size()) t.resize(j + 1, kZero);
    NodeId u = f_.unite(level - 1, t[j], gained);
    if (u != t[j]) {
      t[j] = u;
      stale = true;
    }
  }
}

}  // namespace pnsat
