#include "pnsat/schedule.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace pnsat {

Condensation condense(const TransitionGraph& g) {
  const std::uint32_t n = g.vertices;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [i, j] : g.edges) adj[i].push_back(j);

  // Iterative Tarjan.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack, raw(n, 0);
  std::uint32_t raw_count = 0;
  int next_index = 0;
  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  for (std::uint32_t s = 0; s < n; ++s) {
    if (index[s] != -1) continue;
    std::vector<Frame> calls{{s, 0}};
    index[s] = low[s] = next_index++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!calls.empty()) {
      const std::uint32_t v = calls.back().v;
      if (calls.back().next < adj[v].size()) {
        const std::uint32_t w = adj[v][calls.back().next++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          raw[w] = raw_count;
        } while (w != v);
        ++raw_count;
      }
      calls.pop_back();
      if (!calls.empty()) {
        const std::uint32_t u = calls.back().v;
        low[u] = std::min(low[u], low[v]);
      }
    }
  }

  // Canonical topological numbering of the condensation.
  std::vector<std::uint32_t> min_vertex(raw_count, n);
  for (std::uint32_t v = 0; v < n; ++v) min_vertex[raw[v]] = std::min(min_vertex[raw[v]], v);
  std::vector<std::vector<std::uint32_t>> dag(raw_count);
  std::vector<std::uint32_t> indegree(raw_count, 0);
  for (auto [i, j] : g.edges) {
    if (raw[i] == raw[j]) continue;
    dag[raw[i]].push_back(raw[j]);
    ++indegree[raw[j]];
  }
  using Item = std::pair<std::uint32_t, std::uint32_t>;  // (min vertex, raw id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::uint32_t c = 0; c < raw_count; ++c)
    if (indegree[c] == 0) ready.push({min_vertex[c], c});
  std::vector<std::uint32_t> renumber(raw_count, 0);
  std::uint32_t next = 0;
  while (!ready.empty()) {
    auto [mv, c] = ready.top();
    ready.pop();
    renumber[c] = next++;
    for (std::uint32_t d : dag[c])
      if (--indegree[d] == 0) ready.push({min_vertex[d], d});
  }

  Condensation out;
  out.count = raw_count;
  out.component.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) out.component[v] = renumber[raw[v]];
  return out;
}

TransitionGraph dynamic_graph(Forest& f, int level, std::span<const NodeId> children,
                              const RelationView& rel, RelRef r) {
  TransitionGraph g;
  g.vertices = std::max<std::uint32_t>(f.domain(level), static_cast<std::uint32_t>(children.size()));
  std::vector<RelEdge> out;
  for (std::uint32_t i = 0; i < children.size(); ++i) {
    if (children[i] == kZero) continue;
    out.clear();
    rel.edges(level, r, i, out);
    for (const auto& e : out) {
      NodeId target = e.to < children.size() ? children[e.to] : kZero;
      if (f.is_full(level - 1, target)) continue;
      g.vertices = std::max(g.vertices, e.to + 1);
      g.edges.emplace_back(i, e.to);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

FiringSchedule firing_schedule(Forest& f, int level, NodeId p, const RelationView& rel, RelRef r,
                               const RelFullness& rel_fullness) {
  std::vector<NodeId> kids(f.children(level, p).begin(), f.children(level, p).end());
  const TransitionGraph g = dynamic_graph(f, level, kids, rel, r);
  const Condensation cond = condense(g);
  auto child = [&](std::uint32_t i) { return i < kids.size() ? kids[i] : kZero; };
  const long double space = f.space_size(level).convert_to<long double>();
  auto score = [&](const LocalEdge& e) {
    long double phi_r = rel_fullness ? rel_fullness(e.first, e.second) : 1.0L;
    return phi_delta(space, f.fullness(level - 1, child(e.first)), phi_r,
                     f.fullness(level - 1, child(e.second)));
  };
  auto by_score = [&](std::vector<LocalEdge>& v) {
    std::vector<std::pair<long double, LocalEdge>> scored;
    for (const auto& e : v) scored.emplace_back(score(e), e);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = scored[i].second;
  };

  FiringSchedule sched;
  for (std::uint32_t c = 0; c < cond.count; ++c) {
    std::vector<LocalEdge> inside, leaving;
    for (const auto& e : g.edges) {
      if (cond.component[e.first] != c) continue;
      (cond.component[e.second] == c ? inside : leaving).push_back(e);
    }
    by_score(inside);
    by_score(leaving);
    sched.order.insert(sched.order.end(), inside.begin(), inside.end());
    sched.order.insert(sched.order.end(), leaving.begin(), leaving.end());
  }

  const std::uint32_t n = g.vertices;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [i, j] : g.edges) adj[i].push_back(j);
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::uint32_t s = 0; s < n; ++s) {
    std::vector<std::uint32_t> todo(adj[s].begin(), adj[s].end());
    while (!todo.empty()) {
      std::uint32_t v = todo.back();
      todo.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = 1;
      for (std::uint32_t w : adj[v]) todo.push_back(w);
    }
  }
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    if (kids[i] == kZero) continue;
    for (std::uint32_t j = i + 1; j < kids.size(); ++j)
      if (kids[j] != kZero && !reach[i][j] && !reach[j][i]) sched.parallel_safe.emplace_back(i, j);
  }
  return sched;
}

}  // namespace pnsat
