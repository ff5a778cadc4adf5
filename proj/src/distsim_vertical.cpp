#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "pnsat/distsim.hpp"
#include "pnsat/kronecker.hpp"
#include "pnsat/symbolic.hpp"
#include "pnsat/termination.hpp"

namespace pnsat {

StateSet restrict_to(const StateSet& x, const Window& w) {
  Forest& f = *x.forest();
  NodeId r = x.root();
  for (const auto& c : w) r = f.restrict_range(f.levels(), r, c.level, c.lo, c.hi);
  return StateSet(f, r);
}

StateSet window_set(Forest& f, const Window& w) { return restrict_to(full_set(f), w); }

bool windows_partition(Forest& f, const std::vector<Window>& windows) {
  std::vector<StateSet> sets;
  for (const auto& w : windows) {
    for (const auto& c : w)
      if (c.level < 1 || c.level > f.levels() || c.lo > c.hi) return false;
    sets.push_back(window_set(f, w));
  }
  StateSet cover = empty_set(f);
  for (const auto& s : sets) {
    if (!intersect(cover, s).empty()) return false;
    cover = unite(cover, s);
  }
  return cover == full_set(f);
}

std::vector<Window> top_level_windows(int levels, std::uint32_t n) {
  std::vector<Window> out;
  for (std::uint32_t v = 0; v < n; ++v)
    out.push_back({{levels, v, v + 1 == n ? UINT32_MAX : v}});
  return out;
}

namespace {

struct SetMessage {
  std::uint32_t to = 0;
  StateSet set;
};

std::uint64_t nodes_of(const StateSet& s) {
  const NodeRef r = s.ref();
  return s.forest()->reachable_nodes({&r, 1});
}

class NodeCapScope {
 public:
  NodeCapScope(Forest& f, std::optional<std::size_t> cap) : f_(f) { f_.set_node_cap(cap); }
  ~NodeCapScope() { f_.set_node_cap(std::nullopt); }

 private:
  Forest& f_;
};

}  // namespace

VerticalSimResult run_vertical_bfs(Model& m, Forest& f, const std::vector<Window>& windows,
                                   const VerticalSimConfig& cfg) {
  const auto n = static_cast<std::uint32_t>(windows.size());
  if (n == 0) throw InvalidPartition("at least one window is required");
  f.sync_domains(m);
  if (!windows_partition(f, windows))
    throw InvalidPartition("windows do not partition the potential state space");

  NodeCapScope cap(f, cfg.node_cap);
  KroneckerRelation rel(m);
  const StateSet init = initial_set(m, f);
  std::vector<StateSet> known(n), fresh(n);
  for (std::uint32_t w = 0; w < n; ++w) known[w] = fresh[w] = restrict_to(init, windows[w]);

  std::vector<std::deque<SetMessage>> inbox(n);
  std::map<std::pair<std::uint64_t, std::uint64_t>, SetMessage> network;
  std::uint64_t seq = 0;
  std::vector<WorkstationMetrics> met(n);
  TokenDetector detector(n);
  std::mt19937_64 rng(cfg.seed);

  auto passive = [&](std::uint32_t w) { return fresh[w].empty() && inbox[w].empty(); };
  auto quiescent = [&] {
    if (!network.empty()) return false;
    for (std::uint32_t w = 0; w < n; ++w)
      if (!passive(w)) return false;
    return true;
  };

  std::uint64_t t = 0;
  std::optional<std::uint64_t> quiet_at;
  for (;;) {
    while (!network.empty() && network.begin()->first.first <= t) {
      auto node = network.extract(network.begin());
      inbox[node.mapped().to].push_back(std::move(node.mapped()));
    }
    const auto w = static_cast<std::uint32_t>(t % n);
    if (!fresh[w].empty()) {
      met[w].work_steps++;
      const StateSet p = image(rel, fresh[w]);
      fresh[w] = difference(restrict_to(p, windows[w]), known[w]);
      known[w] = unite(known[w], fresh[w]);
      for (std::uint32_t v = 0; v < n; ++v) {
        if (v == w) continue;
        StateSet part = restrict_to(p, windows[v]);
        if (part.empty()) continue;
        met[w].messages_sent++;
        met[w].items_sent += nodes_of(part);
        detector.on_send(w);
        std::uint64_t due = t + 1;
        if (cfg.max_delay) due += std::uniform_int_distribution<std::uint32_t>(0, cfg.max_delay)(rng);
        network.emplace(std::make_pair(due, seq++), SetMessage{v, std::move(part)});
      }
    } else if (!inbox[w].empty()) {
      met[w].work_steps++;
      StateSet got = empty_set(f);
      while (!inbox[w].empty()) {
        const StateSet s = std::move(inbox[w].front().set);
        inbox[w].pop_front();
        detector.on_receive(w);
        met[w].messages_received++;
        met[w].items_received += nodes_of(s);
        if (subset_of(s, known[w])) met[w].duplicates_received++;
        got = unite(got, s);
      }
      fresh[w] = difference(got, known[w]);
      known[w] = unite(known[w], fresh[w]);
    } else {
      met[w].idle_steps++;
    }
    ++t;
    if (t % n == 0) f.collect_garbage();
    if (!quiet_at && quiescent()) quiet_at = t;
    if (detector.advance(passive)) break;
  }

  VerticalSimResult r;
  r.outcome.terminated_step = t;
  r.outcome.quiescent_step = quiet_at.value_or(t);
  r.outcome.inboxes_empty = network.empty();
  for (const auto& box : inbox) r.outcome.inboxes_empty = r.outcome.inboxes_empty && box.empty();
  if (!windows_partition(f, windows))
    throw InvalidPartition("windows stopped partitioning the grown potential state space");

  r.all = empty_set(f);
  std::uint64_t node_sum = 0;
  for (std::uint32_t w = 0; w < n; ++w) {
    if (!(restrict_to(known[w], windows[w]) == known[w])) r.outcome.ownership_sound = false;
    met[w].states = static_cast<std::uint64_t>(known[w].count());
    met[w].nodes = nodes_of(known[w]);
    node_sum += met[w].nodes;
    r.all = unite(r.all, known[w]);
  }
  r.owned = std::move(known);
  for (int k = 1; k <= m.levels(); ++k) m.grow_domain(k, f.domain(k));

  r.metrics.mode = "vertical";
  r.metrics.workstations = n;
  r.metrics.steps = t;
  r.metrics.termination_rounds = detector.rounds();
  r.metrics.state_count = r.all.count();
  r.metrics.per_workstation = std::move(met);
  r.metrics.union_nodes = nodes_of(r.all);
  r.metrics.duplicated_nodes =
      static_cast<std::int64_t>(node_sum) - static_cast<std::int64_t>(*r.metrics.union_nodes);
  return r;
}

}  // namespace pnsat
