#include "pnsat/symbolic.hpp"

#include <algorithm>
#include <chrono>

namespace pnsat {

namespace {

class CapScope {
 public:
  CapScope(Forest& f, std::optional<std::size_t> cap) : f_(f) { f_.set_node_cap(cap); }
  ~CapScope() { f_.set_node_cap(std::nullopt); }

 private:
  Forest& f_;
};

using Clock = std::chrono::steady_clock;

void finish(Model& m, Forest& f, const GenerationOptions& opts, Clock::time_point start,
            const ForestCounters& before, Generation& g) {
  auto& met = g.metrics;
  met.union_calls = f.counters().union_calls - before.union_calls;
  const NodeRef root = g.states.ref();
  met.final_nodes = f.reachable_nodes({&root, 1});
  met.state_count = g.states.count();
  for (int k = 1; k <= m.levels(); ++k) m.grow_domain(k, f.domain(k));
  if (opts.measure_time)
    met.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t size_of(Forest& f, const StateSet& s) {
  const NodeRef r = s.ref();
  return f.reachable_nodes({&r, 1});
}

Generation run_saturation(Model& m, Forest& f, const GenerationOptions& opts,
                          Saturator::Order order, ChainLog* log) {
  const auto start = Clock::now();
  CapScope cap(f, opts.node_cap);
  const ForestCounters before = f.counters();
  f.reset_peak();
  KroneckerRelation rel(m);
  StateSet init = initial_set(m, f);
  Saturator sat(f, rel, order, log);
  Generation g{StateSet(f, sat.saturate(m.levels(), init.root())), {}};
  g.metrics.strategy = order == Saturator::Order::Fixed ? "saturation" : "saturation-chained";
  g.metrics.iterations = sat.node_saturations();
  g.metrics.relprod_calls = sat.fire_calls();
  g.metrics.peak_nodes = f.peak_nodes();
  init = StateSet();
  if (opts.collect_garbage) f.collect_garbage();
  finish(m, f, opts, start, before, g);
  return g;
}

}  // namespace

StateSet initial_set(const Model& m, Forest& f) {
  f.sync_domains(m);
  return make_set(f, m.initial_states());
}

StateSet fire_set(const KroneckerRelation& rel, const StateSet& x, std::size_t event) {
  Forest& f = *x.forest();
  const int top = f.levels();
  return StateSet(f, f.rel_product(top, x.root(), rel, rel.event_ref(event, top)));
}

StateSet image(const KroneckerRelation& rel, const StateSet& x) {
  Forest& f = *x.forest();
  const int top = f.levels();
  NodeId acc = kZero;
  for (std::size_t e = 0; e < rel.model().events().size(); ++e)
    acc = f.unite(top, acc, f.rel_product(top, x.root(), rel, rel.event_ref(e, top)));
  return StateSet(f, acc);
}

Generation bfs_generate(Model& m, Forest& f, const GenerationOptions& opts) {
  const auto start = Clock::now();
  CapScope cap(f, opts.node_cap);
  const ForestCounters before = f.counters();
  f.reset_peak();
  KroneckerRelation rel(m);
  StateSet y = initial_set(m, f);
  StateSet u = y;
  RunMetrics met;
  met.strategy = "bfs";
  std::uint64_t peak_image = 0, peak_frontier = size_of(f, u);
  while (!u.empty()) {
    ++met.iterations;
    StateSet z = image(rel, u);
    peak_image = std::max(peak_image, size_of(f, z));
    u = difference(z, y);
    y = unite(y, u);
    peak_frontier = std::max(peak_frontier, size_of(f, u));
    z = StateSet();
    if (opts.collect_garbage) f.collect_garbage();
  }
  met.relprod_calls = f.counters().relprod_calls - before.relprod_calls;
  met.peak_nodes = f.peak_nodes();
  met.peak_image_nodes = peak_image;
  met.peak_frontier_nodes = peak_frontier;
  Generation g{std::move(y), std::move(met)};
  finish(m, f, opts, start, before, g);
  return g;
}

Generation saturate(Model& m, Forest& f, const GenerationOptions& opts) {
  return run_saturation(m, f, opts, Saturator::Order::Fixed, nullptr);
}

Generation chained_saturate(Model& m, Forest& f, const GenerationOptions& opts, ChainLog* log) {
  return run_saturation(m, f, opts, Saturator::Order::Chained, log);
}

FiringSchedule firing_schedule(Forest& f, const KroneckerRelation& rel, int level, NodeId p) {
  auto rel_fullness = [&](std::uint32_t i, std::uint32_t j) {
    long double sum = 0.0L;
    for (std::size_t e : rel.bucket(level))
      if (rel.local_step(e, level, i) == j) sum += rel.enabled_fraction(e, level, f);
    return std::min(sum, 1.0L);
  };
  return firing_schedule(f, level, p, rel, rel.group_ref(level), rel_fullness);
}

}  // namespace pnsat
