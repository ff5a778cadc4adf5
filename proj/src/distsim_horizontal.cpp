#include "pnsat/distsim.hpp"
#include "pnsat/symbolic.hpp"

namespace pnsat {

bool ranges_partition(int levels, const std::vector<LevelRange>& ranges) {
  if (ranges.empty()) return false;
  int next = 1;
  for (const auto& r : ranges) {
    if (r.bottom != next || r.top < r.bottom - 1) return false;
    next = r.top + 1;
  }
  return next == levels + 1;
}

std::vector<LevelRange> equal_ranges(int levels, std::uint32_t n) {
  if (n == 0) throw InvalidPartition("need at least one workstation for level ranges");
  std::vector<LevelRange> out;
  const int base = levels / static_cast<int>(n);
  int extra = levels % static_cast<int>(n);
  int bottom = 1;
  for (std::uint32_t w = 0; w < n; ++w) {
    const int size = base + (extra-- > 0 ? 1 : 0);
    out.push_back({bottom + size - 1, bottom});
    bottom += size;
  }
  return out;
}

namespace {

/// Charges each forest descent to the workstation owning the target level.
/// A descent whose caller lives on another workstation costs a request and
/// a reply; the caller sits idle for the work done in between.
class OwnershipObserver : public DescentObserver {
 public:
  OwnershipObserver(int levels, const std::vector<LevelRange>& ranges)
      : owner_(static_cast<std::size_t>(levels) + 2, 0), met_(ranges.size()) {
    for (std::uint32_t w = 0; w < ranges.size(); ++w)
      for (int k = ranges[w].bottom; k <= ranges[w].top; ++k) owner_[k] = w;
    owner_[levels + 1] = owner_[levels];  // the driver runs where the root lives
  }

  void enter(int from, int to) override {
    const std::uint32_t caller = owner_[from], callee = owner_[to];
    ++work_;
    met_[callee].work_steps++;
    const bool crossing = caller != callee;
    if (crossing) {
      met_[caller].requests++;
      met_[caller].messages_sent++;
      met_[callee].messages_received++;
    }
    stack_.push_back({crossing, work_});
  }

  void leave(int from, int to) override {
    const Frame fr = stack_.back();
    stack_.pop_back();
    if (!fr.crossing) return;
    const std::uint32_t caller = owner_[from], callee = owner_[to];
    met_[callee].replies++;
    met_[callee].messages_sent++;
    met_[caller].messages_received++;
    met_[caller].idle_steps += work_ - fr.work_at_enter;
  }

  std::uint32_t owner(int level) const { return owner_[level]; }
  std::vector<WorkstationMetrics>& metrics() { return met_; }
  std::uint64_t work() const { return work_; }

 private:
  struct Frame {
    bool crossing;
    std::uint64_t work_at_enter;
  };
  std::vector<std::uint32_t> owner_;
  std::vector<WorkstationMetrics> met_;
  std::vector<Frame> stack_;
  std::uint64_t work_ = 0;
};

class ObserverScope {
 public:
  ObserverScope(Forest& f, DescentObserver* o) : f_(f), prev_(f.observer()) { f_.set_observer(o); }
  ~ObserverScope() { f_.set_observer(prev_); }

 private:
  Forest& f_;
  DescentObserver* prev_;
};

}  // namespace

HorizontalSimResult run_horizontal_saturation(Model& m, Forest& f,
                                              const std::vector<LevelRange>& ranges,
                                              const HorizontalSimConfig& cfg) {
  if (!ranges_partition(m.levels(), ranges))
    throw InvalidPartition("level ranges do not partition the levels");
  OwnershipObserver obs(m.levels(), ranges);
  GenerationOptions opts;
  opts.node_cap = cfg.node_cap;
  opts.collect_garbage = false;
  Generation g = [&] {
    ObserverScope scope(f, &obs);
    return cfg.chained ? chained_saturate(m, f, opts) : saturate(m, f, opts);
  }();

  auto& met = obs.metrics();
  for (int k = 1; k <= m.levels(); ++k) met[obs.owner(k)].cache_entries += f.cache_entries(k);
  f.collect_garbage();
  const NodeRef root = g.states.ref();
  const auto per_level = f.reachable_per_level({&root, 1});

  HorizontalSimResult r;
  for (int k = 1; k <= m.levels(); ++k) {
    met[obs.owner(k)].nodes += per_level[k];
    r.resident_nodes += per_level[k];
  }
  r.metrics.mode = "horizontal";
  r.metrics.workstations = static_cast<std::uint32_t>(ranges.size());
  r.metrics.steps = obs.work();
  r.metrics.state_count = g.metrics.state_count;
  r.metrics.per_workstation = met;
  r.states = std::move(g.states);
  return r;
}

}  // namespace pnsat
