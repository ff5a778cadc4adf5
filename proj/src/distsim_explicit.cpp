#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "pnsat/distsim.hpp"
#include "pnsat/termination.hpp"

namespace pnsat {

std::vector<GlobalState> ExplicitSimResult::all_states() const {
  std::vector<GlobalState> out;
  for (const auto& s : stores) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct StateMessage {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::vector<GlobalState> states;
};

class ExplicitCluster {
 public:
  ExplicitCluster(Model& m, PartitionFn part, const ExplicitSimConfig& cfg)
      : m_(m),
        part_(std::move(part)),
        cfg_(cfg),
        n_(workstations(part_)),
        stores_(n_),
        inbox_(n_),
        outbox_(n_, std::vector<std::vector<GlobalState>>(n_)),
        metrics_(n_),
        detector_(n_),
        rng_(cfg.seed) {
    if (n_ == 0) throw InvalidPartition("at least one workstation is required");
    if (cfg_.buffer == 0) throw InvalidPartition("buffer size must be positive");
  }

  ExplicitSimResult run() {
    for (const auto& s : m_.initial_states()) store(owner(s), s);

    std::uint64_t t = 0;
    std::optional<std::uint64_t> quiescent;
    for (;;) {
      deliver(t);
      act(static_cast<std::uint32_t>(t % n_), t);
      ++t;
      if (cfg_.rebalance_every && t % n_ == 0 && (t / n_) % cfg_.rebalance_every == 0)
        maybe_rebalance();
      if (!quiescent && globally_quiescent()) quiescent = t;
      if (detector_.advance([this](std::uint32_t w) { return passive(w); })) break;
    }

    ExplicitSimResult r;
    r.outcome.terminated_step = t;
    r.outcome.quiescent_step = quiescent.value_or(t);
    r.outcome.inboxes_empty = network_.empty();
    for (std::uint32_t w = 0; w < n_; ++w) {
      r.outcome.inboxes_empty = r.outcome.inboxes_empty && inbox_[w].empty();
      r.stores.push_back(stores_[w].sorted());
      for (const auto& s : r.stores.back())
        if (owner(s) != w) r.outcome.ownership_sound = false;
      metrics_[w].states = stores_[w].size();
    }
    r.metrics.mode = "explicit";
    r.metrics.workstations = n_;
    r.metrics.steps = t;
    r.metrics.termination_rounds = detector_.rounds();
    r.metrics.per_workstation = metrics_;
    for (const auto& w : metrics_) r.metrics.state_count += w.states;
    if (std::holds_alternative<TreePartition>(part_)) r.metrics.leaf_moves = leaf_moves_;
    return r;
  }

 private:
  std::uint32_t owner(const GlobalState& s) const { return route(part_, s) - 1; }

  void store(std::uint32_t w, const GlobalState& s) {
    if (!stores_[w].insert(s)) return;
    if (cfg_.state_cap && ++total_ > *cfg_.state_cap) throw StateCapExceeded(*cfg_.state_cap);
  }

  bool outbox_empty(std::uint32_t w) const {
    return std::all_of(outbox_[w].begin(), outbox_[w].end(),
                       [](const auto& b) { return b.empty(); });
  }

  bool passive(std::uint32_t w) const {
    return stores_[w].frontier_empty() && inbox_[w].empty() && outbox_empty(w);
  }

  bool globally_quiescent() const {
    if (!network_.empty()) return false;
    for (std::uint32_t w = 0; w < n_; ++w)
      if (!passive(w)) return false;
    return true;
  }

  void flush(std::uint32_t w, std::uint32_t v, std::uint64_t t) {
    auto& buf = outbox_[w][v];
    if (buf.empty()) return;
    metrics_[w].messages_sent++;
    metrics_[w].items_sent += buf.size();
    detector_.on_send(w);
    std::uint64_t due = t + 1;
    if (cfg_.max_delay)
      due += std::uniform_int_distribution<std::uint32_t>(0, cfg_.max_delay)(rng_);
    network_.emplace(std::make_pair(due, seq_++), StateMessage{w, v, std::move(buf)});
    buf.clear();
  }

  void send(std::uint32_t w, std::uint32_t v, const GlobalState& s, std::uint64_t t) {
    outbox_[w][v].push_back(s);
    if (outbox_[w][v].size() >= cfg_.buffer) flush(w, v, t);
  }

  void deliver(std::uint64_t t) {
    while (!network_.empty() && network_.begin()->first.first <= t) {
      auto node = network_.extract(network_.begin());
      inbox_[node.mapped().to].push_back(std::move(node.mapped()));
    }
  }

  void act(std::uint32_t w, std::uint64_t t) {
    auto& met = metrics_[w];
    if (!inbox_[w].empty()) {
      StateMessage msg = std::move(inbox_[w].front());
      inbox_[w].pop_front();
      detector_.on_receive(w);
      met.messages_received++;
      met.items_received += msg.states.size();
      met.work_steps++;
      for (const auto& s : msg.states) {
        const std::uint32_t o = owner(s);
        if (o != w)
          send(w, o, s, t);  // ownership moved while the state was travelling
        else if (stores_[w].contains(s))
          met.duplicates_received++;
        else
          store(w, s);
      }
      return;
    }
    if (!stores_[w].frontier_empty()) {
      met.work_steps++;
      const GlobalState s = stores_[w].pop();
      for (const auto& j : next_states(m_, s)) {
        const std::uint32_t o = owner(j);
        if (o != w) {
          met.cross_transitions++;
          send(w, o, j, t);
        } else {
          store(w, j);
        }
      }
      return;
    }
    if (!outbox_empty(w)) {
      met.work_steps++;
      for (std::uint32_t v = 0; v < n_; ++v) flush(w, v, t);
      return;
    }
    met.idle_steps++;
  }

  void maybe_rebalance() {
    auto* tree = std::get_if<TreePartition>(&part_);
    if (!tree) return;
    std::vector<std::uint64_t> loads(tree->leaves(), 0);
    for (std::uint32_t w = 0; w < n_; ++w)
      for (const auto& s : stores_[w].sorted()) loads[tree->leaf_of(s)]++;
    for (const auto& mv : rebalance(*tree, loads, cfg_.rebalance_threshold)) {
      tree->assign(mv.leaf, mv.to);
      const std::uint32_t from = mv.from - 1, to = mv.to - 1;
      std::vector<GlobalState> unexplored;
      auto moved = stores_[from].extract_if(
          [&](const GlobalState& s) { return tree->leaf_of(s) == mv.leaf; }, unexplored);
      std::sort(moved.begin(), moved.end());
      std::sort(unexplored.begin(), unexplored.end());
      for (const auto& s : moved)
        if (!std::binary_search(unexplored.begin(), unexplored.end(), s))
          stores_[to].insert_explored(s);
      for (const auto& s : unexplored) stores_[to].insert(s);
      metrics_[from].messages_sent++;
      metrics_[from].items_sent += moved.size();
      metrics_[from].migrated_states += moved.size();
      metrics_[to].messages_received++;
      metrics_[to].items_received += moved.size();
      ++leaf_moves_;
    }
  }

  Model& m_;
  PartitionFn part_;
  ExplicitSimConfig cfg_;
  std::uint32_t n_;
  std::vector<ExplicitStore> stores_;
  std::vector<std::deque<StateMessage>> inbox_;
  std::vector<std::vector<std::vector<GlobalState>>> outbox_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, StateMessage> network_;
  std::uint64_t seq_ = 0;
  std::vector<WorkstationMetrics> metrics_;
  TokenDetector detector_;
  std::mt19937_64 rng_;
  std::size_t total_ = 0;
  std::uint64_t leaf_moves_ = 0;
};

}  // namespace

ExplicitSimResult run_explicit(Model& m, PartitionFn part, const ExplicitSimConfig& cfg) {
  return ExplicitCluster(m, std::move(part), cfg).run();
}

}  // namespace pnsat
