#include "pnsat/kronecker.hpp"

namespace pnsat {

EventSchedule::EventSchedule(const Model& m) : by_top(m.levels() + 1) {
  for (std::size_t e = 0; e < m.events().size(); ++e) by_top[m.events()[e].top].push_back(e);
}

KroneckerRelation::KroneckerRelation(const Model& m, Direction dir)
    : model_(&m),
      dir_(dir),
      schedule_(m),
      levels_(static_cast<std::uint32_t>(m.levels())),
      events_(static_cast<std::uint32_t>(m.events().size())) {}

RelRef KroneckerRelation::event_ref(std::size_t event, int level) const {
  if (level < model_->events()[event].bottom) return kRelIdentity;
  return 2 + static_cast<RelRef>(event) * levels_ + static_cast<RelRef>(level - 1);
}

RelRef KroneckerRelation::group_ref(int level) const {
  if (schedule_.bucket(level).empty()) return kRelEmpty;
  return 2 + events_ * levels_ + static_cast<RelRef>(level - 1);
}

std::optional<std::uint32_t> KroneckerRelation::local_step(std::size_t event, int level,
                                                           std::uint32_t from) const {
  const auto& ev = model_->events()[event];
  auto it = ev.locals.find(level);
  if (it == ev.locals.end()) return from;
  std::uint32_t need = dir_ == Direction::Forward ? it->second.take : it->second.put;
  std::uint32_t give = dir_ == Direction::Forward ? it->second.put : it->second.take;
  if (from < need) return std::nullopt;
  return from - need + give;
}

void KroneckerRelation::edges(int level, RelRef r, std::uint32_t from,
                              std::vector<RelEdge>& out) const {
  if (r < 2) return;
  const std::uint32_t idx = r - 2;
  if (idx >= events_ * levels_) {
    for (std::size_t e : schedule_.bucket(level))
      if (auto to = local_step(e, level, from)) out.push_back({*to, event_ref(e, level - 1)});
    return;
  }
  const std::size_t e = idx / levels_;
  if (auto to = local_step(e, level, from)) out.push_back({*to, event_ref(e, level - 1)});
}

long double KroneckerRelation::enabled_fraction(std::size_t event, int level,
                                                const Forest& f) const {
  long double frac = 1.0L;
  for (const auto& [l, fn] : model_->events()[event].locals) {
    if (l >= level) break;
    std::uint32_t need = dir_ == Direction::Forward ? fn.take : fn.put;
    std::uint32_t n = f.domain(l);
    frac *= n > need ? static_cast<long double>(n - need) / n : 0.0L;
  }
  return frac;
}

}  // namespace pnsat
