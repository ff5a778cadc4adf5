#include "pnsat/explicit.hpp"

#include <algorithm>
#include <sstream>

namespace pnsat {

std::size_t StateHash::operator()(const GlobalState& s) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint32_t v : s) {
    h ^= v;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 32));
}

bool ExplicitStore::insert(const GlobalState& s) {
  if (!visited_.insert(s).second) return false;
  frontier_.push_back(s);
  return true;
}

GlobalState ExplicitStore::pop() {
  GlobalState s = std::move(frontier_.front());
  frontier_.pop_front();
  return s;
}

std::vector<GlobalState> ExplicitStore::sorted() const {
  std::vector<GlobalState> out(visited_.begin(), visited_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string ExplicitStore::dump() const {
  std::ostringstream os;
  for (const auto& s : sorted()) {
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
    os << '\n';
  }
  return os.str();
}

ExplicitGeneration explicit_generate(Model& m, std::optional<std::size_t> cap) {
  ExplicitGeneration g;
  for (const auto& s : m.initial_states()) g.store.insert(s);
  while (!g.store.frontier_empty()) {
    GlobalState s = g.store.pop();
    ++g.expanded;
    for (const auto& t : next_states(m, s)) {
      ++g.transitions;
      if (g.store.insert(t) && cap && g.store.size() > *cap) throw StateCapExceeded(*cap);
    }
  }
  return g;
}

}  // namespace pnsat
