#include <limits>

#include "pnsat/symbolic.hpp"

namespace pnsat {

StateSet ex(const Model& m, const StateSet& a, const StateSet& universe) {
  KroneckerRelation back(m, Direction::Backward);
  return intersect(image(back, a), universe);
}

StateSet eu(const Model& m, const StateSet& a, const StateSet& b, const StateSet& universe) {
  KroneckerRelation back(m, Direction::Backward);
  const StateSet within = intersect(a, universe);
  StateSet x = intersect(b, universe);
  for (;;) {
    StateSet next = unite(x, intersect(within, image(back, x)));
    if (next == x) return x;
    x = std::move(next);
  }
}

StateSet eg(const Model& m, const StateSet& a, const StateSet& universe) {
  KroneckerRelation back(m, Direction::Backward);
  StateSet x = intersect(a, universe);
  for (;;) {
    StateSet next = intersect(x, image(back, x));
    if (next == x) return x;
    x = std::move(next);
  }
}

StateSet predicate_set(Forest& f, int level, Comparison cmp, std::uint32_t value) {
  std::uint32_t lo = 0, hi = std::numeric_limits<std::uint32_t>::max();
  switch (cmp) {
    case Comparison::Equal:
      lo = hi = value;
      break;
    case Comparison::AtLeast:
      lo = value;
      break;
    case Comparison::AtMost:
      hi = value;
      break;
  }
  const int top = f.levels();
  return StateSet(f, f.restrict_range(top, f.full(top), level, lo, hi));
}

}  // namespace pnsat
