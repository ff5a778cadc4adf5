#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pnsat {

/// A global state in place-declaration order: position 0 holds x_L, the
/// last position holds x_1.
using GlobalState = std::vector<std::uint32_t>;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Per-level effect of an event: the level must hold at least `take`
/// tokens, which are replaced by `put` tokens.
struct LocalFn {
  std::uint32_t take = 0;
  std::uint32_t put = 0;

  bool operator==(const LocalFn&) const = default;
};

struct Event {
  std::string name;
  std::map<int, LocalFn> locals;  // level -> local function
  int top = 0;
  int bottom = 0;

  bool touches(int level) const { return locals.count(level) != 0; }
};

/// A place/transition net viewed as a structured discrete-state model.
/// Levels run L..1; the first declared place is level L.
class Model {
 public:
  Model() = default;
  Model(std::vector<std::string> places, std::vector<GlobalState> initial,
        std::vector<Event> events);

  int levels() const { return static_cast<int>(places_.size()); }
  const std::vector<std::string>& places() const { return places_; }
  const std::string& place_at(int level) const { return places_[index_of(level)]; }
  /// Level of a place, or 0 when the name is unknown.
  int level_of(std::string_view place) const;

  const std::vector<GlobalState>& initial_states() const { return initial_; }
  const std::vector<Event>& events() const { return events_; }

  std::uint32_t domain(int level) const { return domains_[index_of(level)]; }
  const std::vector<std::uint32_t>& domains() const { return domains_; }
  void grow_domain(int level, std::uint32_t size);

  std::uint32_t at(const GlobalState& s, int level) const { return s[index_of(level)]; }
  std::size_t index_of(int level) const { return static_cast<std::size_t>(levels() - level); }

 private:
  std::vector<std::string> places_;
  std::vector<GlobalState> initial_;
  std::vector<Event> events_;
  std::vector<std::uint32_t> domains_;
};

Model parse_model(std::string_view text);
Model load_model(const std::string& path);

/// Successor of `s` under `event`, or nothing when disabled. Grows the
/// model's domains to cover the new component values.
std::vector<GlobalState> fire_event(Model& m, const Event& event, const GlobalState& s);
std::vector<GlobalState> next_states(Model& m, const GlobalState& s);

/// Predecessors of `s` under `event` (take and put swapped).
std::vector<GlobalState> fire_event_backward(const Model& m, const Event& event,
                                             const GlobalState& s);

std::string format_state(const GlobalState& s);

}  // namespace pnsat
