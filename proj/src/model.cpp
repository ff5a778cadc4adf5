#include "pnsat/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pnsat {

Model::Model(std::vector<std::string> places, std::vector<GlobalState> initial,
             std::vector<Event> events)
    : places_(std::move(places)), initial_(std::move(initial)), events_(std::move(events)) {
  if (places_.empty()) throw std::invalid_argument("model needs at least one place");
  if (initial_.empty()) throw std::invalid_argument("model needs an initial state");
  domains_.assign(places_.size(), 1);
  for (const auto& s : initial_) {
    if (s.size() != places_.size())
      throw std::invalid_argument("initial state length differs from place count");
    for (std::size_t i = 0; i < s.size(); ++i)
      domains_[i] = std::max(domains_[i], s[i] + 1);
  }
  for (auto& e : events_) {
    if (e.locals.empty()) throw std::invalid_argument("event " + e.name + " has no arcs");
    e.bottom = e.locals.begin()->first;
    e.top = e.locals.rbegin()->first;
    if (e.bottom < 1 || e.top > levels())
      throw std::invalid_argument("event " + e.name + " references a level out of range");
  }
}

int Model::level_of(std::string_view place) const {
  for (std::size_t i = 0; i < places_.size(); ++i)
    if (places_[i] == place) return levels() - static_cast<int>(i);
  return 0;
}

void Model::grow_domain(int level, std::uint32_t size) {
  auto& d = domains_[index_of(level)];
  d = std::max(d, size);
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

struct Parser {
  std::vector<std::string> places;
  std::unordered_map<std::string, std::size_t> place_index;
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> inits;
  bool saw_init = false;
  struct RawEvent {
    std::string name;
    std::map<std::size_t, LocalFn> arcs;  // place index -> fn
  };
  std::vector<RawEvent> events;
  std::set<std::string> event_names;

  std::pair<std::size_t, std::uint32_t> assignment(int line, const std::string& tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
      throw ParseError(line, "expected <place>=<nat>, got '" + tok + "'");
    std::string name = tok.substr(0, eq);
    std::string value = tok.substr(eq + 1);
    auto it = place_index.find(name);
    if (it == place_index.end()) throw ParseError(line, "undeclared place '" + name + "'");
    if (value[0] == '-') throw ParseError(line, "negative marking for place '" + name + "'");
    std::uint32_t n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ParseError(line, "invalid count '" + value + "'");
    return {it->second, n};
  }

  void place_line(int line, const std::vector<std::string>& toks) {
    if (toks.size() < 2) throw ParseError(line, "place needs at least one name");
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (!is_identifier(toks[i])) throw ParseError(line, "invalid place name '" + toks[i] + "'");
      if (place_index.count(toks[i])) throw ParseError(line, "duplicate place '" + toks[i] + "'");
      place_index.emplace(toks[i], places.size());
      places.push_back(toks[i]);
    }
  }

  void init_line(int line, const std::vector<std::string>& toks, bool extra) {
    if (!extra && saw_init) throw ParseError(line, "duplicate init line (use init+)");
    if (extra && !saw_init) throw ParseError(line, "init+ before init");
    if (toks.size() < 2) throw ParseError(line, "init needs at least one assignment");
    saw_init = true;
    std::vector<std::pair<std::size_t, std::uint32_t>> marking;
    std::set<std::size_t> seen;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      auto a = assignment(line, toks[i]);
      if (!seen.insert(a.first).second)
        throw ParseError(line, "place '" + places[a.first] + "' assigned twice");
      marking.push_back(a);
    }
    inits.push_back(std::move(marking));
  }

  void trans_line(int line, std::string_view rest) {
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError(line, "expected ':' after transition name");
    auto head = split_ws(rest.substr(0, colon));
    if (head.size() != 1 || !is_identifier(head[0]))
      throw ParseError(line, "invalid transition name");
    RawEvent ev{head[0], {}};
    if (!event_names.insert(ev.name).second)
      throw ParseError(line, "duplicate transition '" + ev.name + "'");
    auto toks = split_ws(rest.substr(colon + 1));
    std::size_t i = 0;
    if (i >= toks.size() || toks[i] != "take") throw ParseError(line, "expected 'take'");
    ++i;
    std::set<std::size_t> taken;
    for (; i < toks.size() && toks[i] != "put"; ++i) {
      auto [p, n] = assignment(line, toks[i]);
      if (!taken.insert(p).second) throw ParseError(line, "place '" + places[p] + "' taken twice");
      ev.arcs[p].take = n;
    }
    if (i >= toks.size()) throw ParseError(line, "expected 'put'");
    ++i;
    std::set<std::size_t> put;
    for (; i < toks.size(); ++i) {
      auto [p, n] = assignment(line, toks[i]);
      if (!put.insert(p).second) throw ParseError(line, "place '" + places[p] + "' put twice");
      ev.arcs[p].put = n;
    }
    if (ev.arcs.empty()) throw ParseError(line, "transition '" + ev.name + "' has no arcs");
    events.push_back(std::move(ev));
  }

  Model build() {
    if (places.empty()) throw ParseError(0, "no places declared");
    const int L = static_cast<int>(places.size());
    std::vector<GlobalState> initial;
    if (inits.empty()) initial.emplace_back(places.size(), 0);
    for (const auto& marking : inits) {
      GlobalState s(places.size(), 0);
      for (auto [p, n] : marking) s[p] = n;
      initial.push_back(std::move(s));
    }
    std::vector<Event> out;
    for (auto& raw : events) {
      Event e;
      e.name = raw.name;
      for (auto [p, fn] : raw.arcs) e.locals[L - static_cast<int>(p)] = fn;
      out.push_back(std::move(e));
    }
    return Model(places, std::move(initial), std::move(out));
  }
};

}  // namespace

Model parse_model(std::string_view text) {
  Parser parser;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "place") {
      parser.place_line(line_no, toks);
    } else if (kw == "init" || kw == "init+") {
      parser.init_line(line_no, toks, kw == "init+");
    } else if (kw == "trans") {
      auto at = line.find("trans");
      parser.trans_line(line_no, line.substr(at + 5));
    } else {
      throw ParseError(line_no, "unknown keyword '" + kw + "'");
    }
  }
  return parser.build();
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::vector<GlobalState> fire_event(Model& m, const Event& event, const GlobalState& s) {
  for (const auto& [level, fn] : event.locals)
    if (m.at(s, level) < fn.take) return {};
  GlobalState next = s;
  for (const auto& [level, fn] : event.locals) {
    auto& v = next[m.index_of(level)];
    v = v - fn.take + fn.put;
    m.grow_domain(level, v + 1);
  }
  return {std::move(next)};
}

std::vector<GlobalState> next_states(Model& m, const GlobalState& s) {
  std::vector<GlobalState> out;
  for (const auto& e : m.events())
    for (auto& t : fire_event(m, e, s)) out.push_back(std::move(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<GlobalState> fire_event_backward(const Model& m, const Event& event,
                                             const GlobalState& s) {
  for (const auto& [level, fn] : event.locals)
    if (m.at(s, level) < fn.put) return {};
  GlobalState prev = s;
  for (const auto& [level, fn] : event.locals) {
    auto& v = prev[m.index_of(level)];
    v = v - fn.put + fn.take;
  }
  return {std::move(prev)};
}

std::string format_state(const GlobalState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + ")";
}

}  // namespace pnsat
