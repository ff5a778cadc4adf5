#include "pnsat/metrics.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace pnsat {

using Json = nlohmann::ordered_json;

WorkstationMetrics& WorkstationMetrics::operator+=(const WorkstationMetrics& o) {
  states += o.states;
  nodes += o.nodes;
  cache_entries += o.cache_entries;
  messages_sent += o.messages_sent;
  messages_received += o.messages_received;
  items_sent += o.items_sent;
  items_received += o.items_received;
  cross_transitions += o.cross_transitions;
  duplicates_received += o.duplicates_received;
  idle_steps += o.idle_steps;
  work_steps += o.work_steps;
  requests += o.requests;
  replies += o.replies;
  migrated_states += o.migrated_states;
  return *this;
}

WorkstationMetrics SimMetrics::totals() const {
  WorkstationMetrics t;
  for (const auto& w : per_workstation) t += w;
  return t;
}

namespace {

using Field = std::pair<const char*, std::uint64_t WorkstationMetrics::*>;

constexpr std::array<Field, 14> kFields{{
    {"states", &WorkstationMetrics::states},
    {"nodes", &WorkstationMetrics::nodes},
    {"cache_entries", &WorkstationMetrics::cache_entries},
    {"messages_sent", &WorkstationMetrics::messages_sent},
    {"messages_received", &WorkstationMetrics::messages_received},
    {"items_sent", &WorkstationMetrics::items_sent},
    {"items_received", &WorkstationMetrics::items_received},
    {"cross_transitions", &WorkstationMetrics::cross_transitions},
    {"duplicates_received", &WorkstationMetrics::duplicates_received},
    {"idle_steps", &WorkstationMetrics::idle_steps},
    {"work_steps", &WorkstationMetrics::work_steps},
    {"requests", &WorkstationMetrics::requests},
    {"replies", &WorkstationMetrics::replies},
    {"migrated_states", &WorkstationMetrics::migrated_states},
}};

Json workstation_json(const WorkstationMetrics& w) {
  Json j;
  for (const auto& [name, field] : kFields) j[name] = w.*field;
  return j;
}

}  // namespace

std::string to_json(const RunMetrics& m) {
  Json j;
  j["strategy"] = m.strategy;
  j["iterations"] = m.iterations;
  j["relprod_calls"] = m.relprod_calls;
  j["union_calls"] = m.union_calls;
  j["peak_nodes"] = m.peak_nodes;
  j["final_nodes"] = m.final_nodes;
  j["state_count"] = m.state_count.str();
  j["wall_time_ms"] = m.wall_time_ms;
  if (m.peak_image_nodes) j["peak_image_nodes"] = *m.peak_image_nodes;
  if (m.peak_frontier_nodes) j["peak_frontier_nodes"] = *m.peak_frontier_nodes;
  return j.dump(2) + "\n";
}

std::string to_json(const SimMetrics& m) {
  Json j;
  j["mode"] = m.mode;
  j["workstations"] = m.workstations;
  j["steps"] = m.steps;
  j["termination_rounds"] = m.termination_rounds;
  j["state_count"] = m.state_count.str();
  if (m.duplicated_nodes) j["duplicated_nodes"] = *m.duplicated_nodes;
  if (m.union_nodes) j["union_nodes"] = *m.union_nodes;
  if (m.leaf_moves) j["leaf_moves"] = *m.leaf_moves;
  j["totals"] = workstation_json(m.totals());
  Json per = Json::array();
  for (const auto& w : m.per_workstation) per.push_back(workstation_json(w));
  j["per_workstation"] = per;
  return j.dump(2) + "\n";
}

std::string to_table(const SimMetrics& m) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"ws"};
  for (const auto& f : kFields) head.emplace_back(f.first);
  rows.push_back(head);
  auto add = [&](const std::string& label, const WorkstationMetrics& w) {
    std::vector<std::string> row{label};
    for (const auto& f : kFields) row.push_back(std::to_string(w.*(f.second)));
    rows.push_back(row);
  };
  for (std::size_t i = 0; i < m.per_workstation.size(); ++i)
    add(std::to_string(i + 1), m.per_workstation[i]);
  add("total", m.totals());

  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << "  ";
      os << (c ? std::right : std::left) << std::setw(static_cast<int>(width[c])) << r[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace pnsat
