#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnsat/distsim.hpp"
#include "pnsat/explicit.hpp"
#include "pnsat/metrics.hpp"
#include "pnsat/symbolic.hpp"

namespace pnsat::cli {

namespace {

struct Globals {
  std::string metrics_out;
  std::optional<std::size_t> node_cap;
  bool verify = false;
  bool timing = false;
};

/// Failure that maps to a specific exit code.
struct Exit {
  int code;
  std::string message;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Exit{kError, "cannot write '" + path + "'"};
  f << text;
}

void emit_metrics(const Globals& g, const std::string& json) {
  if (!g.metrics_out.empty()) write_file(g.metrics_out, json);
}

Model read_model(const std::string& path) {
  try {
    return load_model(path);
  } catch (const ParseError& e) {
    throw Exit{kError, path + ": " + e.what()};
  } catch (const std::exception& e) {
    throw Exit{kError, e.what()};
  }
}

GenerationOptions options(const Globals& g) {
  GenerationOptions o;
  o.node_cap = g.node_cap;
  o.measure_time = g.timing;
  return o;
}

Generation run_symbolic(const std::string& strategy, Model& m, Forest& f,
                        const GenerationOptions& o) {
  if (strategy == "bfs") return bfs_generate(m, f, o);
  if (strategy == "saturation") return saturate(m, f, o);
  return chained_saturate(m, f, o);
}

const std::vector<std::string> kSymbolic{"bfs", "saturation", "saturation-chained"};

std::string format_plain(const GlobalState& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out;
}

int cmd_generate(const Globals& g, const std::string& path, const std::string& strategy,
                 std::ostream& out) {
  Model m = read_model(path);
  if (strategy == "explicit") {
    const auto start = std::chrono::steady_clock::now();
    ExplicitGeneration eg = explicit_generate(m, g.node_cap);
    RunMetrics met;
    met.strategy = "explicit";
    met.iterations = eg.expanded;
    met.state_count = eg.store.size();
    if (g.timing)
      met.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    out << "states: " << met.state_count << "\n";
    emit_metrics(g, to_json(met));
    if (g.verify) {
      Model fresh = read_model(path);
      Forest f(fresh.levels());
      const BigInt other = saturate(fresh, f).metrics.state_count;
      if (other != met.state_count)
        throw Exit{kVerifyFailed, "verify: saturation found " + other.str() + " states"};
      out << "verify: ok\n";
    }
    return kOk;
  }

  Forest f(m.levels());
  Generation gen = run_symbolic(strategy, m, f, options(g));
  out << "states: " << gen.metrics.state_count << "\n";
  emit_metrics(g, to_json(gen.metrics));
  if (g.verify) {
    for (const auto& other : kSymbolic) {
      if (other == strategy) continue;
      Generation alt = run_symbolic(other, m, f, GenerationOptions{});
      if (!(alt.states == gen.states))
        throw Exit{kVerifyFailed, "verify: " + other + " built a different set"};
    }
    if (gen.metrics.state_count <= 10000) {
      Model fresh = read_model(path);
      const auto expl = explicit_generate(fresh).store.sorted();
      if (expl != gen.states.enumerate(10000))
        throw Exit{kVerifyFailed, "verify: explicit enumeration differs"};
    }
    out << "verify: ok\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- distsim

using Json = nlohmann::json;

Exit invalid(const std::string& what) { return Exit{kError, "invalid config: " + what}; }

int place_level(const Model& m, const Json& j) {
  if (j.is_number_integer()) {
    const int k = j.get<int>();
    if (k < 1 || k > m.levels()) throw invalid("level " + std::to_string(k) + " out of range");
    return k;
  }
  const std::string name = j.get<std::string>();
  const int k = m.level_of(name);
  if (k == 0) throw invalid("unknown place '" + name + "'");
  return k;
}

std::uint32_t count_field(const Json& cfg, const char* key, std::uint32_t fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto v = cfg.at(key).get<std::int64_t>();
  if (v < 0) throw invalid(std::string(key) + " must not be negative");
  return static_cast<std::uint32_t>(v);
}

PartitionFn explicit_partition(Model& m, const Json& cfg, std::uint32_t n) {
  const Json part = cfg.value("partition", Json::object());
  const std::string kind = part.value("kind", "hash");
  if (kind == "hash") {
    std::vector<int> levels;
    if (part.contains("places")) {
      for (const auto& p : part.at("places")) levels.push_back(place_level(m, p));
    } else {
      for (int k = m.levels(); k >= 1; --k) levels.push_back(k);
    }
    return HashPartition(m.levels(), levels, n);
  }
  if (kind == "tree") {
    std::optional<std::uint32_t> leaves;
    if (part.contains("leaves")) leaves = count_field(part, "leaves", 0);
    return TreePartition::from_warmup(m, n, leaves, count_field(part, "warmup", 1000));
  }
  if (kind == "constant") {
    const std::uint32_t owner = count_field(part, "owner", 1);
    if (owner < 1 || owner > n) throw invalid("owner out of range");
    return ConstantPartition{owner, n};
  }
  throw invalid("unknown partition kind '" + kind + "'");
}

std::vector<Window> read_windows(const Model& m, const Json& cfg, std::uint32_t n) {
  if (!cfg.contains("windows")) return top_level_windows(m.levels(), n);
  std::vector<Window> out;
  for (const auto& w : cfg.at("windows")) {
    Window win;
    for (const auto& c : w) {
      RangeConstraint rc;
      rc.level = place_level(m, c.at("place"));
      rc.lo = count_field(c, "lo", 0);
      rc.hi = c.contains("hi") ? count_field(c, "hi", 0) : UINT32_MAX;
      win.push_back(rc);
    }
    out.push_back(std::move(win));
  }
  return out;
}

std::vector<LevelRange> read_ranges(const Model& m, const Json& cfg, std::uint32_t n) {
  if (!cfg.contains("ranges")) return equal_ranges(m.levels(), n);
  std::vector<LevelRange> out;
  for (const auto& r : cfg.at("ranges"))
    out.push_back({r.at("top").get<int>(), r.at("bottom").get<int>()});
  return out;
}

void print_sim(std::ostream& out, const SimMetrics& met) {
  out << "mode: " << met.mode << "\n";
  out << "workstations: " << met.workstations << "\n";
  out << "states: " << met.state_count << "\n";
  out << to_table(met);
}

int cmd_distsim(const Globals& g, const std::string& config_path, std::ostream& out) {
  Json cfg;
  {
    std::ifstream in(config_path);
    if (!in) throw Exit{kError, "cannot read '" + config_path + "'"};
    try {
      cfg = Json::parse(in);
    } catch (const Json::exception& e) {
      throw invalid(e.what());
    }
  }

  try {
    if (!cfg.is_object()) throw invalid("expected a JSON object");
    if (!cfg.contains("model_path")) throw invalid("missing model_path");
    std::filesystem::path model_path = cfg.at("model_path").get<std::string>();
    if (model_path.is_relative())
      model_path = std::filesystem::path(config_path).parent_path() / model_path;
    const std::string mode = cfg.value("mode", "");
    Model m = read_model(model_path.string());
    const std::uint32_t n = count_field(cfg, "N", 0);
    if (n == 0 && !(mode == "vertical" && cfg.contains("windows")) &&
        !(mode == "horizontal" && cfg.contains("ranges")))
      throw invalid("N must be positive");
    const Json caps = cfg.value("caps", Json::object());
    std::optional<std::size_t> state_cap, node_cap = g.node_cap;
    if (caps.contains("states")) state_cap = count_field(caps, "states", 0);
    if (caps.contains("nodes")) node_cap = count_field(caps, "nodes", 0);

    if (mode == "explicit") {
      ExplicitSimConfig sc;
      sc.buffer = count_field(cfg, "B", 64);
      sc.state_cap = state_cap;
      sc.max_delay = count_field(cfg, "max_delay", 0);
      sc.seed = count_field(cfg, "seed", 0);
      const Json part = cfg.value("partition", Json::object());
      sc.rebalance_every = count_field(part, "rebalance_every", 0);
      sc.rebalance_threshold = part.value("threshold", 2.0);
      ExplicitSimResult r = run_explicit(m, explicit_partition(m, cfg, n), sc);
      print_sim(out, r.metrics);
      emit_metrics(g, to_json(r.metrics));
      if (g.verify) {
        Model fresh = read_model(model_path.string());
        if (explicit_generate(fresh, state_cap).store.sorted() != r.all_states())
          throw Exit{kVerifyFailed, "verify: distributed states differ from sequential ones"};
        if (!r.outcome.ownership_sound) throw Exit{kVerifyFailed, "verify: misplaced state"};
        if (!r.outcome.inboxes_empty) throw Exit{kVerifyFailed, "verify: undelivered messages"};
        out << "verify: ok\n";
      }
      return kOk;
    }

    if (mode == "vertical") {
      VerticalSimConfig vc;
      vc.node_cap = node_cap;
      vc.max_delay = count_field(cfg, "max_delay", 0);
      vc.seed = count_field(cfg, "seed", 0);
      Forest f(m.levels());
      VerticalSimResult r = run_vertical_bfs(m, f, read_windows(m, cfg, n), vc);
      print_sim(out, r.metrics);
      out << "duplicated nodes: " << *r.metrics.duplicated_nodes << "\n";
      emit_metrics(g, to_json(r.metrics));
      if (g.verify) {
        Generation seq = bfs_generate(m, f);
        if (!(seq.states == r.all))
          throw Exit{kVerifyFailed, "verify: distributed states differ from sequential ones"};
        if (!r.outcome.ownership_sound) throw Exit{kVerifyFailed, "verify: misplaced state"};
        if (!r.outcome.inboxes_empty) throw Exit{kVerifyFailed, "verify: undelivered messages"};
        out << "verify: ok\n";
      }
      return kOk;
    }

    if (mode == "horizontal") {
      HorizontalSimConfig hc;
      hc.node_cap = node_cap;
      hc.chained = cfg.value("chained", false);
      Forest f(m.levels());
      HorizontalSimResult r = run_horizontal_saturation(m, f, read_ranges(m, cfg, n), hc);
      print_sim(out, r.metrics);
      out << "resident nodes: " << r.resident_nodes << "\n";
      emit_metrics(g, to_json(r.metrics));
      if (g.verify) {
        Model fresh = read_model(model_path.string());
        Forest f2(fresh.levels());
        Generation seq = hc.chained ? chained_saturate(fresh, f2) : saturate(fresh, f2);
        out << "node sum: " << r.resident_nodes << " = sequential " << seq.metrics.final_nodes
            << "\n";
        if (seq.metrics.final_nodes != r.resident_nodes)
          throw Exit{kVerifyFailed, "verify: resident nodes differ from sequential count"};
        if (seq.metrics.state_count != r.metrics.state_count)
          throw Exit{kVerifyFailed, "verify: state counts differ"};
        if (!(saturate(m, f).states == r.states))
          throw Exit{kVerifyFailed, "verify: distributed states differ from sequential ones"};
        out << "verify: ok\n";
      }
      return kOk;
    }
    throw invalid("unknown mode '" + mode + "'");
  } catch (const InvalidPartition& e) {
    throw invalid(e.what());
  } catch (const Json::exception& e) {
    throw invalid(e.what());
  }
}

// -------------------------------------------------------------------- ctl

StateSet predicate(const Model& m, Forest& f, const StateSet& universe, const std::string& text) {
  if (text == "true") return universe;
  if (text == "false") return empty_set(f);
  static const std::regex re(R"(^\s*([A-Za-z_][A-Za-z0-9_.]*)\s*(>=|<=|=)\s*([0-9]+)\s*$)");
  std::smatch mt;
  if (!std::regex_match(text, mt, re)) throw Exit{kError, "cannot parse predicate '" + text + "'"};
  const int level = m.level_of(mt[1].str());
  if (level == 0) throw Exit{kError, "unknown place '" + mt[1].str() + "'"};
  const Comparison cmp = mt[2] == ">=" ? Comparison::AtLeast
                         : mt[2] == "<=" ? Comparison::AtMost
                                         : Comparison::Equal;
  const auto value = std::stoul(mt[3].str());
  return intersect(predicate_set(f, level, cmp, static_cast<std::uint32_t>(value)), universe);
}

int cmd_ctl(const Globals& g, const std::string& path, const std::vector<std::string>& query,
            std::size_t list, std::ostream& out) {
  Model m = read_model(path);
  std::string op = query.empty() ? "" : query[0];
  std::transform(op.begin(), op.end(), op.begin(), ::toupper);
  const std::size_t arity = op == "EU" ? 2 : 1;
  if ((op != "EX" && op != "EU" && op != "EG") || query.size() != arity + 1)
    throw Exit{kError, "query must be 'EX p', 'EU p q' or 'EG p'"};

  Forest f(m.levels());
  Generation gen = saturate(m, f, options(g));
  const StateSet& universe = gen.states;
  StateSet a = predicate(m, f, universe, query[1]);
  StateSet result;
  if (op == "EX") {
    result = ex(m, a, universe);
  } else if (op == "EU") {
    result = eu(m, a, predicate(m, f, universe, query[2]), universe);
  } else {
    result = eg(m, a, universe);
  }
  out << "states: " << result.count() << "\n";
  if (list > 0) {
    if (result.count() > list)
      out << "(more than " << list << " states, not listed)\n";
    else
      for (const auto& s : result.enumerate(list)) out << format_state(s) << "\n";
  }
  emit_metrics(g, to_json(gen.metrics));
  return kOk;
}

// ------------------------------------------------------------------- dump

int cmd_dump(const Globals& g, const std::string& path, const std::string& strategy, bool states,
             std::ostream& out) {
  Model m = read_model(path);
  if (strategy == "explicit") {
    if (!states) throw Exit{kError, "the explicit strategy can only dump --states"};
    out << explicit_generate(m, g.node_cap).store.dump();
    return kOk;
  }
  Forest f(m.levels());
  Generation gen = run_symbolic(strategy, m, f, options(g));
  emit_metrics(g, to_json(gen.metrics));
  if (states) {
    const auto all = gen.states.enumerate(static_cast<std::size_t>(-1));
    for (const auto& s : all) out << format_plain(s) << "\n";
    return kOk;
  }
  const NodeRef root = gen.states.ref();
  out << f.dump({&root, 1});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability analysis of place/transition nets with decision diagrams", "pnsat"};
  Globals g;
  std::size_t cap = 0;
  app.add_option("--metrics-out", g.metrics_out, "Write run metrics as JSON to this path");
  auto* cap_opt = app.add_option("--node-cap", cap, "Abort when more nodes (or states) are live");
  app.add_flag("--verify", g.verify, "Cross-check results against an independent strategy");
  app.add_flag("--timing", g.timing, "Record wall-clock time in the metrics");
  app.require_subcommand(1);

  const std::vector<std::string> strategies{"explicit", "bfs", "saturation", "saturation-chained"};

  std::string model, strategy = "saturation";
  auto* gen = app.add_subcommand("generate", "Build the reachable state space");
  gen->fallthrough();
  gen->add_option("model", model, "Model file")->required();
  gen->add_option("-s,--strategy", strategy, "explicit, bfs, saturation or saturation-chained")
      ->check(CLI::IsMember(strategies));

  std::string config;
  auto* dist = app.add_subcommand("distsim", "Simulate distributed generation");
  dist->fallthrough();
  dist->add_option("config", config, "Scenario file (JSON)")->required();

  std::vector<std::string> query;
  std::size_t list = 0;
  auto* ctl = app.add_subcommand("ctl", "Count reachable states satisfying EX, EU or EG");
  ctl->fallthrough();
  ctl->add_option("model", model, "Model file")->required();
  ctl->add_option("query", query, "EX p | EU p q | EG p, with p like P1>=1, true or false")
      ->required();
  ctl->add_option("--list", list, "Also print the states when there are at most this many");

  bool dump_states = false;
  auto* dump = app.add_subcommand("dump", "Print the decision diagram of the reachable states");
  dump->fallthrough();
  dump->add_option("model", model, "Model file")->required();
  dump->add_option("-s,--strategy", strategy, "Strategy building the set")
      ->check(CLI::IsMember(strategies));
  dump->add_flag("--states", dump_states, "Print the sorted state list instead");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }
  if (*cap_opt) g.node_cap = cap;

  try {
    if (*gen) return cmd_generate(g, model, strategy, out);
    if (*dist) return cmd_distsim(g, config, out);
    if (*ctl) return cmd_ctl(g, model, query, list, out);
    return cmd_dump(g, model, strategy, dump_states, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const NodeCapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const StateCapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace pnsat::cli
