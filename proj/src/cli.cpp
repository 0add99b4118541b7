#include "rhtl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "rhtl/buchi.hpp"
#include "rhtl/errors.hpp"
#include "rhtl/formula.hpp"
#include "rhtl/harness.hpp"

namespace rhtl {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << contents;
}

std::string number(double x) {
  if (!(x < kInfinity)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

json energy_json(double v) { return v < kInfinity ? json(v) : json("inf"); }

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

enum class Kind { kInt, kDouble, kString, kPath, kList, kFlag, kNegFlag };

struct Setting {
  std::string key;
  Kind kind;
  CLI::Option* opt = nullptr;
  std::string text;
  std::vector<std::string> list;
  bool flag = false;
};

/// A subcommand whose effective settings come from built-in defaults, then an
/// optional JSON config file, then explicit flags.
class Command {
 public:
  using Handler = std::function<int(const json&, std::ostream&, std::ostream&)>;

  Command(CLI::App& parent, const std::string& name, const std::string& help, json defaults,
          Handler handler, std::set<std::string>& known_keys)
      : app_(parent.add_subcommand(name, help)), defaults_(std::move(defaults)),
        handler_(std::move(handler)), known_keys_(known_keys) {
    app_->add_option("--config", config_path_, "JSON config file; flags override its values");
    app_->add_flag("--print-config", print_config_, "Print the effective config and exit");
    const char* env = std::getenv(kOutDirVariable);
    defaults_["out_dir"] = env && *env ? env : ".";
    add("--out-dir", "out_dir", Kind::kPath,
        std::string("Output directory (default from ") + kOutDirVariable + " or .)");
  }

  Command& add(const std::string& flag, const std::string& key, Kind kind, const std::string& help) {
    Setting& s = settings_.emplace_back();
    s.key = key;
    s.kind = kind;
    known_keys_.insert(key);
    switch (kind) {
      case Kind::kList: s.opt = app_->add_option(flag, s.list, help); break;
      case Kind::kFlag:
      case Kind::kNegFlag: s.opt = app_->add_flag(flag, s.flag, help); break;
      default: s.opt = app_->add_option(flag, s.text, help); break;
    }
    return *this;
  }

  bool parsed() const { return app_->parsed(); }

  int execute(std::ostream& out, std::ostream& err) const {
    const json eff = effective();
    if (print_config_) {
      out << eff.dump(2) << '\n';
      return kExitOk;
    }
    return handler_(eff, out, err);
  }

 private:
  const Setting* find(const std::string& key) const {
    for (const auto& s : settings_) {
      if (s.key == key) return &s;
    }
    return nullptr;
  }

  static json from_text(const Setting& s) {
    std::size_t used = 0;
    try {
      switch (s.kind) {
        case Kind::kInt: {
          const long long v = std::stoll(s.text, &used);
          if (used == s.text.size()) return v;
          break;
        }
        case Kind::kDouble: {
          const double v = std::stod(s.text, &used);
          if (used == s.text.size()) return v;
          break;
        }
        case Kind::kList: return s.list;
        case Kind::kFlag: return true;
        case Kind::kNegFlag: return false;
        default: return s.text;
      }
    } catch (const std::exception&) {
    }
    throw InputError("bad value '" + s.text + "' for " + s.key);
  }

  static bool type_matches(Kind kind, const json& v) {
    switch (kind) {
      case Kind::kInt: return v.is_number_integer();
      case Kind::kDouble: return v.is_number();
      case Kind::kString:
      case Kind::kPath: return v.is_string();
      case Kind::kList:
        return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); });
      case Kind::kFlag:
      case Kind::kNegFlag: return v.is_boolean();
    }
    return false;
  }

  json effective() const {
    json eff = defaults_;
    if (!config_path_.empty()) {
      json cfg;
      try {
        cfg = json::parse(read_file(config_path_));
      } catch (const json::exception& e) {
        throw InputError("malformed config '" + config_path_ + "': " + e.what());
      }
      if (!cfg.is_object()) throw InputError("config '" + config_path_ + "' must be a JSON object");
      const fs::path base = fs::path(config_path_).parent_path();
      for (const auto& [key, value] : cfg.items()) {
        const Setting* s = find(key);
        if (!s) {
          // Keys of other subcommands are ignored so one file can drive them all.
          if (known_keys_.contains(key)) continue;
          throw InputError("unknown config key '" + key + "'");
        }
        if (!type_matches(s->kind, value)) throw InputError("config key '" + key + "' has the wrong type");
        json v = value;
        if (s->kind == Kind::kPath && fs::path(v.get<std::string>()).is_relative()) {
          v = (base / v.get<std::string>()).lexically_normal().string();
        }
        eff[key] = v;
      }
    }
    for (const auto& s : settings_) {
      if (s.opt->count() > 0) eff[s.key] = from_text(s);
    }
    return eff;
  }

  CLI::App* app_;
  json defaults_;
  Handler handler_;
  std::string config_path_;
  bool print_config_ = false;
  std::deque<Setting> settings_;
  std::set<std::string>& known_keys_;
};

template <typename T>
T get(const json& eff, const std::string& key) {
  try {
    return eff.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("missing or invalid setting '" + key + "'");
  }
}

std::string require_path(const json& eff, const std::string& key) {
  if (!eff.contains(key)) throw InputError("--" + key + " is required");
  return get<std::string>(eff, key);
}

fs::path output_path(const json& eff, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  return fs::path(get<std::string>(eff, "out_dir")) / p;
}

Formula formula_from(const json& eff, const std::set<std::string>& pi) {
  const bool file = eff.contains("formula");
  const bool text = eff.contains("ltl");
  if (file == text) throw InputError("give exactly one of --formula and --ltl");
  if (file) return parse_ltl_file_contents(read_file(get<std::string>(eff, "formula")), pi);
  return parse_ltl(get<std::string>(eff, "ltl"), pi);
}

Model load_model(const json& eff) {
  TransitionSystem ts = system_from_json(read_file(require_path(eff, "system")));
  ProductOptions options;
  options.reachable_only = eff.value("reachable_only", false);
  const int given = eff.contains("formula") + eff.contains("ltl") + eff.contains("automaton");
  if (given != 1) throw InputError("give exactly one of --formula, --ltl and --automaton");
  if (eff.contains("automaton")) {
    auto b = buchi_from_json(read_file(get<std::string>(eff, "automaton")));
    return Model::build(std::move(ts), std::move(b), options);
  }
  const std::set<std::string> pi(ts.ap.begin(), ts.ap.end());
  const Formula f = formula_from(eff, pi);
  return Model::build(std::move(ts), f, options);
}

MonitorConfig monitor_config(const json& eff) {
  MonitorConfig mc;
  if (eff.contains("forbid")) mc.forbidden = get<std::vector<std::string>>(eff, "forbid");
  if (eff.contains("sequence")) {
    for (const auto& pair : get<std::vector<std::string>>(eff, "sequence")) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == pair.size()) {
        throw InputError("bad sequence '" + pair + "' (expected trigger:target)");
      }
      mc.sequences.emplace_back(pair.substr(0, colon), pair.substr(colon + 1));
    }
  }
  if (eff.contains("bound")) {
    const auto b = get<long long>(eff, "bound");
    if (b < 0) throw InputError("recurrence bound must be nonnegative");
    mc.recurrence_bound = static_cast<std::size_t>(b);
  }
  return mc;
}

RunOptions run_options(const json& eff) {
  RunOptions o;
  const auto horizon = get<long long>(eff, "horizon");
  const auto steps = get<long long>(eff, "steps");
  if (horizon < 1) throw InputError("horizon must be at least 1");
  if (steps < 1) throw InputError("steps must be at least 1");
  o.horizon = static_cast<std::size_t>(horizon);
  o.steps = static_cast<int>(steps);
  o.neighborhood = Neighborhood::parse(get<std::string>(eff, "neighborhood"));
  o.consume_rewards = get<bool>(eff, "consume");
  const auto solver = get<std::string>(eff, "solver");
  if (solver == "dp") {
    o.solver = Solver::kDynamicProgramming;
  } else if (solver == "dfs") {
    o.solver = Solver::kExhaustive;
  } else {
    throw InputError("solver must be dp or dfs");
  }
  if (eff.contains("controller")) {
    const auto c = get<std::string>(eff, "controller");
    if (c == "rh") {
      o.controller = ControllerKind::kRecedingHorizon;
    } else if (c == "baseline") {
      o.controller = ControllerKind::kBaseline;
    } else {
      throw InputError("controller must be rh or baseline");
    }
  }
  return o;
}

RewardFactory reward_factory(const json& eff, const TransitionSystem& ts) {
  if (eff.contains("rewards")) {
    auto events = reward_events_from_csv(read_file(get<std::string>(eff, "rewards")), ts);
    const std::size_t n = ts.num_states();
    return [events, n](std::uint64_t) -> std::unique_ptr<RewardProcess> {
      return std::make_unique<ScriptedRewards>(n, events);
    };
  }
  CaseStudyConfig base;
  base.decay = get<double>(eff, "decay");
  base.respawn_probability = get<double>(eff, "respawn");
  base.low = get<double>(eff, "low");
  base.high = get<double>(eff, "high");
  CaseStudyRewards probe(ts.num_states(), base);  // validates the parameters
  const std::size_t n = ts.num_states();
  return [base, n](std::uint64_t seed) -> std::unique_ptr<RewardProcess> {
    CaseStudyConfig c = base;
    c.seed = seed;
    return std::make_unique<CaseStudyRewards>(n, c);
  };
}

void add_model_options(Command& c) {
  c.add("--system", "system", Kind::kPath, "Transition system (dts-v1 JSON)")
      .add("--formula", "formula", Kind::kPath, "LTL formula file")
      .add("--ltl", "ltl", Kind::kString, "LTL formula text")
      .add("--automaton", "automaton", Kind::kPath, "Buchi automaton (buchi-v1 JSON)")
      .add("--reachable-only", "reachable_only", Kind::kFlag,
           "Keep only product states reachable from the initial set");
}

void add_run_options(Command& c) {
  add_model_options(c);
  c.add("--horizon,-N", "horizon", Kind::kInt, "Horizon length")
      .add("--steps", "steps", Kind::kInt, "Number of closed-loop transitions")
      .add("--neighborhood", "neighborhood", Kind::kString, "all, metric:<r> or hops:<n>")
      .add("--decay", "decay", Kind::kDouble, "Reward decay factor per tick")
      .add("--respawn", "respawn", Kind::kDouble, "Reward respawn probability per state per tick")
      .add("--low", "low", Kind::kDouble, "Lower end of the spawned reward range")
      .add("--high", "high", Kind::kDouble, "Upper end of the spawned reward range")
      .add("--rewards", "rewards", Kind::kPath, "Scripted reward CSV (k,state,value)")
      .add("--solver", "solver", Kind::kString, "dp or dfs")
      .add("--no-consume", "consume", Kind::kNegFlag, "Leave collected rewards in place")
      .add("--forbid", "forbid", Kind::kList, "Propositions checked by the safety monitor")
      .add("--sequence", "sequence", Kind::kList, "trigger:target pairs for the sequencing monitor");
}

json run_defaults() {
  return {{"horizon", 4},    {"steps", 100},   {"neighborhood", "metric:25"}, {"decay", 0.9},
          {"respawn", 0.05}, {"low", 10.0},    {"high", 25.0},                {"solver", "dp"},
          {"consume", true}, {"reachable_only", false}};
}

json monitors_json(const MonitorReport& report) {
  json out = json::array();
  for (const auto& r : report.results) {
    out.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"first_violation", r.first_violation ? json(*r.first_violation) : json(nullptr)},
                   {"detail", r.detail}});
  }
  return out;
}

void print_monitors(const MonitorReport& report, std::ostream& out) {
  for (const auto& r : report.results) {
    out << "monitor " << r.name << ": " << (r.passed ? "pass" : "FAIL");
    if (!r.passed) out << " at " << *r.first_violation << " (" << r.detail << ")";
    out << '\n';
  }
}

const char* kUnsatisfiable = "unsatisfiable specification: no run from the initial state satisfies the formula\n";

int cmd_translate(const json& eff, std::ostream& out, std::ostream&) {
  std::vector<std::string> ap;
  if (eff.contains("ap")) ap = get<std::vector<std::string>>(eff, "ap");
  const Formula f = formula_from(eff, std::set<std::string>(ap.begin(), ap.end()));
  const BuchiAutomaton b = translate(f, ap);
  const auto path = output_path(eff, get<std::string>(eff, "out"));
  write_file(path, buchi_to_json(b));
  out << "wrote " << path.string() << ": " << b.num_states() << " states, " << b.transitions.size()
      << " transitions\n";
  return kExitOk;
}

int cmd_gen_grid(const json& eff, std::ostream& out, std::ostream&) {
  GridSpec spec;
  if (eff.contains("labels")) spec = grid_labels_from_json(read_file(get<std::string>(eff, "labels")));
  if (eff.contains("rows")) spec.rows = static_cast<int>(get<long long>(eff, "rows"));
  if (eff.contains("cols")) spec.cols = static_cast<int>(get<long long>(eff, "cols"));
  if (eff.contains("cell")) spec.cell = get<double>(eff, "cell");
  if (eff.contains("cutoff")) spec.edge_cutoff = get<double>(eff, "cutoff");
  if (eff.contains("initial")) spec.initial = get<std::string>(eff, "initial");
  const TransitionSystem ts = grid_dts(spec);
  const auto path = output_path(eff, get<std::string>(eff, "out"));
  write_file(path, system_to_json(ts));
  out << "wrote " << path.string() << ": " << ts.num_states() << " states, " << ts.num_transitions()
      << " transitions\n";
  return kExitOk;
}

int cmd_product(const json& eff, std::ostream& out, std::ostream&) {
  const Model m = load_model(eff);
  std::size_t accepting = 0;
  for (char a : m.product.accepting) accepting += a ? 1 : 0;
  std::size_t fstar = 0;
  for (char a : m.energy.fstar) fstar += a ? 1 : 0;
  out << "system states: " << m.system.num_states() << '\n'
      << "automaton states: " << m.automaton.num_states() << '\n'
      << "product states: " << m.product.num_states() << '\n'
      << "product transitions: " << m.product.num_transitions() << '\n'
      << "initial: " << m.product.initial.size() << '\n'
      << "accepting: " << accepting << '\n'
      << "self-reachable accepting: " << fstar << '\n'
      << "satisfiable: " << (m.satisfiable() ? "yes" : "no") << '\n';
  if (eff.contains("dot")) {
    const auto path = output_path(eff, get<std::string>(eff, "dot"));
    write_file(path, product_to_dot(m.product, &m.energy));
    out << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_energy(const json& eff, std::ostream& out, std::ostream&) {
  const Model m = load_model(eff);
  const auto path = output_path(eff, get<std::string>(eff, "out"));
  write_file(path, energy_to_csv(m.product, m.energy));
  out << "wrote " << path.string() << ": " << m.product.num_states() << " states, "
      << m.energy.distinct_finite_values() << " distinct finite energies\n";
  if (eff.contains("dot")) {
    const auto dot = output_path(eff, get<std::string>(eff, "dot"));
    write_file(dot, product_to_dot(m.product, &m.energy));
    out << "wrote " << dot.string() << '\n';
  }
  return kExitOk;
}

int cmd_run(const json& eff, std::ostream& out, std::ostream& err) {
  const Model m = load_model(eff);
  const RunOptions options = run_options(eff);
  const auto seed = static_cast<std::uint64_t>(get<long long>(eff, "seed"));
  auto rp = reward_factory(eff, m.system)(seed);
  const RunResult result = run(m, *rp, options);
  const std::string name = get<std::string>(eff, "name");

  json sidecar;
  sidecar["config"] = eff;
  sidecar["seed"] = seed;
  sidecar["horizon"] = options.horizon;
  sidecar["distinct_energies"] = result.trace.distinct_energies;
  if (result.verdict == Verdict::kUnsatisfiable) {
    sidecar["verdict"] = "unsatisfiable";
    write_file(output_path(eff, name + ".json"), sidecar.dump(2) + "\n");
    err << kUnsatisfiable;
    return kExitUnsatisfiable;
  }
  const Trace& trace = result.trace;
  const MonitorReport report = check_monitors(trace, m, monitor_config(eff));
  std::optional<std::size_t> first_zero;
  const auto energies = trace.energies();
  for (std::size_t i = 0; i < energies.size() && !first_zero; ++i) {
    if (energies[i] == 0.0) first_zero = i;
  }
  sidecar["verdict"] = "completed";
  sidecar["steps"] = trace.steps.size();
  sidecar["cumulative_reward"] = trace.cumulative_reward();
  sidecar["reward_stream_digest"] = hex(trace.reward_stream_digest);
  sidecar["first_zero_energy"] = first_zero ? json(*first_zero) : json(nullptr);
  sidecar["final"] = {{"q", m.product.system_ids[m.product.system_state(trace.final_state)]},
                      {"s", m.product.buchi_ids[m.product.buchi_state(trace.final_state)]},
                      {"v", energy_json(trace.final_v)}};
  sidecar["monitors"] = monitors_json(report);

  const auto csv = output_path(eff, name + ".csv");
  write_file(csv, trace_to_csv(trace, m));
  write_file(output_path(eff, name + ".json"), sidecar.dump(2) + "\n");
  out << "wrote " << csv.string() << '\n';

  if (eff.contains("snapshots")) {
    const auto range = get<std::string>(eff, "snapshots");
    const auto colon = range.find(':');
    std::size_t from = 0;
    std::size_t to = 0;
    try {
      from = std::stoul(range.substr(0, colon));
      to = colon == std::string::npos ? from : std::stoul(range.substr(colon + 1));
    } catch (const std::exception&) {
      throw InputError("bad snapshot range '" + range + "' (expected from:to)");
    }
    if (from > to || to >= trace.steps.size()) throw InputError("snapshot range outside the trace");
    for (std::size_t k = from; k <= to; ++k) {
      write_file(output_path(eff, name + "_step" + std::to_string(k) + ".dot"),
                 snapshot_to_dot(trace, m, k));
    }
  }

  out << "cumulative reward: " << number(trace.cumulative_reward()) << '\n'
      << "first zero energy: " << (first_zero ? std::to_string(*first_zero) : "none") << '\n'
      << "recurrence bound (D + N): " << trace.distinct_energies + trace.horizon << '\n';
  print_monitors(report, out);
  return kExitOk;
}

int cmd_compare(const json& eff, std::ostream& out, std::ostream& err) {
  const Model m = load_model(eff);
  if (!m.satisfiable()) {
    err << kUnsatisfiable;
    return kExitUnsatisfiable;
  }
  RunOptions options = run_options(eff);
  const auto count = get<long long>(eff, "seeds");
  const auto first = get<long long>(eff, "first_seed");
  if (count < 1) throw InputError("need at least one seed");
  std::vector<std::uint64_t> seeds;
  for (long long i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(first + i));
  const ComparisonReport report = compare(m, reward_factory(eff, m.system), options, seeds);

  std::ostringstream csv;
  csv << "seed,rh_reward,baseline_reward,streams_match\n";
  json detail = json::array();
  for (const auto& s : report.seeds) {
    const bool match = s.rh_stream == s.baseline_stream;
    csv << s.seed << ',' << number(s.rh_reward) << ',' << number(s.baseline_reward) << ','
        << (match ? "yes" : "no") << '\n';
    json rh_v = json::array();
    json bl_v = json::array();
    for (double v : s.rh_energy) rh_v.push_back(energy_json(v));
    for (double v : s.baseline_energy) bl_v.push_back(energy_json(v));
    detail.push_back({{"seed", s.seed},
                      {"rh_reward", s.rh_reward},
                      {"baseline_reward", s.baseline_reward},
                      {"reward_stream_digest", hex(s.rh_stream)},
                      {"streams_match", match},
                      {"rh_energy", rh_v},
                      {"baseline_energy", bl_v},
                      {"rh_cumulative", s.rh_cumulative},
                      {"baseline_cumulative", s.baseline_cumulative}});
  }
  json summary{{"config", eff},
               {"mean_rh_reward", report.mean_rh},
               {"mean_baseline_reward", report.mean_baseline},
               {"seeds", detail}};
  const auto csv_path = output_path(eff, "compare.csv");
  write_file(csv_path, csv.str());
  write_file(output_path(eff, "compare.json"), summary.dump(2) + "\n");
  out << csv.str() << "mean rh reward: " << number(report.mean_rh) << '\n'
      << "mean baseline reward: " << number(report.mean_baseline) << '\n'
      << "wrote " << csv_path.string() << '\n';
  return kExitOk;
}

int cmd_monitors(const json& eff, std::ostream& out, std::ostream&) {
  const auto trace_path = require_path(eff, "trace");
  const TransitionSystem ts = system_from_json(read_file(require_path(eff, "system")));
  const std::string sidecar_path =
      eff.contains("sidecar") ? get<std::string>(eff, "sidecar")
                              : fs::path(trace_path).replace_extension(".json").string();

  std::vector<Observation> obs;
  std::vector<double> energies;
  const auto add = [&](const std::string& q, const std::string& v) {
    const auto idx = ts.find(q);
    if (!idx) throw InputError("trace refers to unknown state '" + q + "'");
    obs.push_back(ts.obs[*idx]);
    try {
      energies.push_back(v == "inf" ? kInfinity : std::stod(v));
    } catch (const std::exception&) {
      throw InputError("bad energy value '" + v + "' in trace");
    }
  };
  std::istringstream in(read_file(trace_path));
  std::string line;
  if (!std::getline(in, line) || line != "k,q,s,case,v,reward_collected,cum_reward") {
    throw InputError("'" + trace_path + "' is not a trace file");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 7) throw InputError("malformed trace row '" + line + "'");
    add(f[1], f[4]);
  }

  json sidecar;
  if (fs::exists(sidecar_path)) {
    try {
      sidecar = json::parse(read_file(sidecar_path));
      if (!obs.empty() && sidecar.contains("final")) {
        const auto& fin = sidecar.at("final");
        const auto& v = fin.at("v");
        add(fin.at("q").get<std::string>(), v.is_string() ? v.get<std::string>() : number(v.get<double>()));
      }
    } catch (const json::exception& e) {
      throw InputError("malformed sidecar '" + sidecar_path + "': " + e.what());
    }
  }

  MonitorConfig mc = monitor_config(eff);
  if (!mc.recurrence_bound) {
    if (!sidecar.contains("distinct_energies") || !sidecar.contains("horizon")) {
      throw InputError("recurrence bound needs --bound or a sidecar with D and N");
    }
    mc.recurrence_bound =
        sidecar["distinct_energies"].get<std::size_t>() + sidecar["horizon"].get<std::size_t>();
  }
  MonitorReport report;
  report.results.push_back(safety_monitor(obs, mc.forbidden));
  report.results.push_back(sequencing_monitor(obs, mc.sequences));
  report.results.push_back(recurrence_monitor(energies, *mc.recurrence_bound));
  out << "positions: " << obs.size() << '\n';
  print_monitors(report, out);
  if (eff.contains("out")) {
    write_file(output_path(eff, get<std::string>(eff, "out")),
               json{{"monitors", monitors_json(report)}}.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Receding horizon control under temporal logic constraints", "rhtl"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  std::set<std::string> known_keys;
  const auto command = [&](const std::string& name, const std::string& help, json defaults,
                           Command::Handler h) -> Command& {
    return *commands.emplace_back(
        std::make_unique<Command>(app, name, help, std::move(defaults), std::move(h), known_keys));
  };

  command("translate", "Translate an LTL formula to a Buchi automaton", {{"out", "buchi.json"}},
          cmd_translate)
      .add("--formula", "formula", Kind::kPath, "LTL formula file")
      .add("--ltl", "ltl", Kind::kString, "LTL formula text")
      .add("--ap", "ap", Kind::kList, "Proposition set (defaults to the formula's atoms)")
      .add("--out,-o", "out", Kind::kString, "Output file, relative to the output directory");

  command("gen-grid", "Generate a grid transition system", {{"out", "system.json"}}, cmd_gen_grid)
      .add("--rows", "rows", Kind::kInt, "Grid rows")
      .add("--cols", "cols", Kind::kInt, "Grid columns")
      .add("--cell", "cell", Kind::kDouble, "Cell size")
      .add("--cutoff", "cutoff", Kind::kDouble, "Edges join vertices closer than this")
      .add("--labels", "labels", Kind::kPath, "Label assignment JSON")
      .add("--initial", "initial", Kind::kString, "Initial state id")
      .add("--out,-o", "out", Kind::kString, "Output file, relative to the output directory");

  auto& product = command("product", "Build the product automaton and print its size",
                          {{"reachable_only", false}}, cmd_product);
  add_model_options(product);
  product.add("--dot", "dot", Kind::kString, "Also write a DOT rendering");

  auto& energy = command("energy", "Compute the energy of every product state",
                         {{"reachable_only", false}, {"out", "energy.csv"}}, cmd_energy);
  add_model_options(energy);
  energy.add("--out,-o", "out", Kind::kString, "CSV output file")
      .add("--dot", "dot", Kind::kString, "Also write a DOT rendering with energies");

  json rd = run_defaults();
  rd["seed"] = 1;
  rd["controller"] = "rh";
  rd["name"] = "trace";
  auto& run_cmd = command("run", "Run the closed loop and write a trace", rd, cmd_run);
  add_run_options(run_cmd);
  run_cmd.add("--seed", "seed", Kind::kInt, "Reward process seed")
      .add("--controller", "controller", Kind::kString, "rh or baseline")
      .add("--name", "name", Kind::kString, "Trace file stem")
      .add("--snapshots", "snapshots", Kind::kString, "Write DOT snapshots for steps from:to");

  json cd = run_defaults();
  cd["seeds"] = 20;
  cd["first_seed"] = 1;
  auto& compare_cmd =
      command("compare", "Compare the receding-horizon and block controllers", cd, cmd_compare);
  add_run_options(compare_cmd);
  compare_cmd.add("--seeds", "seeds", Kind::kInt, "Number of paired seeds")
      .add("--first-seed", "first_seed", Kind::kInt, "First seed");

  command("monitors", "Check the runtime monitors on a trace file", json::object(), cmd_monitors)
      .add("--trace", "trace", Kind::kPath, "Trace CSV")
      .add("--sidecar", "sidecar", Kind::kPath, "Trace JSON sidecar (default: next to the trace)")
      .add("--system", "system", Kind::kPath, "Transition system the trace ran on")
      .add("--forbid", "forbid", Kind::kList, "Propositions checked by the safety monitor")
      .add("--sequence", "sequence", Kind::kList, "trigger:target pairs")
      .add("--bound", "bound", Kind::kInt, "Recurrence bound (default D + N from the sidecar)")
      .add("--out,-o", "out", Kind::kString, "Also write the report as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    for (const auto& c : commands) {
      if (c->parsed()) return c->execute(out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace rhtl
