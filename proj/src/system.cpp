#include "rhtl/system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace rhtl {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t TransitionSystem::num_transitions() const {
  std::size_t n = 0;
  for (const auto& out : edges) n += out.size();
  return n;
}

std::optional<std::size_t> TransitionSystem::find(const std::string& id) const {
  const auto it = std::find(states.begin(), states.end(), id);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

bool TransitionSystem::has_coordinates() const {
  return coords.size() == states.size() &&
         std::all_of(coords.begin(), coords.end(), [](const auto& c) { return c.has_value(); });
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kBlockingState: return "blocking state";
    case Violation::Kind::kNonPositiveWeight: return "non-positive weight";
    case Violation::Kind::kUnknownObservation: return "unknown observation";
    case Violation::Kind::kBadInitialState: return "bad initial state";
    case Violation::Kind::kBadEndpoint: return "bad transition endpoint";
    case Violation::Kind::kDuplicateState: return "duplicate state";
    case Violation::Kind::kShapeMismatch: return "shape mismatch";
  }
  return "unknown";
}

std::vector<Violation> validate(const TransitionSystem& ts) {
  using K = Violation::Kind;
  std::vector<Violation> report;
  const std::size_t n = ts.num_states();
  if (ts.edges.size() != n || ts.obs.size() != n || (!ts.coords.empty() && ts.coords.size() != n)) {
    report.push_back({K::kShapeMismatch, "per-state tables do not match the state count"});
    return report;
  }
  if (std::set<std::string>(ts.states.begin(), ts.states.end()).size() != n) {
    report.push_back({K::kDuplicateState, "state ids are not unique"});
  }
  if (ts.initial >= n) {
    report.push_back({K::kBadInitialState, "initial state index out of range"});
  }
  const std::set<std::string> pi(ts.ap.begin(), ts.ap.end());
  for (std::size_t q = 0; q < n; ++q) {
    if (ts.edges[q].empty()) {
      report.push_back({K::kBlockingState, "state '" + ts.states[q] + "' has no outgoing transition"});
    }
    for (const auto& e : ts.edges[q]) {
      if (e.to >= n) {
        report.push_back({K::kBadEndpoint, "transition from '" + ts.states[q] + "' to unknown state"});
        continue;
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        report.push_back({K::kNonPositiveWeight, "transition " + ts.states[q] + " -> " +
                                                     ts.states[e.to] + " has weight " +
                                                     std::to_string(e.weight)});
      }
    }
    for (const auto& o : ts.obs[q]) {
      if (!pi.contains(o)) {
        report.push_back({K::kUnknownObservation,
                          "state '" + ts.states[q] + "' observes '" + o + "' outside ap"});
      }
    }
  }
  return report;
}

void require_valid(const TransitionSystem& ts) {
  const auto report = validate(ts);
  if (!report.empty()) {
    throw InputError("invalid transition system: " + to_string(report.front().kind) + ": " +
                     report.front().message);
  }
}

TransitionSystem grid_dts(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw InputError("grid needs at least one row and column");
  if (!(spec.cell > 0.0)) throw InputError("grid cell size must be positive");
  if (!(spec.edge_cutoff > 0.0)) throw InputError("edge cutoff must be positive");
  if (spec.rows * spec.cols > 1 && spec.edge_cutoff <= spec.cell) {
    throw InputError("edge cutoff must exceed the cell size or the grid is blocking");
  }

  TransitionSystem ts;
  ts.ap = spec.ap;
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      ts.states.push_back("r" + std::to_string(i) + "c" + std::to_string(j));
      ts.coords.push_back(Point{j * spec.cell, i * spec.cell});
    }
  }
  const std::size_t n = ts.states.size();
  ts.obs.assign(n, {});
  ts.edges.assign(n, {});
  for (const auto& [id, props] : spec.labels) {
    const auto q = ts.find(id);
    if (!q) throw InputError("label refers to unknown grid state '" + id + "'");
    ts.obs[*q] = props;
  }
  const auto q0 = ts.find(spec.initial);
  if (!q0) throw InputError("initial state '" + spec.initial + "' is not a grid state");
  ts.initial = *q0;

  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double d = distance(*ts.coords[u], *ts.coords[v]);
      if (d < spec.edge_cutoff) ts.edges[u].push_back({v, d});
    }
  }
  require_valid(ts);
  return ts;
}

std::string system_to_json(const TransitionSystem& ts) {
  nlohmann::ordered_json j;
  j["format"] = "dts-v1";
  j["ap"] = ts.ap;
  j["initial"] = ts.states.at(ts.initial);
  j["states"] = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < ts.num_states(); ++q) {
    nlohmann::ordered_json s;
    s["id"] = ts.states[q];
    s["obs"] = std::vector<std::string>(ts.obs[q].begin(), ts.obs[q].end());
    if (q < ts.coords.size() && ts.coords[q]) {
      s["x"] = ts.coords[q]->x;
      s["y"] = ts.coords[q]->y;
    }
    j["states"].push_back(std::move(s));
  }
  j["transitions"] = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < ts.num_states(); ++q) {
    for (const auto& e : ts.edges[q]) {
      nlohmann::ordered_json t;
      t["from"] = ts.states[q];
      t["to"] = ts.states[e.to];
      t["weight"] = e.weight;
      j["transitions"].push_back(std::move(t));
    }
  }
  return j.dump(2) + "\n";
}

TransitionSystem system_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid system JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "dts-v1") {
      throw InputError("unsupported system format '" + j.at("format").get<std::string>() + "'");
    }
    TransitionSystem ts;
    ts.ap = j.at("ap").get<std::vector<std::string>>();
    std::map<std::string, std::size_t> index;
    for (const auto& s : j.at("states")) {
      const auto id = s.at("id").get<std::string>();
      if (!index.emplace(id, ts.states.size()).second) {
        throw InputError("duplicate state id '" + id + "'");
      }
      ts.states.push_back(id);
      const auto obs = s.value("obs", std::vector<std::string>{});
      ts.obs.emplace_back(obs.begin(), obs.end());
      if (s.contains("x") && s.contains("y")) {
        ts.coords.push_back(Point{s.at("x").get<double>(), s.at("y").get<double>()});
      } else {
        ts.coords.push_back(std::nullopt);
      }
    }
    const auto lookup = [&](const std::string& id) {
      const auto it = index.find(id);
      if (it == index.end()) throw InputError("unknown state '" + id + "'");
      return it->second;
    };
    ts.initial = lookup(j.at("initial").get<std::string>());
    ts.edges.assign(ts.states.size(), {});
    for (const auto& t : j.at("transitions")) {
      ts.edges[lookup(t.at("from").get<std::string>())].push_back(
          {lookup(t.at("to").get<std::string>()), t.at("weight").get<double>()});
    }
    for (auto& out : ts.edges) {
      std::stable_sort(out.begin(), out.end(),
                       [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
    if (std::none_of(ts.coords.begin(), ts.coords.end(), [](const auto& c) { return c.has_value(); })) {
      ts.coords.clear();
    }
    require_valid(ts);
    return ts;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed system: ") + e.what());
  }
}

GridSpec grid_labels_from_json(const std::string& text, GridSpec base) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("ap")) base.ap = j.at("ap").get<std::vector<std::string>>();
    if (j.contains("initial")) base.initial = j.at("initial").get<std::string>();
    if (j.contains("rows")) base.rows = j.at("rows").get<int>();
    if (j.contains("cols")) base.cols = j.at("cols").get<int>();
    if (j.contains("cell")) base.cell = j.at("cell").get<double>();
    if (j.contains("edge_cutoff")) base.edge_cutoff = j.at("edge_cutoff").get<double>();
    base.labels.clear();
    if (j.contains("labels")) {
      for (const auto& [id, props] : j.at("labels").items()) {
        const auto v = props.get<std::vector<std::string>>();
        base.labels[id] = Observation(v.begin(), v.end());
      }
    }
    return base;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed label file: ") + e.what());
  }
}

}  // namespace rhtl
