#include "rhtl/buchi.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace rhtl {

bool BuchiAutomaton::is_accepting(std::size_t s) const {
  return std::find(accepting.begin(), accepting.end(), s) != accepting.end();
}

void BuchiAutomaton::validate() const {
  const std::set<std::string> alphabet(ap.begin(), ap.end());
  if (alphabet.size() != ap.size()) throw InputError("duplicate proposition in ap");
  if (std::set<std::string>(states.begin(), states.end()).size() != states.size()) {
    throw InputError("duplicate automaton state id");
  }
  const auto check_index = [&](std::size_t s, const char* what) {
    if (s >= states.size()) {
      throw InputError(std::string(what) + " refers to unknown state index " + std::to_string(s));
    }
  };
  for (auto s : initial) check_index(s, "initial set");
  for (auto s : accepting) check_index(s, "accepting set");
  for (const auto& t : transitions) {
    check_index(t.from, "transition source");
    check_index(t.to, "transition target");
    if (!t.guard.is_propositional()) {
      throw InputError("guard is not propositional: " + t.guard.to_string());
    }
    for (const auto& a : t.guard.atoms()) {
      if (!alphabet.contains(a)) throw InputError("guard mentions '" + a + "' outside ap");
    }
  }
}

namespace {

// Iterative Tarjan over an implicit graph restricted to nodes reachable from
// `roots`. Returns component ids (or -1 for unreached nodes).
struct SccResult {
  std::vector<int> component;
  int count = 0;
};

SccResult strongly_connected(const std::vector<std::vector<std::size_t>>& succ,
                             const std::vector<std::size_t>& roots) {
  const std::size_t n = succ.size();
  SccResult out;
  out.component.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0;
  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  for (auto root : roots) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      if (fr.edge < succ[fr.node].size()) {
        const std::size_t w = succ[fr.node][fr.edge++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.node] = std::min(low[fr.node], index[w]);
        }
        continue;
      }
      const std::size_t v = fr.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          out.component[w] = out.count;
        } while (w != v);
        ++out.count;
      }
    }
  }
  return out;
}

}  // namespace

bool accepts_lasso(const BuchiAutomaton& b, const LassoWord& w) {
  if (w.cycle.empty()) throw InputError("lasso cycle must be nonempty");
  const std::size_t len = w.length();
  const std::size_t nodes = b.num_states() * len;
  const auto node = [len](std::size_t s, std::size_t pos) { return s * len + pos; };

  std::vector<std::vector<std::size_t>> succ(nodes);
  for (const auto& t : b.transitions) {
    for (std::size_t pos = 0; pos < len; ++pos) {
      if (eval_propositional(t.guard, w.at(pos))) {
        succ[node(t.from, pos)].push_back(node(t.to, w.successor(pos)));
      }
    }
  }
  std::vector<std::size_t> roots;
  for (auto s : b.initial) roots.push_back(node(s, 0));
  const SccResult scc = strongly_connected(succ, roots);

  std::vector<std::size_t> comp_size(scc.count, 0);
  for (std::size_t v = 0; v < nodes; ++v) {
    if (scc.component[v] >= 0) ++comp_size[scc.component[v]];
  }
  for (auto s : b.accepting) {
    for (std::size_t pos = 0; pos < len; ++pos) {
      const std::size_t v = node(s, pos);
      const int c = scc.component[v];
      if (c < 0) continue;
      if (comp_size[c] > 1) return true;
      if (std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end()) return true;
    }
  }
  return false;
}

std::string buchi_to_json(const BuchiAutomaton& b) {
  nlohmann::ordered_json j;
  j["format"] = "buchi-v1";
  j["ap"] = b.ap;
  j["states"] = b.states;
  auto ids = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(b.states.at(i));
    return out;
  };
  j["initial"] = ids(b.initial);
  j["accepting"] = ids(b.accepting);
  j["transitions"] = nlohmann::ordered_json::array();
  for (const auto& t : b.transitions) {
    nlohmann::ordered_json e;
    e["from"] = b.states.at(t.from);
    e["to"] = b.states.at(t.to);
    e["guard"] = t.guard.to_string();
    j["transitions"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

BuchiAutomaton buchi_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid automaton JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "buchi-v1") {
      throw InputError("unsupported automaton format '" + j.at("format").get<std::string>() + "'");
    }
    BuchiAutomaton b;
    b.ap = j.at("ap").get<std::vector<std::string>>();
    b.states = j.at("states").get<std::vector<std::string>>();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < b.states.size(); ++i) index.emplace(b.states[i], i);
    const auto lookup = [&](const std::string& id) {
      const auto it = index.find(id);
      if (it == index.end()) throw InputError("unknown automaton state '" + id + "'");
      return it->second;
    };
    for (const auto& id : j.at("initial")) b.initial.push_back(lookup(id.get<std::string>()));
    for (const auto& id : j.at("accepting")) b.accepting.push_back(lookup(id.get<std::string>()));
    const std::set<std::string> pi(b.ap.begin(), b.ap.end());
    for (const auto& e : j.at("transitions")) {
      b.transitions.push_back({lookup(e.at("from").get<std::string>()),
                               lookup(e.at("to").get<std::string>()),
                               parse_ltl(e.at("guard").get<std::string>(), pi)});
    }
    b.validate();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed automaton: ") + e.what());
  }
}

}  // namespace rhtl
