#include "rhtl/product.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace rhtl {

namespace {

void rank_by_ids(ProductAutomaton& p) {
  const std::size_t n = p.num_states();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    const auto& sa = p.system_ids[p.pair_of[a].first];
    const auto& sc = p.system_ids[p.pair_of[c].first];
    if (sa != sc) return sa < sc;
    return p.buchi_ids[p.pair_of[a].second] < p.buchi_ids[p.pair_of[c].second];
  });
  p.id_rank_.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) p.id_rank_[order[r]] = r;
}

}  // namespace

std::size_t ProductAutomaton::num_transitions() const {
  std::size_t n = 0;
  for (const auto& out : succ) n += out.size();
  return n;
}

std::optional<ProductState> ProductAutomaton::find(std::size_t q, std::size_t s) const {
  const std::size_t key = q * buchi_ids.size() + s;
  if (q >= system_ids.size() || s >= buchi_ids.size() || lookup_[key] < 0) return std::nullopt;
  return static_cast<ProductState>(lookup_[key]);
}

bool ProductAutomaton::has_edge(ProductState from, ProductState to) const {
  const auto& out = succ[from];
  return std::binary_search(out.begin(), out.end(), ProductEdge{to, 0.0},
                            [](const ProductEdge& a, const ProductEdge& b) { return a.to < b.to; });
}

std::string ProductAutomaton::label(ProductState p) const {
  return "(" + system_ids[system_state(p)] + "," + buchi_ids[buchi_state(p)] + ")";
}

ProductAutomaton build_product(const TransitionSystem& ts, const BuchiAutomaton& b,
                               ProductOptions options) {
  require_valid(ts);
  b.validate();
  const std::set<std::string> pi(ts.ap.begin(), ts.ap.end());
  for (const auto& a : b.ap) {
    if (!pi.contains(a)) {
      throw InputError("automaton proposition '" + a + "' is not observed by the system");
    }
  }

  const std::size_t nq = ts.num_states();
  const std::size_t nb = b.num_states();

  // enabled[q][s] = automaton successors of s on letter h(q)
  std::vector<std::vector<std::vector<std::size_t>>> enabled(nq, std::vector<std::vector<std::size_t>>(nb));
  for (std::size_t q = 0; q < nq; ++q) {
    for (const auto& t : b.transitions) {
      if (eval_propositional(t.guard, ts.obs[q])) enabled[q][t.from].push_back(t.to);
    }
    for (auto& targets : enabled[q]) {
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    }
  }

  std::vector<char> keep(nq * nb, 1);
  if (options.reachable_only) {
    std::fill(keep.begin(), keep.end(), 0);
    std::deque<std::size_t> queue;
    for (auto s0 : b.initial) {
      const std::size_t key = ts.initial * nb + s0;
      if (!keep[key]) {
        keep[key] = 1;
        queue.push_back(key);
      }
    }
    while (!queue.empty()) {
      const std::size_t key = queue.front();
      queue.pop_front();
      const std::size_t q = key / nb;
      const std::size_t s = key % nb;
      for (const auto& e : ts.edges[q]) {
        for (auto s2 : enabled[q][s]) {
          const std::size_t next = e.to * nb + s2;
          if (!keep[next]) {
            keep[next] = 1;
            queue.push_back(next);
          }
        }
      }
    }
  }

  ProductAutomaton p;
  p.system_ids = ts.states;
  p.buchi_ids = b.states;
  p.lookup_.assign(nq * nb, -1);
  for (std::size_t key = 0; key < nq * nb; ++key) {
    if (!keep[key]) continue;
    p.lookup_[key] = static_cast<std::ptrdiff_t>(p.pair_of.size());
    p.pair_of.emplace_back(key / nb, key % nb);
  }
  const std::size_t n = p.pair_of.size();
  p.succ.assign(n, {});
  p.pred.assign(n, {});
  p.accepting.assign(n, 0);
  for (ProductState i = 0; i < n; ++i) {
    const auto [q, s] = p.pair_of[i];
    p.accepting[i] = b.is_accepting(s) ? 1 : 0;
    for (const auto& e : ts.edges[q]) {
      for (auto s2 : enabled[q][s]) {
        const auto j = p.lookup_[e.to * nb + s2];
        if (j >= 0) p.succ[i].push_back({static_cast<ProductState>(j), e.weight});
      }
    }
    std::sort(p.succ[i].begin(), p.succ[i].end(),
              [](const ProductEdge& a, const ProductEdge& c) { return a.to < c.to; });
    for (const auto& e : p.succ[i]) p.pred[e.to].push_back({i, e.weight});
  }
  for (auto s0 : b.initial) {
    if (const auto i = p.find(ts.initial, s0)) p.initial.push_back(*i);
  }
  std::sort(p.initial.begin(), p.initial.end());
  p.initial.erase(std::unique(p.initial.begin(), p.initial.end()), p.initial.end());

  rank_by_ids(p);
  return p;
}


ProductAutomaton product_from_graph(const std::vector<std::string>& ids,
                                    const std::vector<GraphEdge>& edges,
                                    const std::vector<char>& accepting,
                                    const std::vector<ProductState>& initial) {
  const std::size_t n = ids.size();
  if (accepting.size() != n) throw InputError("accepting mask size mismatch");
  ProductAutomaton p;
  p.system_ids = ids;
  p.buchi_ids = {"s"};
  p.lookup_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.pair_of.emplace_back(i, 0);
    p.lookup_[i] = static_cast<std::ptrdiff_t>(i);
  }
  p.succ.assign(n, {});
  p.pred.assign(n, {});
  p.accepting = accepting;
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) throw InputError("graph edge endpoint out of range");
    if (!(e.weight > 0.0)) throw InputError("graph edge weight must be positive");
    if (p.has_edge(e.from, e.to)) continue;
    auto& out = p.succ[e.from];
    out.insert(std::upper_bound(out.begin(), out.end(), ProductEdge{e.to, e.weight},
                                [](const ProductEdge& a, const ProductEdge& b) { return a.to < b.to; }),
               ProductEdge{e.to, e.weight});
    p.pred[e.to].push_back({e.from, e.weight});
  }
  p.initial = initial;
  rank_by_ids(p);
  return p;
}

std::vector<std::size_t> project(const ProductAutomaton& p, const std::vector<ProductState>& traj) {
  std::vector<std::size_t> out;
  out.reserve(traj.size());
  for (auto s : traj) out.push_back(p.system_state(s));
  return out;
}

std::vector<char> largest_self_reachable(const ProductAutomaton& p) {
  const std::size_t n = p.num_states();
  std::vector<char> member = p.accepting;
  for (bool changed = true; changed;) {
    // reaches[x]: x has a path of >= 1 edge into the current set.
    std::vector<char> reaches(n, 0);
    std::deque<ProductState> queue;
    for (ProductState a = 0; a < n; ++a) {
      if (!member[a]) continue;
      for (const auto& e : p.pred[a]) {
        if (!reaches[e.to]) {
          reaches[e.to] = 1;
          queue.push_back(e.to);
        }
      }
    }
    while (!queue.empty()) {
      const ProductState x = queue.front();
      queue.pop_front();
      for (const auto& e : p.pred[x]) {
        if (!reaches[e.to]) {
          reaches[e.to] = 1;
          queue.push_back(e.to);
        }
      }
    }
    changed = false;
    for (ProductState a = 0; a < n; ++a) {
      if (member[a] && !reaches[a]) {
        member[a] = 0;
        changed = true;
      }
    }
  }
  return member;
}

std::size_t EnergyMap::distinct_finite_values() const {
  std::set<double> values;
  for (double x : v) {
    if (x < kInfinity) values.insert(x);
  }
  return values.size();
}

EnergyMap compute_energy(const ProductAutomaton& p) {
  const std::size_t n = p.num_states();
  EnergyMap e;
  e.fstar = largest_self_reachable(p);
  e.v.assign(n, kInfinity);

  using Item = std::pair<double, ProductState>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (ProductState s = 0; s < n; ++s) {
    if (e.fstar[s]) {
      e.v[s] = 0.0;
      heap.emplace(0.0, s);
    }
  }
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d > e.v[x]) continue;
    for (const auto& edge : p.pred[x]) {
      const double cand = edge.weight + d;
      if (cand < e.v[edge.to]) {
        e.v[edge.to] = cand;
        heap.emplace(cand, edge.to);
      }
    }
  }
  return e;
}

namespace {

std::string format_energy(double v) {
  if (!(v < kInfinity)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string energy_to_csv(const ProductAutomaton& p, const EnergyMap& e) {
  std::ostringstream os;
  os << "state_q,state_s,v\n";
  for (ProductState s = 0; s < p.num_states(); ++s) {
    os << p.system_ids[p.system_state(s)] << ',' << p.buchi_ids[p.buchi_state(s)] << ','
       << format_energy(e.v[s]) << '\n';
  }
  return os.str();
}

std::string product_to_dot(const ProductAutomaton& p, const EnergyMap* e) {
  std::ostringstream os;
  os << "digraph product {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (ProductState s = 0; s < p.num_states(); ++s) {
    os << "  p" << s << " [label=\"" << p.label(s);
    if (e) os << "\\nV=" << format_energy(e->v[s]);
    os << '"';
    if (p.accepting[s]) os << ", shape=doublecircle";
    if (std::find(p.initial.begin(), p.initial.end(), s) != p.initial.end()) os << ", style=bold";
    os << "];\n";
  }
  for (ProductState s = 0; s < p.num_states(); ++s) {
    for (const auto& edge : p.succ[s]) {
      os << "  p" << s << " -> p" << edge.to << " [label=\"" << edge.weight << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace rhtl
