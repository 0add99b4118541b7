#pragma once

// Random instance generators and brute-force oracles shared by the tests and
// the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rhtl/buchi.hpp"
#include "rhtl/controller.hpp"
#include "rhtl/formula.hpp"
#include "rhtl/product.hpp"
#include "rhtl/system.hpp"

namespace rhtl::fixtures {

inline const std::vector<std::string>& generator_formulas() {
  static const std::vector<std::string> f = {
      "G F a", "G (a -> F b)", "F G a", "G F a & G F b", "G ! u & G F a",
  };
  return f;
}

inline const std::string& surveillance_formula() {
  static const std::string f =
      "G F base & G (base -> X (! base U survey)) & G (survey -> X (! survey U recharge)) & "
      "G ! unsafe";
  return f;
}

inline const std::vector<std::string>& surveillance_conjuncts() {
  static const std::vector<std::string> f = {
      "G F base",
      "G (base -> X (! base U survey))",
      "G (survey -> X (! survey U recharge))",
      "G ! unsafe",
  };
  return f;
}

inline GridSpec case_study_grid() {
  GridSpec g;
  g.ap = {"base", "survey", "recharge", "unsafe"};
  g.labels = {{"r1c1", {"base"}},   {"r8c2", {"survey"}}, {"r7c8", {"survey"}},
              {"r2c8", {"recharge"}}, {"r4c4", {"unsafe"}}, {"r4c5", {"unsafe"}},
              {"r5c4", {"unsafe"}},   {"r5c5", {"unsafe"}}, {"r6c5", {"unsafe"}}};
  return g;
}

inline Observation random_letter(std::mt19937_64& rng, const std::vector<std::string>& ap) {
  Observation o;
  for (const auto& a : ap) {
    if (rng() % 2) o.insert(a);
  }
  return o;
}

inline LassoWord random_lasso(std::mt19937_64& rng, const std::vector<std::string>& ap,
                              std::size_t max_len = 6) {
  LassoWord w;
  const std::size_t prefix = rng() % (max_len + 1);
  const std::size_t cycle = 1 + rng() % max_len;
  for (std::size_t i = 0; i < prefix; ++i) w.prefix.push_back(random_letter(rng, ap));
  for (std::size_t i = 0; i < cycle; ++i) w.cycle.push_back(random_letter(rng, ap));
  return w;
}

/// Random formula over `ap` of roughly the given depth, using every connective.
inline Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& ap, int depth) {
  if (depth <= 0 || rng() % 5 == 0) {
    const auto r = rng() % (ap.size() + 2);
    if (r == ap.size()) return Formula::True();
    if (r == ap.size() + 1) return Formula::False();
    return Formula::Atom(ap[r]);
  }
  const auto sub = [&] { return random_formula(rng, ap, depth - 1); };
  switch (rng() % 11) {
    case 0: return Formula::Not(sub());
    case 1: return Formula::And(sub(), sub());
    case 2: return Formula::Or(sub(), sub());
    case 3: return Formula::Implies(sub(), sub());
    case 4: return Formula::Next(sub());
    case 5: return Formula::Until(sub(), sub());
    case 6: return Formula::Release(sub(), sub());
    case 7: return Formula::Eventually(sub());
    case 8: return Formula::Always(sub());
    case 9: return Formula::Not(Formula::Until(sub(), sub()));
    default: return Formula::Always(Formula::Eventually(sub()));
  }
}

/// Random valid system: every state gets 1..3 successors, weights are small
/// multiples of 0.5 and labels are random subsets of `ap`.
inline TransitionSystem random_dts(std::mt19937_64& rng, std::size_t n,
                                   const std::vector<std::string>& ap) {
  TransitionSystem ts;
  ts.ap = ap;
  for (std::size_t i = 0; i < n; ++i) {
    ts.states.push_back("q" + std::to_string(i));
    ts.obs.push_back(random_letter(rng, ap));
  }
  ts.edges.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = 1 + rng() % 3;
    std::vector<std::size_t> targets;
    while (targets.size() < std::min(k, n)) {
      const std::size_t t = rng() % n;
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end());
    for (auto t : targets) ts.edges[i].push_back({t, 0.5 * static_cast<double>(1 + rng() % 10)});
  }
  ts.initial = rng() % n;
  return ts;
}

/// Random product-shaped graph with `n` states.
inline ProductAutomaton random_graph(std::mt19937_64& rng, std::size_t n, double edge_p = 0.3,
                                     double accept_p = 0.4, bool non_blocking = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (u(rng) < edge_p) {
        edges.push_back({i, j, static_cast<double>(1 + rng() % 9)});
        any = true;
      }
    }
    if (non_blocking && !any) edges.push_back({i, rng() % n, static_cast<double>(1 + rng() % 9)});
  }
  std::vector<char> accepting(n);
  for (auto& a : accepting) a = u(rng) < accept_p ? 1 : 0;
  std::vector<ProductState> initial;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 3 == 0) initial.push_back(i);
  }
  if (initial.empty()) initial.push_back(0);
  return product_from_graph(ids, edges, accepting, initial);
}

/// Reachability by paths of one or more edges.
inline std::vector<std::vector<char>> transitive_closure(const ProductAutomaton& p) {
  const std::size_t n = p.num_states();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : p.succ[i]) r[i][e.to] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (r[k][j]) r[i][j] = 1;
      }
    }
  }
  return r;
}

/// Largest self-reachable subset of the accepting states by enumerating every
/// subset. Only for small products.
inline std::vector<char> brute_force_fstar(const ProductAutomaton& p) {
  const auto reach = transitive_closure(p);
  std::vector<std::size_t> acc;
  for (std::size_t i = 0; i < p.num_states(); ++i) {
    if (p.accepting[i]) acc.push_back(i);
  }
  std::uint64_t best = 0;
  int best_size = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << acc.size()); ++mask) {
    bool ok = true;
    for (std::size_t a = 0; a < acc.size() && ok; ++a) {
      if (!(mask >> a & 1)) continue;
      bool hits = false;
      for (std::size_t b = 0; b < acc.size() && !hits; ++b) {
        hits = (mask >> b & 1) && reach[acc[a]][acc[b]];
      }
      ok = hits;
    }
    const int size = __builtin_popcountll(mask);
    if (ok && size > best_size) {
      best = mask;
      best_size = size;
    }
  }
  std::vector<char> out(p.num_states(), 0);
  for (std::size_t a = 0; a < acc.size(); ++a) {
    if (best >> a & 1) out[acc[a]] = 1;
  }
  return out;
}

/// Distance to `targets` from all-pairs shortest paths.
inline std::vector<double> floyd_energy(const ProductAutomaton& p, const std::vector<char>& targets) {
  const std::size_t n = p.num_states();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInfinity));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0.0;
    for (const auto& e : p.succ[i]) d[i][e.to] = std::min(d[i][e.to], e.weight);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  std::vector<double> v(n, kInfinity);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (targets[j]) v[i] = std::min(v[i], d[i][j]);
    }
  }
  return v;
}

/// Product edge relation from the pairwise definition.
inline bool brute_force_edge(const TransitionSystem& ts, const BuchiAutomaton& b, std::size_t q,
                             std::size_t s, std::size_t q2, std::size_t s2) {
  const bool system_edge = std::any_of(ts.edges[q].begin(), ts.edges[q].end(),
                                       [&](const Edge& e) { return e.to == q2; });
  if (!system_edge) return false;
  return std::any_of(b.transitions.begin(), b.transitions.end(), [&](const BuchiTransition& t) {
    return t.from == s && t.to == s2 && eval_propositional(t.guard, ts.obs[q]);
  });
}

/// Random snapshot over the system states of `p`, sparse and integer-valued
/// half of the time so that ties occur.
inline RewardSnapshot random_snapshot(std::mt19937_64& rng, std::size_t num_system_states) {
  RewardSnapshot r(num_system_states, 0.0);
  const bool integral = rng() % 2 == 0;
  std::uniform_real_distribution<double> u(0.0, 25.0);
  for (auto& x : r) {
    if (rng() % 3 == 0) continue;
    x = integral ? static_cast<double>(rng() % 4) : u(rng);
  }
  return r;
}

}  // namespace rhtl::fixtures
