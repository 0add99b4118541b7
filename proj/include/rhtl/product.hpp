#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "rhtl/buchi.hpp"
#include "rhtl/system.hpp"

namespace rhtl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense index of a product state.
using ProductState = std::size_t;

struct ProductEdge {
  ProductState to;
  double weight;
};

/// Weighted product P = T x B. States are numbered densely; `pair_of` maps a
/// product index to its (system, automaton) components.
struct ProductAutomaton {
  std::vector<std::string> system_ids;
  std::vector<std::string> buchi_ids;
  std::vector<std::pair<std::size_t, std::size_t>> pair_of;
  std::vector<std::vector<ProductEdge>> succ;
  std::vector<std::vector<ProductEdge>> pred;  // pred[p] holds (source, weight)
  std::vector<ProductState> initial;
  std::vector<char> accepting;

  std::size_t num_states() const { return pair_of.size(); }
  std::size_t num_transitions() const;
  std::size_t system_state(ProductState p) const { return pair_of[p].first; }
  std::size_t buchi_state(ProductState p) const { return pair_of[p].second; }
  /// Index of (q, s), if that pair is a product state.
  std::optional<ProductState> find(std::size_t q, std::size_t s) const;
  bool has_edge(ProductState from, ProductState to) const;
  std::string label(ProductState p) const;

  /// Rank of each state under the (system id, automaton id) string order.
  /// Used for deterministic tie-breaking.
  const std::vector<std::size_t>& id_rank() const { return id_rank_; }

  std::vector<std::ptrdiff_t> lookup_;  // q * |S_B| + s -> index or -1
  std::vector<std::size_t> id_rank_;
};

struct ProductOptions {
  /// Keep only states reachable from the initial set. Off by default: the
  /// full Q x S_B product is built.
  bool reachable_only = false;
};

/// Throws InputError if the automaton's alphabet is not contained in the
/// system's, or if `ts` is invalid.
ProductAutomaton build_product(const TransitionSystem& ts, const BuchiAutomaton& b,
                               ProductOptions options = {});

struct GraphEdge {
  std::size_t from;
  std::size_t to;
  double weight;
};

/// Builds a product-shaped graph directly: one automaton component, state i
/// named `ids[i]`. Handy for hand-written examples and randomized checks.
ProductAutomaton product_from_graph(const std::vector<std::string>& ids,
                                    const std::vector<GraphEdge>& edges,
                                    const std::vector<char>& accepting,
                                    const std::vector<ProductState>& initial);

/// Drops the automaton component of each state.
std::vector<std::size_t> project(const ProductAutomaton& p, const std::vector<ProductState>& traj);

/// Largest subset of the accepting states in which every member has a path
/// of one or more edges back into the subset. Returned as a membership mask.
std::vector<char> largest_self_reachable(const ProductAutomaton& p);

struct EnergyMap {
  std::vector<char> fstar;
  std::vector<double> v;

  bool finite(ProductState p) const { return v[p] < kInfinity; }
  /// Number of distinct finite values of v.
  std::size_t distinct_finite_values() const;
};

/// v(p) = weighted shortest-path distance from p to the largest self-reachable
/// accepting set, or infinity when that set is unreachable.
EnergyMap compute_energy(const ProductAutomaton& p);

/// CSV lines `state_q,state_s,v` with `inf` for unreachable states.
std::string energy_to_csv(const ProductAutomaton& p, const EnergyMap& e);

/// Graphviz rendering of the product with energy annotations.
std::string product_to_dot(const ProductAutomaton& p, const EnergyMap* e = nullptr);

}  // namespace rhtl
