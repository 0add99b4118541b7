#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rhtl/formula.hpp"

namespace rhtl {

struct BuchiTransition {
  std::size_t from;
  std::size_t to;
  Formula guard;  // propositional, over `ap`
};

/// Nondeterministic Buchi automaton over 2^ap with symbolic guards. States are
/// referred to by index; `states[i]` is the external id.
struct BuchiAutomaton {
  std::vector<std::string> ap;
  std::vector<std::string> states;
  std::vector<std::size_t> initial;
  std::vector<std::size_t> accepting;
  std::vector<BuchiTransition> transitions;

  std::size_t num_states() const { return states.size(); }
  bool is_accepting(std::size_t s) const;

  /// Throws InputError listing the first broken invariant (index ranges,
  /// non-propositional guards, guard atoms outside `ap`).
  void validate() const;
};

/// True iff some run over prefix . cycle^omega visits an accepting state
/// infinitely often. Decided on the finite run graph (state x lasso position).
bool accepts_lasso(const BuchiAutomaton& b, const LassoWord& w);

/// Serialization in the `buchi-v1` JSON format.
std::string buchi_to_json(const BuchiAutomaton& b);
BuchiAutomaton buchi_from_json(const std::string& text);

/// Tableau translation: generalized Buchi tableau over NNF obligations, then
/// counter-based degeneralization. Only states reachable from the initial
/// state are kept. `ap` defaults to the atoms of `f`.
BuchiAutomaton translate(const Formula& f, std::vector<std::string> ap = {});

}  // namespace rhtl
