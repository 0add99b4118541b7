// LTL to Buchi translation by tableau expansion.
//
// A tableau state is the set of NNF obligations that must hold at the current
// position. Expanding it yields covers: a conjunction of literals the current
// letter must satisfy, the obligations for the next position, and the set of
// until-formulas that were postponed. Each until u = a U b defines one
// generalized acceptance set (the covers that do not postpone u); the
// counter-based degeneralization turns that into a plain Buchi condition.

#include <algorithm>
#include <deque>
#include <optional>
#include <tuple>
#include <map>
#include <set>

#include "rhtl/buchi.hpp"

namespace rhtl {
namespace {

using FormulaId = int;
using Obligations = std::vector<FormulaId>;  // sorted, unique

struct Cover {
  std::map<std::string, bool> literals;  // atom -> required polarity
  std::set<FormulaId> next;
  std::set<FormulaId> postponed;
};

class Tableau {
 public:
  explicit Tableau(const Formula& root) { root_ = intern(root); }

  FormulaId root() const { return root_; }
  const std::vector<FormulaId>& untils() const { return untils_; }

  std::vector<Cover> expand(const Obligations& state) const {
    std::vector<Cover> out;
    std::vector<FormulaId> todo(state.rbegin(), state.rend());
    expand_branch(std::move(todo), {}, Cover{}, out);
    return out;
  }

 private:
  FormulaId intern(const Formula& f) {
    if (auto it = ids_.find(f); it != ids_.end()) return it->second;
    std::vector<FormulaId> kids;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      kids.push_back(intern(i == 0 ? f.lhs() : f.rhs()));
    }
    const FormulaId id = static_cast<FormulaId>(formulas_.size());
    formulas_.push_back(f);
    children_.push_back(std::move(kids));
    ids_.emplace(f, id);
    if (f.kind() == FormulaKind::kUntil) untils_.push_back(id);
    return id;
  }

  void expand_branch(std::vector<FormulaId> todo, std::set<FormulaId> done, Cover cover,
                     std::vector<Cover>& out) const {
    while (!todo.empty()) {
      const FormulaId id = todo.back();
      todo.pop_back();
      if (!done.insert(id).second) continue;
      const Formula& f = formulas_[id];
      const auto& kids = children_[id];
      switch (f.kind()) {
        case FormulaKind::kTrue:
          break;
        case FormulaKind::kFalse:
          return;
        case FormulaKind::kAtom:
        case FormulaKind::kNot: {
          const bool positive = f.kind() == FormulaKind::kAtom;
          const std::string& name = positive ? f.atom() : f.child().atom();
          auto [it, inserted] = cover.literals.emplace(name, positive);
          if (!inserted && it->second != positive) return;
          break;
        }
        case FormulaKind::kAnd:
          todo.push_back(kids[1]);
          todo.push_back(kids[0]);
          break;
        case FormulaKind::kOr: {
          auto alt = todo;
          alt.push_back(kids[1]);
          expand_branch(std::move(alt), done, cover, out);
          todo.push_back(kids[0]);
          break;
        }
        case FormulaKind::kNext:
          cover.next.insert(kids[0]);
          break;
        case FormulaKind::kUntil: {
          // Postpone: a now, u again next.
          auto alt = todo;
          alt.push_back(kids[0]);
          Cover postponed = cover;
          postponed.next.insert(id);
          postponed.postponed.insert(id);
          expand_branch(std::move(alt), done, std::move(postponed), out);
          // Fulfil: b now.
          todo.push_back(kids[1]);
          break;
        }
        case FormulaKind::kRelease: {
          auto alt = todo;
          alt.push_back(kids[1]);
          Cover carried = cover;
          carried.next.insert(id);
          expand_branch(std::move(alt), done, std::move(carried), out);
          todo.push_back(kids[1]);
          todo.push_back(kids[0]);
          break;
        }
        default:
          throw InputError("formula not in negation normal form: " + f.to_string());
      }
    }
    out.push_back(std::move(cover));
  }

  std::map<Formula, FormulaId> ids_;
  std::vector<Formula> formulas_;
  std::vector<std::vector<FormulaId>> children_;
  std::vector<FormulaId> untils_;
  FormulaId root_;
};

Formula guard_of(const std::map<std::string, bool>& literals) {
  std::optional<Formula> g;
  for (const auto& [atom, positive] : literals) {
    Formula lit = positive ? Formula::Atom(atom) : Formula::Not(Formula::Atom(atom));
    g = g ? Formula::And(*g, lit) : lit;
  }
  return g ? *g : Formula::True();
}

}  // namespace

BuchiAutomaton translate(const Formula& f, std::vector<std::string> ap) {
  const auto atoms = f.atoms();
  if (ap.empty()) {
    ap.assign(atoms.begin(), atoms.end());
  } else {
    const std::set<std::string> given(ap.begin(), ap.end());
    for (const auto& a : atoms) {
      if (!given.contains(a)) throw InputError("formula atom '" + a + "' missing from ap");
    }
  }

  const Tableau tableau(to_nnf(f));
  const auto& untils = tableau.untils();
  const std::size_t k = untils.size();

  using Key = std::pair<Obligations, std::size_t>;  // (obligations, counter)
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  std::deque<std::size_t> queue;
  const auto state_of = [&](const Key& key) {
    auto [it, inserted] = index.emplace(key, keys.size());
    if (inserted) {
      keys.push_back(key);
      queue.push_back(it->second);
    }
    return it->second;
  };

  BuchiAutomaton b;
  b.ap = std::move(ap);
  b.initial.push_back(state_of({Obligations{tableau.root()}, 0}));

  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const auto [obligations, counter] = keys[s];
    for (const Cover& c : tableau.expand(obligations)) {
      std::size_t j = counter == k ? 0 : counter;
      while (j < k && !c.postponed.contains(untils[j])) ++j;
      const std::size_t t = state_of({Obligations(c.next.begin(), c.next.end()), j});
      Formula guard = guard_of(c.literals);
      if (seen.emplace(s, t, guard.to_string()).second) {
        b.transitions.push_back({s, t, std::move(guard)});
      }
    }
  }

  for (std::size_t i = 0; i < keys.size(); ++i) {
    b.states.push_back("s" + std::to_string(i));
    if (keys[i].second == k) b.accepting.push_back(i);
  }
  return b;
}

}  // namespace rhtl
