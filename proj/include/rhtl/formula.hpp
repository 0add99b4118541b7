#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rhtl/errors.hpp"

namespace rhtl {

/// A set of atomic propositions observed at one position (a letter of 2^Pi).
using Observation = std::set<std::string>;

enum class FormulaKind {
  kTrue,
  kFalse,
  kAtom,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kNext,
  kUntil,
  kRelease,
  kEventually,
  kAlways,
};

/// Immutable LTL syntax tree. Copies share structure.
///
/// Release is not part of the user-facing connectives but is produced by
/// to_nnf as the dual of until; the concrete syntax accepts it as `R`.
class Formula {
 public:
  static Formula True();
  static Formula False();
  static Formula Atom(std::string name);
  static Formula Not(Formula f);
  static Formula And(Formula lhs, Formula rhs);
  static Formula Or(Formula lhs, Formula rhs);
  static Formula Implies(Formula lhs, Formula rhs);
  static Formula Next(Formula f);
  static Formula Until(Formula lhs, Formula rhs);
  static Formula Release(Formula lhs, Formula rhs);
  static Formula Eventually(Formula f);
  static Formula Always(Formula f);

  FormulaKind kind() const { return node_->kind; }
  const std::string& atom() const { return node_->name; }
  // Unary operators store their operand in lhs.
  const Formula& lhs() const { return node_->children[0]; }
  const Formula& rhs() const { return node_->children[1]; }
  const Formula& child() const { return node_->children[0]; }
  std::size_t arity() const { return node_->children.size(); }

  bool is_propositional() const;
  bool is_literal() const;

  /// Atomic propositions mentioned anywhere in the tree.
  std::set<std::string> atoms() const;

  /// Number of nodes in the tree.
  std::size_t size() const;

  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  struct Node {
    FormulaKind kind;
    std::string name;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(FormulaKind kind, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

/// Parses the ASCII syntax. When `pi` is non-empty every atom must belong to
/// it; an empty `pi` accepts any identifier.
///
/// Precedence, tightest first: `!` `X` `F` `G`; `U` `R` (right-assoc); `&`;
/// `|`; `->` (right-assoc). `true` and `false` are constants.
Formula parse_ltl(std::string_view text, const std::set<std::string>& pi = {});

/// Parses a formula file: `#` starts a comment line, the remaining lines are
/// joined and parsed as one formula.
Formula parse_ltl_file_contents(std::string_view contents,
                                const std::set<std::string>& pi = {});

/// Negation normal form over {true, false, literals, &, |, X, U, R}.
Formula to_nnf(const Formula& f);

/// Ultimately periodic word prefix . cycle^omega.
struct LassoWord {
  std::vector<Observation> prefix;
  std::vector<Observation> cycle;

  std::size_t length() const { return prefix.size() + cycle.size(); }
  const Observation& at(std::size_t pos) const {
    return pos < prefix.size() ? prefix[pos] : cycle[pos - prefix.size()];
  }
  std::size_t successor(std::size_t pos) const {
    return pos + 1 < length() ? pos + 1 : prefix.size();
  }
};

/// Exact LTL satisfaction on a lasso: least/greatest fixpoints over the
/// finite set of suffix positions.
bool eval_on_lasso(const Formula& f, const LassoWord& w);

/// Evaluates a propositional formula on a single letter. Throws on temporal
/// operators.
bool eval_propositional(const Formula& f, const Observation& letter);

}  // namespace rhtl
