#include "rhtl/formula.hpp"

#include <cctype>
#include <functional>
#include <sstream>
#include <utility>

namespace rhtl {

Formula Formula::make(FormulaKind kind, std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(Node{kind, {}, std::move(children)}));
}

Formula Formula::True() { return make(FormulaKind::kTrue, {}); }
Formula Formula::False() { return make(FormulaKind::kFalse, {}); }
Formula Formula::Atom(std::string name) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::kAtom, std::move(name), {}}));
}
Formula Formula::Not(Formula f) { return make(FormulaKind::kNot, {std::move(f)}); }
Formula Formula::And(Formula lhs, Formula rhs) {
  return make(FormulaKind::kAnd, {std::move(lhs), std::move(rhs)});
}
Formula Formula::Or(Formula lhs, Formula rhs) {
  return make(FormulaKind::kOr, {std::move(lhs), std::move(rhs)});
}
Formula Formula::Implies(Formula lhs, Formula rhs) {
  return make(FormulaKind::kImplies, {std::move(lhs), std::move(rhs)});
}
Formula Formula::Next(Formula f) { return make(FormulaKind::kNext, {std::move(f)}); }
Formula Formula::Until(Formula lhs, Formula rhs) {
  return make(FormulaKind::kUntil, {std::move(lhs), std::move(rhs)});
}
Formula Formula::Release(Formula lhs, Formula rhs) {
  return make(FormulaKind::kRelease, {std::move(lhs), std::move(rhs)});
}
Formula Formula::Eventually(Formula f) { return make(FormulaKind::kEventually, {std::move(f)}); }
Formula Formula::Always(Formula f) { return make(FormulaKind::kAlways, {std::move(f)}); }

bool Formula::is_propositional() const {
  switch (kind()) {
    case FormulaKind::kTrue:
    case FormulaKind::kFalse:
    case FormulaKind::kAtom:
      return true;
    case FormulaKind::kNot:
      return child().is_propositional();
    case FormulaKind::kAnd:
    case FormulaKind::kOr:
    case FormulaKind::kImplies:
      return lhs().is_propositional() && rhs().is_propositional();
    default:
      return false;
  }
}

bool Formula::is_literal() const {
  return kind() == FormulaKind::kAtom ||
         (kind() == FormulaKind::kNot && child().kind() == FormulaKind::kAtom);
}

std::set<std::string> Formula::atoms() const {
  std::set<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind() == FormulaKind::kAtom) out.insert(f.atom());
    for (const auto& c : f.node_->children) walk(c);
  };
  walk(*this);
  return out;
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  return n;
}

namespace {

const char* binary_symbol(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::kAnd: return "&";
    case FormulaKind::kOr: return "|";
    case FormulaKind::kImplies: return "->";
    case FormulaKind::kUntil: return "U";
    case FormulaKind::kRelease: return "R";
    default: return "?";
  }
}

const char* unary_symbol(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::kNot: return "!";
    case FormulaKind::kNext: return "X ";
    case FormulaKind::kEventually: return "F ";
    case FormulaKind::kAlways: return "G ";
    default: return "?";
  }
}

void print(const Formula& f, std::ostream& os) {
  switch (f.kind()) {
    case FormulaKind::kTrue: os << "true"; return;
    case FormulaKind::kFalse: os << "false"; return;
    case FormulaKind::kAtom: os << f.atom(); return;
    case FormulaKind::kNot:
    case FormulaKind::kNext:
    case FormulaKind::kEventually:
    case FormulaKind::kAlways:
      os << unary_symbol(f.kind());
      print(f.child(), os);
      return;
    default:
      os << '(';
      print(f.lhs(), os);
      os << ' ' << binary_symbol(f.kind()) << ' ';
      print(f.rhs(), os);
      os << ')';
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  print(*this, os);
  return os.str();
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.node_->name != b.node_->name ||
      a.arity() != b.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.node_->children[i] == b.node_->children[i])) return false;
  }
  return true;
}

bool operator<(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return false;
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  if (a.node_->name != b.node_->name) return a.node_->name < b.node_->name;
  if (a.arity() != b.arity()) return a.arity() < b.arity();
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const auto& x = a.node_->children[i];
    const auto& y = b.node_->children[i];
    if (x < y) return true;
    if (y < x) return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { kIdent, kTrue, kFalse, kNot, kAnd, kOr, kImplies, kNext, kUntil,
                 kRelease, kEventually, kAlways, kLParen, kRParen, kEnd };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        ++i;
      }
      std::string word(s.substr(start, i - start));
      Tok t = Tok::kIdent;
      if (word == "X") t = Tok::kNext;
      else if (word == "U") t = Tok::kUntil;
      else if (word == "R") t = Tok::kRelease;
      else if (word == "F") t = Tok::kEventually;
      else if (word == "G") t = Tok::kAlways;
      else if (word == "true") t = Tok::kTrue;
      else if (word == "false") t = Tok::kFalse;
      out.push_back({t, std::move(word), start});
      continue;
    }
    switch (c) {
      case '!': out.push_back({Tok::kNot, "!", start}); ++i; break;
      case '&': out.push_back({Tok::kAnd, "&", start}); ++i; break;
      case '|': out.push_back({Tok::kOr, "|", start}); ++i; break;
      case '(': out.push_back({Tok::kLParen, "(", start}); ++i; break;
      case ')': out.push_back({Tok::kRParen, ")", start}); ++i; break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::kImplies, "->", start});
          i += 2;
          break;
        }
        [[fallthrough]];
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::set<std::string>& pi)
      : tokens_(std::move(tokens)), pi_(pi) {}

  Formula parse() {
    Formula f = implication();
    if (peek().type != Tok::kEnd) {
      throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
    }
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().type == Tok::kImplies) {
      take();
      return Formula::Implies(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().type == Tok::kOr) {
      take();
      f = Formula::Or(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (peek().type == Tok::kAnd) {
      take();
      f = Formula::And(std::move(f), until());
    }
    return f;
  }

  Formula until() {
    Formula lhs = unary();
    if (peek().type == Tok::kUntil) {
      take();
      return Formula::Until(std::move(lhs), until());
    }
    if (peek().type == Tok::kRelease) {
      take();
      return Formula::Release(std::move(lhs), until());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().type) {
      case Tok::kNot: take(); return Formula::Not(unary());
      case Tok::kNext: take(); return Formula::Next(unary());
      case Tok::kEventually: take(); return Formula::Eventually(unary());
      case Tok::kAlways: take(); return Formula::Always(unary());
      default: return primary();
    }
  }

  Formula primary() {
    const Token& t = take();
    switch (t.type) {
      case Tok::kTrue: return Formula::True();
      case Tok::kFalse: return Formula::False();
      case Tok::kIdent:
        if (!pi_.empty() && !pi_.contains(t.text)) {
          throw ParseError("unknown proposition '" + t.text + "'", t.pos);
        }
        return Formula::Atom(t.text);
      case Tok::kLParen: {
        Formula f = implication();
        if (peek().type != Tok::kRParen) {
          throw ParseError("expected ')'", peek().pos);
        }
        take();
        return f;
      }
      case Tok::kEnd:
        throw ParseError("missing operand", t.pos);
      default:
        throw ParseError("unexpected token '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> tokens_;
  const std::set<std::string>& pi_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_ltl(std::string_view text, const std::set<std::string>& pi) {
  return Parser(lex(text), pi).parse();
}

Formula parse_ltl_file_contents(std::string_view contents,
                                const std::set<std::string>& pi) {
  std::string joined;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    joined += line;
    joined += ' ';
  }
  return parse_ltl(joined, pi);
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case FormulaKind::kTrue:
      return negated ? Formula::False() : f;
    case FormulaKind::kFalse:
      return negated ? Formula::True() : f;
    case FormulaKind::kAtom:
      return negated ? Formula::Not(f) : f;
    case FormulaKind::kNot:
      return nnf(f.child(), !negated);
    case FormulaKind::kAnd:
      return negated ? Formula::Or(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::And(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case FormulaKind::kOr:
      return negated ? Formula::And(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::Or(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case FormulaKind::kImplies:
      return negated ? Formula::And(nnf(f.lhs(), false), nnf(f.rhs(), true))
                     : Formula::Or(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case FormulaKind::kNext:
      return Formula::Next(nnf(f.child(), negated));
    case FormulaKind::kUntil:
      return negated ? Formula::Release(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::Until(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case FormulaKind::kRelease:
      return negated ? Formula::Until(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::Release(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case FormulaKind::kEventually:
      return negated ? Formula::Release(Formula::False(), nnf(f.child(), true))
                     : Formula::Until(Formula::True(), nnf(f.child(), false));
    case FormulaKind::kAlways:
      return negated ? Formula::Until(Formula::True(), nnf(f.child(), true))
                     : Formula::Release(Formula::False(), nnf(f.child(), false));
  }
  return f;
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

// ---------------------------------------------------------------------------
// Lasso semantics

namespace {

using Truth = std::vector<char>;

// Iterates val[i] = step(i, val[succ(i)]) from `init` until stable. Starting
// from all-false yields the least fixpoint, from all-true the greatest.
template <typename Step>
Truth fixpoint(const LassoWord& w, bool init, Step step) {
  const std::size_t n = w.length();
  Truth val(n, init ? 1 : 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t j = n; j-- > 0;) {
      const char next = step(j, val[w.successor(j)]) ? 1 : 0;
      if (next != val[j]) {
        val[j] = next;
        changed = true;
      }
    }
  }
  return val;
}

Truth evaluate(const Formula& f, const LassoWord& w) {
  const std::size_t n = w.length();
  switch (f.kind()) {
    case FormulaKind::kTrue: return Truth(n, 1);
    case FormulaKind::kFalse: return Truth(n, 0);
    case FormulaKind::kAtom: {
      Truth out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = w.at(i).contains(f.atom()) ? 1 : 0;
      return out;
    }
    case FormulaKind::kNot: {
      Truth out = evaluate(f.child(), w);
      for (auto& v : out) v = !v;
      return out;
    }
    case FormulaKind::kAnd:
    case FormulaKind::kOr:
    case FormulaKind::kImplies: {
      const Truth a = evaluate(f.lhs(), w);
      const Truth b = evaluate(f.rhs(), w);
      Truth out(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (f.kind() == FormulaKind::kAnd) out[i] = a[i] && b[i];
        else if (f.kind() == FormulaKind::kOr) out[i] = a[i] || b[i];
        else out[i] = !a[i] || b[i];
      }
      return out;
    }
    case FormulaKind::kNext: {
      const Truth a = evaluate(f.child(), w);
      Truth out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = a[w.successor(i)];
      return out;
    }
    case FormulaKind::kUntil: {
      const Truth a = evaluate(f.lhs(), w);
      const Truth b = evaluate(f.rhs(), w);
      return fixpoint(w, false, [&](std::size_t i, char nx) { return b[i] || (a[i] && nx); });
    }
    case FormulaKind::kRelease: {
      const Truth a = evaluate(f.lhs(), w);
      const Truth b = evaluate(f.rhs(), w);
      return fixpoint(w, true, [&](std::size_t i, char nx) { return b[i] && (a[i] || nx); });
    }
    case FormulaKind::kEventually: {
      const Truth a = evaluate(f.child(), w);
      return fixpoint(w, false, [&](std::size_t i, char nx) { return a[i] || nx; });
    }
    case FormulaKind::kAlways: {
      const Truth a = evaluate(f.child(), w);
      return fixpoint(w, true, [&](std::size_t i, char nx) { return a[i] && nx; });
    }
  }
  return Truth(n, 0);
}

}  // namespace

bool eval_on_lasso(const Formula& f, const LassoWord& w) {
  if (w.cycle.empty()) throw InputError("lasso cycle must be nonempty");
  return evaluate(f, w)[0] != 0;
}

bool eval_propositional(const Formula& f, const Observation& letter) {
  switch (f.kind()) {
    case FormulaKind::kTrue: return true;
    case FormulaKind::kFalse: return false;
    case FormulaKind::kAtom: return letter.contains(f.atom());
    case FormulaKind::kNot: return !eval_propositional(f.child(), letter);
    case FormulaKind::kAnd:
      return eval_propositional(f.lhs(), letter) && eval_propositional(f.rhs(), letter);
    case FormulaKind::kOr:
      return eval_propositional(f.lhs(), letter) || eval_propositional(f.rhs(), letter);
    case FormulaKind::kImplies:
      return !eval_propositional(f.lhs(), letter) || eval_propositional(f.rhs(), letter);
    default:
      throw InputError("temporal operator in propositional context: " + f.to_string());
  }
}

}  // namespace rhtl
