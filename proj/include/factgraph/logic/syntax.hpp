#pragma once

// Concrete syntax for formulas.
//
//   formula := impl
//   impl    := disj ("->" impl)?
//   disj    := conj ("|" conj)*
//   conj    := neg ("&" neg)*
//   neg     := "!" neg | "(" formula ")" | atom
//   atom    := [a-z][a-z0-9_]*
//
// Whitespace is insignificant between tokens. `->` associates to the right,
// `|` and `&` to the left.

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "factgraph/error.hpp"
#include "factgraph/logic/formula.hpp"

namespace factgraph::logic {

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = implication();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  Formula implication() {
    Formula lhs = disjunction();
    if (accept("->")) return implies(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conj();
    while (accept("|")) f = logic::disjunction(std::move(f), conj());
    return f;
  }

  Formula conj() {
    Formula f = neg();
    while (accept("&")) f = conjunction(std::move(f), neg());
    return f;
  }

  Formula neg() {
    if (accept("!")) return negation(neg());
    if (accept("(")) {
      Formula f = implication();
      if (!accept(")")) fail("expected ')'");
      return f;
    }
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c < 'a' || c > 'z') fail(std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    return atom(std::string(text_.substr(start, pos_ - start)));
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& what) {
    skip_ws();
    throw SyntaxError(pos_, what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Binding strength: higher binds tighter.
constexpr int precedence(Connective c) {
  switch (c) {
    case Connective::implication: return 1;
    case Connective::disjunction: return 2;
    case Connective::conjunction: return 3;
    default: return 4;
  }
}

inline void print_into(const Formula& f, int min_prec, std::string& out) {
  const int prec = precedence(f.kind());
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (f.kind()) {
    case Connective::atom:
      out += f.name();
      break;
    case Connective::negation:
      out += '!';
      print_into(f.operand(), 4, out);
      break;
    case Connective::implication:
      print_into(f.lhs(), prec + 1, out);
      out += " -> ";
      print_into(f.rhs(), prec, out);
      break;
    case Connective::disjunction:
    case Connective::conjunction:
      print_into(f.lhs(), prec, out);
      out += f.kind() == Connective::conjunction ? " & " : " | ";
      print_into(f.rhs(), prec + 1, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

/// Parses formula text; throws SyntaxError carrying the byte offset.
inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

/// Canonical rendering with the fewest parentheses that still parse back to
/// the same tree.
inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_into(f, 0, out);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << print_formula(f); }

}  // namespace factgraph::logic
