#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "factgraph/error.hpp"

namespace factgraph::logic {

enum class Connective : std::uint8_t {
  atom,
  negation,
  implication,
  conjunction,
  disjunction,
};

/// True iff `name` matches [a-z][a-z0-9_]*.
constexpr bool is_atom_name(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

/// Immutable propositional formula. Sub-terms are shared, so copies are cheap
/// and values may be handed across threads freely. Identity is structural
/// equality; there is nothing else to compare in propositional logic.
class Formula {
 public:
  static Formula atom(std::string name) {
    if (!is_atom_name(name)) {
      throw Error(ErrorCode::syntax_error, "invalid atom name '" + name + "'");
    }
    std::size_t h = std::hash<std::string>{}(name) ^ 0x51ed27u;
    return Formula(std::make_shared<const Node>(Connective::atom, std::move(name), nullptr,
                                                nullptr, h, 1));
  }

  static Formula negation(Formula operand) { return unary(Connective::negation, std::move(operand)); }
  static Formula implication(Formula lhs, Formula rhs) {
    return binary(Connective::implication, std::move(lhs), std::move(rhs));
  }
  static Formula conjunction(Formula lhs, Formula rhs) {
    return binary(Connective::conjunction, std::move(lhs), std::move(rhs));
  }
  static Formula disjunction(Formula lhs, Formula rhs) {
    return binary(Connective::disjunction, std::move(lhs), std::move(rhs));
  }

  Connective kind() const noexcept { return node_->kind; }
  bool is_atom() const noexcept { return kind() == Connective::atom; }
  bool is_negation() const noexcept { return kind() == Connective::negation; }
  bool is_implication() const noexcept { return kind() == Connective::implication; }

  /// Atom name; empty for compound formulas.
  const std::string& name() const noexcept { return node_->name; }

  /// Sole operand of a negation, left operand of a binary connective.
  const Formula& lhs() const { return *node_->lhs; }
  const Formula& operand() const { return lhs(); }
  const Formula& rhs() const { return *node_->rhs; }

  std::size_t hash() const noexcept { return node_->hash; }

  /// Number of connective and atom occurrences.
  std::size_t size() const noexcept { return node_->size; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size ||
        a.node_->kind != b.node_->kind) {
      return false;
    }
    switch (a.kind()) {
      case Connective::atom:
        return a.name() == b.name();
      case Connective::negation:
        return a.lhs() == b.lhs();
      default:
        return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
  }

 private:
  struct Node {
    Node(Connective k, std::string n, std::shared_ptr<const Formula> l,
         std::shared_ptr<const Formula> r, std::size_t h, std::size_t s)
        : kind(k), name(std::move(n)), lhs(std::move(l)), rhs(std::move(r)), hash(h), size(s) {}
    Connective kind;
    std::string name;
    std::shared_ptr<const Formula> lhs;
    std::shared_ptr<const Formula> rhs;
    std::size_t hash;
    std::size_t size;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  }

  static Formula unary(Connective k, Formula operand) {
    std::size_t h = mix(static_cast<std::size_t>(k) * 0x100000001b3ull, operand.hash());
    std::size_t s = operand.size() + 1;
    return Formula(std::make_shared<const Node>(
        k, std::string{}, std::make_shared<const Formula>(std::move(operand)), nullptr, h, s));
  }

  static Formula binary(Connective k, Formula lhs, Formula rhs) {
    std::size_t h = mix(mix(static_cast<std::size_t>(k) * 0x100000001b3ull, lhs.hash()), rhs.hash());
    std::size_t s = lhs.size() + rhs.size() + 1;
    return Formula(std::make_shared<const Node>(k, std::string{},
                                                std::make_shared<const Formula>(std::move(lhs)),
                                                std::make_shared<const Formula>(std::move(rhs)), h,
                                                s));
  }

  std::shared_ptr<const Node> node_;
};

inline Formula atom(std::string name) { return Formula::atom(std::move(name)); }
inline Formula negation(Formula f) { return Formula::negation(std::move(f)); }
inline Formula implies(Formula a, Formula b) { return Formula::implication(std::move(a), std::move(b)); }
inline Formula conjunction(Formula a, Formula b) { return Formula::conjunction(std::move(a), std::move(b)); }
inline Formula disjunction(Formula a, Formula b) { return Formula::disjunction(std::move(a), std::move(b)); }

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Connective::atom:
      out.insert(f.name());
      return;
    case Connective::negation:
      collect_atoms(f.operand(), out);
      return;
    default:
      collect_atoms(f.lhs(), out);
      collect_atoms(f.rhs(), out);
  }
}

inline std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

}  // namespace factgraph::logic
