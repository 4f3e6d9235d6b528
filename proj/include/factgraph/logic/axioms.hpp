#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "factgraph/error.hpp"
#include "factgraph/logic/formula.hpp"
#include "factgraph/logic/syntax.hpp"

namespace factgraph::logic {

// Hilbert system over {!, ->} with modus ponens as the only rule:
//   A1  a -> (b -> a)
//   A2  (a -> (b -> c)) -> ((a -> b) -> (a -> c))
//   A3  (!a -> !b) -> (b -> a)
enum class SchemaId { a1, a2, a3 };

constexpr std::string_view to_string(SchemaId id) {
  switch (id) {
    case SchemaId::a1: return "A1";
    case SchemaId::a2: return "A2";
    case SchemaId::a3: return "A3";
  }
  return "?";
}

/// Metavariable name -> formula it stands for.
using Substitution = std::map<std::string, Formula, std::less<>>;

struct AxiomSchema {
  SchemaId id;
  /// Every atom of the pattern is a metavariable (alpha, beta, gamma).
  Formula pattern;
};

inline const std::array<AxiomSchema, 3>& axiom_schemas() {
  static const std::array<AxiomSchema, 3> schemas = {
      AxiomSchema{SchemaId::a1, parse_formula("alpha -> beta -> alpha")},
      AxiomSchema{SchemaId::a2,
                  parse_formula("(alpha -> beta -> gamma) -> (alpha -> beta) -> alpha -> gamma")},
      AxiomSchema{SchemaId::a3, parse_formula("(!alpha -> !beta) -> beta -> alpha")},
  };
  return schemas;
}

inline const AxiomSchema& axiom_schema(SchemaId id) {
  return axiom_schemas()[static_cast<std::size_t>(id)];
}

/// Replaces every metavariable of `pattern` by its binding. Unbound
/// metavariables are an error.
inline Formula instantiate(const Formula& pattern, const Substitution& subst) {
  switch (pattern.kind()) {
    case Connective::atom: {
      auto it = subst.find(pattern.name());
      if (it == subst.end()) {
        throw Error(ErrorCode::missing_atom, "unbound metavariable '" + pattern.name() + "'");
      }
      return it->second;
    }
    case Connective::negation:
      return negation(instantiate(pattern.operand(), subst));
    case Connective::implication:
      return implies(instantiate(pattern.lhs(), subst), instantiate(pattern.rhs(), subst));
    case Connective::conjunction:
      return conjunction(instantiate(pattern.lhs(), subst), instantiate(pattern.rhs(), subst));
    case Connective::disjunction:
      return disjunction(instantiate(pattern.lhs(), subst), instantiate(pattern.rhs(), subst));
  }
  throw Error(ErrorCode::internal, "unreachable connective");
}

inline Formula instantiate(SchemaId id, const Substitution& subst) {
  return instantiate(axiom_schema(id).pattern, subst);
}

/// One-sided matching: binds pattern metavariables so that the pattern
/// becomes `f`. Repeated metavariables must bind to equal formulas.
inline bool match_pattern(const Formula& pattern, const Formula& f, Substitution& subst) {
  if (pattern.is_atom()) {
    auto [it, inserted] = subst.try_emplace(pattern.name(), f);
    return inserted || it->second == f;
  }
  if (pattern.kind() != f.kind()) return false;
  if (pattern.is_negation()) return match_pattern(pattern.operand(), f.operand(), subst);
  return match_pattern(pattern.lhs(), f.lhs(), subst) && match_pattern(pattern.rhs(), f.rhs(), subst);
}

struct AxiomMatch {
  SchemaId schema;
  Substitution substitution;
};

/// First schema (A1, A2, A3 in that order) that `f` instantiates.
inline std::optional<AxiomMatch> is_axiom_instance(const Formula& f) {
  for (const AxiomSchema& s : axiom_schemas()) {
    Substitution subst;
    if (match_pattern(s.pattern, f, subst)) return AxiomMatch{s.id, std::move(subst)};
  }
  return std::nullopt;
}

/// From `minor` and `major` = minor -> c, concludes c.
inline Formula apply_modus_ponens(const Formula& minor, const Formula& major) {
  if (!major.is_implication()) {
    throw Error(ErrorCode::not_implication,
                "major premise '" + print_formula(major) + "' is not an implication");
  }
  if (!(major.lhs() == minor)) {
    throw Error(ErrorCode::antecedent_mismatch, "antecedent of '" + print_formula(major) +
                                                    "' does not match '" + print_formula(minor) + "'");
  }
  return major.rhs();
}

}  // namespace factgraph::logic
