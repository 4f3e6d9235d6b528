#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/logic/formula.hpp"

namespace factgraph::logic {

using Assignment = std::map<std::string, bool, std::less<>>;

/// Classical truth value of `f` under `a`. Throws missing_atom when `a` does
/// not cover an atom of `f`.
inline bool eval_formula(const Formula& f, const Assignment& a) {
  switch (f.kind()) {
    case Connective::atom: {
      auto it = a.find(f.name());
      if (it == a.end()) {
        throw Error(ErrorCode::missing_atom, "assignment has no value for atom '" + f.name() + "'",
                    f.name());
      }
      return it->second;
    }
    case Connective::negation:
      return !eval_formula(f.operand(), a);
    case Connective::implication:
      return !eval_formula(f.lhs(), a) || eval_formula(f.rhs(), a);
    case Connective::conjunction:
      return eval_formula(f.lhs(), a) && eval_formula(f.rhs(), a);
    case Connective::disjunction:
      return eval_formula(f.lhs(), a) || eval_formula(f.rhs(), a);
  }
  return false;
}

inline constexpr std::size_t default_atom_cap = 20;

namespace detail {

// Postfix program over atom indices, evaluated 64 assignments at a time: bit k
// of each word is the value under the k-th assignment of the current block.
struct TruthTableProgram {
  enum class Op : std::uint8_t { load, negate, implies, conj, disj };
  struct Instr {
    Op op;
    std::uint32_t atom = 0;
  };
  std::vector<Instr> code;

  static void compile(const Formula& f, const std::map<std::string, std::uint32_t, std::less<>>& index,
                      std::vector<Instr>& out) {
    switch (f.kind()) {
      case Connective::atom:
        out.push_back({Op::load, index.find(f.name())->second});
        return;
      case Connective::negation:
        compile(f.operand(), index, out);
        out.push_back({Op::negate});
        return;
      case Connective::implication:
      case Connective::conjunction:
      case Connective::disjunction:
        compile(f.lhs(), index, out);
        compile(f.rhs(), index, out);
        out.push_back({f.kind() == Connective::implication   ? Op::implies
                       : f.kind() == Connective::conjunction ? Op::conj
                                                             : Op::disj});
        return;
    }
  }

  std::uint64_t run(std::span<const std::uint64_t> atoms, std::vector<std::uint64_t>& stack) const {
    stack.clear();
    for (const Instr& in : code) {
      switch (in.op) {
        case Op::load:
          stack.push_back(atoms[in.atom]);
          break;
        case Op::negate:
          stack.back() = ~stack.back();
          break;
        default: {
          std::uint64_t rhs = stack.back();
          stack.pop_back();
          std::uint64_t& lhs = stack.back();
          if (in.op == Op::implies) lhs = ~lhs | rhs;
          else if (in.op == Op::conj) lhs &= rhs;
          else lhs |= rhs;
        }
      }
    }
    return stack.back();
  }
};

}  // namespace detail

/// Semantic entailment by exhaustive truth-table enumeration: true iff every
/// assignment satisfying all hypotheses satisfies `goal`. Refuses (rather than
/// answering false) when the inputs mention more than `atom_cap` atoms.
inline bool entails(std::span<const Formula> hypotheses, const Formula& goal,
                    std::size_t atom_cap = default_atom_cap) {
  std::set<std::string> names = atoms_of(goal);
  for (const Formula& h : hypotheses) collect_atoms(h, names);
  if (names.size() > atom_cap || names.size() > 63) {
    throw Error(ErrorCode::atom_cap_exceeded,
                "entailment oracle needs " + std::to_string(names.size()) +
                    " atoms, cap is " + std::to_string(atom_cap));
  }

  std::map<std::string, std::uint32_t, std::less<>> index;
  for (const auto& n : names) index.emplace(n, static_cast<std::uint32_t>(index.size()));

  auto compile = [&](const Formula& f) {
    detail::TruthTableProgram p;
    detail::TruthTableProgram::compile(f, index, p.code);
    return p;
  };
  std::vector<detail::TruthTableProgram> hyps;
  hyps.reserve(hypotheses.size());
  for (const Formula& h : hypotheses) hyps.push_back(compile(h));
  const detail::TruthTableProgram target = compile(goal);

  // The low six atoms vary inside a word; the rest are constant per block.
  static constexpr std::uint64_t lane_patterns[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
  };
  const std::size_t n = names.size();
  const std::size_t lanes = n < 6 ? n : 6;
  const std::uint64_t live = n < 6 ? ((std::uint64_t{1} << (std::uint64_t{1} << n)) - 1) : ~std::uint64_t{0};
  const std::uint64_t blocks = n > 6 ? (std::uint64_t{1} << (n - 6)) : 1;

  std::vector<std::uint64_t> words(n);
  std::vector<std::uint64_t> stack;
  for (std::size_t i = 0; i < lanes; ++i) words[i] = lane_patterns[i];
  for (std::uint64_t block = 0; block < blocks; ++block) {
    for (std::size_t i = 6; i < n; ++i) words[i] = ((block >> (i - 6)) & 1u) ? ~std::uint64_t{0} : 0;
    std::uint64_t satisfying = live;
    for (const auto& h : hyps) {
      satisfying &= h.run(words, stack);
      if (satisfying == 0) break;
    }
    if (satisfying == 0) continue;
    if ((satisfying & ~target.run(words, stack)) != 0) return false;
  }
  return true;
}

inline bool entails(std::initializer_list<Formula> hypotheses, const Formula& goal,
                    std::size_t atom_cap = default_atom_cap) {
  return entails(std::span<const Formula>(hypotheses.begin(), hypotheses.size()), goal, atom_cap);
}

/// Tautology check; shorthand for entails({}, f).
inline bool is_tautology(const Formula& f, std::size_t atom_cap = default_atom_cap) {
  return entails(std::span<const Formula>{}, f, atom_cap);
}

}  // namespace factgraph::logic
