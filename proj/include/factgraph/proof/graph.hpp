#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/ids.hpp"
#include "factgraph/logic/axioms.hpp"
#include "factgraph/logic/formula.hpp"
#include "factgraph/logic/syntax.hpp"

namespace factgraph::proof {

using logic::Formula;

/// Data records measurements; explanatory propositions try to predict them.
enum class Role { data, explanatory };

constexpr std::string_view to_string(Role r) { return r == Role::data ? "data" : "explanatory"; }

inline std::optional<Role> parse_role(std::string_view s) {
  if (s == "data") return Role::data;
  if (s == "explanatory") return Role::explanatory;
  return std::nullopt;
}

/// Introduces a single formula as an assumption.
struct PropositionNode {
  Formula formula;
  Role role = Role::data;

  friend bool operator==(const PropositionNode&, const PropositionNode&) = default;
};

/// One modus ponens step. Inputs are the resolved premises followed by the
/// inline truisms; there must be exactly two of them. A premise may be a
/// proposition node or an earlier proof node, whose formula is its conclusion.
struct ProofNode {
  std::vector<NodeId> premises;
  std::vector<Formula> truisms;
  Formula conclusion;

  friend bool operator==(const ProofNode&, const ProofNode&) = default;
};

inline constexpr std::size_t max_truisms = 2;
inline constexpr std::size_t modus_ponens_arity = 2;

using GraphNode = std::variant<PropositionNode, ProofNode>;

/// Formula a node contributes when cited as a premise.
inline const Formula& formula_of(const GraphNode& node) {
  if (const auto* p = std::get_if<PropositionNode>(&node)) return p->formula;
  return std::get<ProofNode>(node).conclusion;
}

/// Anything that can look nodes up by id: a standalone ProofGraph or a store
/// snapshot. Returns nullptr for ids that are not logical nodes.
template <class G>
concept NodeLookup = requires(const G& g, NodeId id) {
  { g.find_node(id) } -> std::convertible_to<const GraphNode*>;
};

/// Anything that can accept freshly built nodes and assign them ids.
template <class S>
concept NodeSink = requires(S& s, PropositionNode p, ProofNode q) {
  { s.add_node(std::move(p)) } -> std::same_as<NodeId>;
  { s.add_node(std::move(q)) } -> std::same_as<NodeId>;
};

/// In-memory proof graph. Ids are handed out sequentially starting at 1, so
/// nodes added through add_node only ever cite smaller ids; insert() allows
/// arbitrary shapes, cycles included.
class ProofGraph {
 public:
  NodeId add_node(PropositionNode node) { return push(GraphNode(std::move(node))); }
  NodeId add_node(ProofNode node) { return push(GraphNode(std::move(node))); }

  void insert(NodeId id, GraphNode node) {
    nodes_.insert_or_assign(id, std::move(node));
    if (id.value >= next_) next_ = id.value + 1;
  }

  const GraphNode* find_node(NodeId id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  GraphNode* find_node(NodeId id) {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

 private:
  NodeId push(GraphNode node) {
    NodeId id{next_++};
    nodes_.emplace(id, std::move(node));
    return id;
  }

  std::map<NodeId, GraphNode> nodes_;
  std::uint64_t next_ = 1;
};

// ---------------------------------------------------------------------------
// Single-node verification

enum class FailureReason {
  none,
  wrong_arity,
  truism_not_axiom,
  no_implication,
  antecedent_mismatch,
  conclusion_mismatch,
};

constexpr std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::wrong_arity: return "wrong_arity";
    case FailureReason::truism_not_axiom: return "truism_not_axiom";
    case FailureReason::no_implication: return "no_implication";
    case FailureReason::antecedent_mismatch: return "antecedent_mismatch";
    case FailureReason::conclusion_mismatch: return "conclusion_mismatch";
  }
  return "none";
}

struct Verdict {
  FailureReason reason = FailureReason::none;
  std::string detail;

  bool valid() const noexcept { return reason == FailureReason::none; }

  static Verdict ok() { return {}; }
  static Verdict fail(FailureReason r, std::string detail) { return {r, std::move(detail)}; }
};

/// Resolves a premise id to the formula it stands for, or nullopt.
using Resolver = std::function<std::optional<Formula>(NodeId)>;

/// Conclusion of modus ponens on an unordered pair of inputs, if one input is
/// an implication whose antecedent is the other. At most one orientation can
/// succeed: a = (b -> c) and b = (a -> c) would make a a proper subterm of
/// itself.
inline std::optional<Formula> modus_ponens_either_way(const Formula& a, const Formula& b) {
  if (b.is_implication() && b.lhs() == a) return b.rhs();
  if (a.is_implication() && a.lhs() == b) return a.rhs();
  return std::nullopt;
}

inline Verdict check_truism(const Formula& truism) {
  if (logic::is_axiom_instance(truism)) return Verdict::ok();
  return Verdict::fail(FailureReason::truism_not_axiom,
                       "'" + logic::print_formula(truism) + "' is not an instance of A1, A2 or A3");
}

/// Checks the two inputs of `node` against its conclusion. Throws
/// dangling_reference if a premise cannot be resolved.
inline Verdict verify_modus_ponens(const ProofNode& node, std::span<const Formula> inputs) {
  using logic::print_formula;
  if (inputs.size() != modus_ponens_arity || node.truisms.size() > max_truisms) {
    return Verdict::fail(FailureReason::wrong_arity,
                         "modus ponens needs exactly two inputs, node has " +
                             std::to_string(inputs.size()));
  }
  for (const Formula& t : node.truisms) {
    if (Verdict v = check_truism(t); !v.valid()) return v;
  }
  const Formula& a = inputs[0];
  const Formula& b = inputs[1];
  if (!a.is_implication() && !b.is_implication()) {
    return Verdict::fail(FailureReason::no_implication,
                         "neither '" + print_formula(a) + "' nor '" + print_formula(b) +
                             "' is an implication");
  }
  if (auto c = modus_ponens_either_way(a, b)) {
    if (*c == node.conclusion) return Verdict::ok();
    return Verdict::fail(FailureReason::conclusion_mismatch,
                         "inputs yield '" + print_formula(*c) + "', node concludes '" +
                             print_formula(node.conclusion) + "'");
  }
  // Blame the antecedent when some implication already ends in the conclusion.
  for (const Formula* f : {&a, &b}) {
    if (f->is_implication() && f->rhs() == node.conclusion) {
      const Formula& other = f == &a ? b : a;
      return Verdict::fail(FailureReason::antecedent_mismatch,
                           "antecedent of '" + print_formula(*f) + "' does not match '" +
                               print_formula(other) + "'");
    }
  }
  return Verdict::fail(FailureReason::antecedent_mismatch,
                       "no input is an implication from the other input");
}

inline std::vector<Formula> resolve_inputs(const ProofNode& node, const Resolver& resolve) {
  std::vector<Formula> inputs;
  inputs.reserve(node.premises.size() + node.truisms.size());
  for (NodeId id : node.premises) {
    auto f = resolve(id);
    if (!f) {
      throw Error(ErrorCode::dangling_reference,
                  "premise " + std::to_string(id.value) + " does not resolve to a node", "premises");
    }
    inputs.push_back(std::move(*f));
  }
  for (const Formula& t : node.truisms) inputs.push_back(t);
  return inputs;
}

inline Verdict verify_proof_node(const ProofNode& node, const Resolver& resolve) {
  std::vector<Formula> inputs = resolve_inputs(node, resolve);
  return verify_modus_ponens(node, inputs);
}

// ---------------------------------------------------------------------------
// Whole-derivation verification

enum class StepKind { hypothesis, truism, modus_ponens };

constexpr std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::hypothesis: return "hypothesis";
    case StepKind::truism: return "truism";
    case StepKind::modus_ponens: return "modus_ponens";
  }
  return "?";
}

/// One line of the derivation as the verifier saw it. Steps come in
/// dependency order, so they read as a linear Hilbert proof: each proof node
/// contributes its truisms and then its modus ponens step.
struct Step {
  NodeId node;
  StepKind kind;
  Formula formula;
  Verdict verdict;
  /// For modus_ponens steps: indices (into DerivationReport::steps) of the
  /// two inputs, premises first.
  std::vector<std::size_t> inputs;
};

struct DerivationReport {
  NodeId root;
  Formula conclusion;
  std::vector<Step> steps;
  /// Distinct formulas of the proposition nodes reached from the root.
  std::vector<Formula> hypotheses;
  bool valid = true;

  /// Index of the first failing step, if any.
  std::optional<std::size_t> first_invalid() const {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (!steps[i].verdict.valid()) return i;
    }
    return std::nullopt;
  }
};

namespace detail {

template <NodeLookup G>
class DerivationWalker {
 public:
  DerivationWalker(const G& graph, DerivationReport& report) : graph_(graph), report_(report) {}

  std::size_t visit(NodeId id) {
    if (auto it = done_.find(id); it != done_.end()) return it->second;
    if (on_path_.contains(id)) {
      throw Error(ErrorCode::cycle_detected,
                  "premise cycle through node " + std::to_string(id.value), std::to_string(id.value));
    }
    const GraphNode* node = graph_.find_node(id);
    if (!node) {
      throw Error(ErrorCode::dangling_reference,
                  "node " + std::to_string(id.value) + " does not exist", std::to_string(id.value));
    }

    std::size_t index;
    if (const auto* prop = std::get_if<PropositionNode>(node)) {
      index = emit({id, StepKind::hypothesis, prop->formula, Verdict::ok(), {}});
      if (seen_hypotheses_.insert(prop->formula).second) report_.hypotheses.push_back(prop->formula);
    } else {
      const auto& pn = std::get<ProofNode>(*node);
      on_path_.insert(id);
      std::vector<std::size_t> inputs;
      std::vector<Formula> formulas;
      for (NodeId premise : pn.premises) {
        std::size_t k = visit(premise);
        inputs.push_back(k);
        formulas.push_back(report_.steps[k].formula);
      }
      on_path_.erase(id);
      for (const Formula& t : pn.truisms) {
        inputs.push_back(emit({id, StepKind::truism, t, check_truism(t), {}}));
        formulas.push_back(t);
      }
      Verdict v = verify_modus_ponens(pn, formulas);
      index = emit({id, StepKind::modus_ponens, pn.conclusion, std::move(v), std::move(inputs)});
    }
    done_.emplace(id, index);
    return index;
  }

 private:
  std::size_t emit(Step step) {
    if (!step.verdict.valid()) report_.valid = false;
    report_.steps.push_back(std::move(step));
    return report_.steps.size() - 1;
  }

  const G& graph_;
  DerivationReport& report_;
  std::unordered_map<NodeId, std::size_t> done_;
  std::unordered_set<NodeId> on_path_;
  std::unordered_set<Formula, logic::FormulaHash> seen_hypotheses_;
};

}  // namespace detail

/// Walks the premise DAG under `root` and checks every proof node on it.
/// The derivation is valid iff every step is. Throws cycle_detected naming a
/// node on the cycle, or dangling_reference for premises that resolve to
/// nothing.
template <NodeLookup G>
DerivationReport verify_derivation(const G& graph, NodeId root) {
  const GraphNode* node = graph.find_node(root);
  if (!node) {
    throw Error(ErrorCode::not_a_node, "node " + std::to_string(root.value) + " does not exist",
                "root");
  }
  DerivationReport report{root, formula_of(*node), {}, {}, true};
  detail::DerivationWalker<G>(graph, report).visit(root);
  return report;
}

/// Resolver backed by any NodeLookup.
template <NodeLookup G>
Resolver resolver_for(const G& graph) {
  return [&graph](NodeId id) -> std::optional<Formula> {
    if (const GraphNode* n = graph.find_node(id)) return formula_of(*n);
    return std::nullopt;
  };
}

}  // namespace factgraph::proof
