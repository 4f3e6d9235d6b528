#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "factgraph/logic/axioms.hpp"
#include "factgraph/proof/graph.hpp"
#include "generators.hpp"

namespace factgraph::testkit {

enum class Corruption { conclusion, truism, premise };

inline const char* to_string(Corruption c) {
  switch (c) {
    case Corruption::conclusion: return "conclusion";
    case Corruption::truism: return "truism";
    case Corruption::premise: return "premise";
  }
  return "?";
}

/// Changes exactly one field of one proof node reachable in `report` so that
/// its value really differs: a different conclusion, a different truism
/// (half the time another axiom instance), or a premise redirected to a node
/// with a different formula or to an id that does not exist. Returns nullopt
/// when the derivation has no proof node to corrupt.
inline std::optional<Corruption> perturb(proof::ProofGraph& graph, const proof::DerivationReport& report, std::mt19937_64& rng) {
  FormulaGen gen(rng, 4);
  std::vector<NodeId> proof_nodes;
  for (const auto& step : report.steps) {
    if (step.kind == proof::StepKind::modus_ponens) proof_nodes.push_back(step.node);
  }
  if (proof_nodes.empty()) return std::nullopt;
  auto& node = std::get<proof::ProofNode>(*graph.find_node(proof_nodes[gen.pick(proof_nodes.size())]));

  std::vector<Corruption> options = {Corruption::conclusion};
  if (!node.truisms.empty()) options.push_back(Corruption::truism);
  if (!node.premises.empty()) options.push_back(Corruption::premise);
  const Corruption kind = options[gen.pick(options.size())];

  auto different_from = [&](const logic::Formula& old) {
    while (true) {
      logic::Formula f = gen.coin(0.3) ? logic::negation(old) : gen.formula(3, false);
      if (!(f == old)) return f;
    }
  };

  switch (kind) {
    case Corruption::conclusion:
      node.conclusion = different_from(node.conclusion);
      break;
    case Corruption::truism: {
      logic::Formula& t = node.truisms[gen.pick(node.truisms.size())];
      if (gen.coin(0.5)) {
        logic::Formula old = t;
        while (t == old) {
          t = logic::instantiate(static_cast<logic::SchemaId>(gen.pick(3)),
                                 {{"alpha", gen.formula(2, false)},
                                  {"beta", gen.formula(2, false)},
                                  {"gamma", gen.formula(2, false)}});
        }
      } else {
        t = different_from(t);
      }
      break;
    }
    case Corruption::premise: {
      NodeId& ref = node.premises[gen.pick(node.premises.size())];
      const logic::Formula old = proof::formula_of(*graph.find_node(ref));
      std::vector<NodeId> candidates;
      for (const auto& [id, other] : graph) {
        if (!(proof::formula_of(other) == old)) candidates.push_back(id);
      }
      if (candidates.empty() || gen.coin(0.2)) {
        ref = NodeId{graph.size() + 1000};
      } else {
        ref = candidates[gen.pick(candidates.size())];
      }
      break;
    }
  }
  return kind;
}

}  // namespace factgraph::testkit
