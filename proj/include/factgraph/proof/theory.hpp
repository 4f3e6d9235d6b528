#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/ids.hpp"
#include "factgraph/logic/formula.hpp"
#include "factgraph/proof/graph.hpp"

namespace factgraph::proof {

/// A named set of proposition nodes. Theories need not be consistent with
/// one another; the store holds all of them side by side.
struct Theory {
  TheoryId id;
  std::string name;
  std::vector<NodeId> members;

  friend bool operator==(const Theory&, const Theory&) = default;
};

struct TheoryMember {
  NodeId node;
  Formula formula;
};

struct ConsistencyVerdict {
  /// Set iff the theory holds some f together with !f: (f, !f).
  std::optional<std::pair<TheoryMember, TheoryMember>> witness;

  bool consistent() const noexcept { return !witness.has_value(); }
};

/// Syntactic consistency: inconsistent iff some member is structurally the
/// negation of another. The witness is the first negated member, in member
/// order, whose operand is also a member.
inline ConsistencyVerdict check_consistency(std::span<const TheoryMember> members) {
  std::unordered_map<Formula, std::size_t, logic::FormulaHash> positions;
  for (std::size_t i = 0; i < members.size(); ++i) positions.try_emplace(members[i].formula, i);
  for (const TheoryMember& m : members) {
    if (!m.formula.is_negation()) continue;
    if (auto it = positions.find(m.formula.operand()); it != positions.end()) {
      return {std::make_pair(members[it->second], m)};
    }
  }
  return {};
}

/// Resolves the theory's members through `graph`; members must be
/// proposition nodes.
template <NodeLookup G>
ConsistencyVerdict check_consistency(const Theory& theory, const G& graph) {
  std::vector<TheoryMember> members;
  members.reserve(theory.members.size());
  for (NodeId id : theory.members) {
    const GraphNode* node = graph.find_node(id);
    const auto* prop = node ? std::get_if<PropositionNode>(node) : nullptr;
    if (!prop) {
      throw Error(ErrorCode::unknown_member,
                  "theory member " + std::to_string(id.value) + " is not a proposition node",
                  "members");
    }
    members.push_back({id, prop->formula});
  }
  return check_consistency(members);
}

}  // namespace factgraph::proof
