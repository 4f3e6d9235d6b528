#pragma once

// Linear Hilbert proofs and their translation to and from proof graphs.
//
// Text format, one line per proof line, line numbers 1-based:
//   hyp <formula>
//   ax <formula>
//   mp <i> <j>
// The last line is the conclusion.

#include <charconv>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/logic/axioms.hpp"
#include "factgraph/logic/syntax.hpp"
#include "factgraph/proof/graph.hpp"

namespace factgraph::proof {

struct HypLine {
  std::size_t hypothesis;  // index into LinearProof::hypotheses
  friend bool operator==(const HypLine&, const HypLine&) = default;
};

struct AxiomLine {
  Formula formula;
  friend bool operator==(const AxiomLine&, const AxiomLine&) = default;
};

/// Modus ponens citing two earlier lines (1-based): minor, then major.
struct MpLine {
  std::size_t minor;
  std::size_t major;
  friend bool operator==(const MpLine&, const MpLine&) = default;
};

using ProofLine = std::variant<HypLine, AxiomLine, MpLine>;

struct LinearProof {
  std::vector<Formula> hypotheses;
  std::vector<ProofLine> lines;
};

// ---------------------------------------------------------------------------
// Text format

inline LinearProof parse_linear_proof(std::string_view text) {
  LinearProof lp;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;

    auto fail = [&](const std::string& what) -> LineError {
      return LineError(ErrorCode::malformed_proof, line_no, what);
    };
    std::size_t sp = line.find(' ');
    std::string_view keyword = line.substr(0, sp);
    std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);

    if (keyword == "hyp" || keyword == "ax") {
      Formula f = [&] {
        try {
          return logic::parse_formula(rest);
        } catch (const SyntaxError& e) {
          throw fail(e.what());
        }
      }();
      if (keyword == "ax") {
        lp.lines.emplace_back(AxiomLine{std::move(f)});
        continue;
      }
      std::size_t index = lp.hypotheses.size();
      for (std::size_t i = 0; i < lp.hypotheses.size(); ++i) {
        if (lp.hypotheses[i] == f) index = i;
      }
      if (index == lp.hypotheses.size()) lp.hypotheses.push_back(std::move(f));
      lp.lines.emplace_back(HypLine{index});
    } else if (keyword == "mp") {
      std::size_t refs[2] = {0, 0};
      const char* p = rest.data();
      const char* end = rest.data() + rest.size();
      for (std::size_t k = 0; k < 2; ++k) {
        if (k == 1) {
          if (p == end || *p != ' ') throw fail("expected 'mp <i> <j>'");
          ++p;
        }
        auto [next, ec] = std::from_chars(p, end, refs[k]);
        if (ec != std::errc{} || next == p) throw fail("expected 'mp <i> <j>'");
        p = next;
      }
      if (p != end) throw fail("trailing input after 'mp <i> <j>'");
      lp.lines.emplace_back(MpLine{refs[0], refs[1]});
    } else {
      throw fail("expected 'hyp', 'ax' or 'mp', got '" + std::string(keyword) + "'");
    }
  }
  return lp;
}

inline std::string print_linear_proof(const LinearProof& lp) {
  std::string out;
  for (const ProofLine& line : lp.lines) {
    if (const auto* h = std::get_if<HypLine>(&line)) {
      out += "hyp " + logic::print_formula(lp.hypotheses.at(h->hypothesis));
    } else if (const auto* a = std::get_if<AxiomLine>(&line)) {
      out += "ax " + logic::print_formula(a->formula);
    } else {
      const auto& m = std::get<MpLine>(line);
      out += "mp " + std::to_string(m.minor) + " " + std::to_string(m.major);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Line-by-line checking

/// Throws malformed_proof (citing the line) for structural defects: no
/// lines, hypothesis indices out of range, MP lines citing themselves or
/// later lines.
inline void check_well_formed(const LinearProof& lp) {
  if (lp.lines.empty()) throw Error(ErrorCode::malformed_proof, "proof has no lines");
  for (std::size_t k = 0; k < lp.lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (const auto* h = std::get_if<HypLine>(&lp.lines[k])) {
      if (h->hypothesis >= lp.hypotheses.size()) {
        throw LineError(ErrorCode::malformed_proof, line_no, "hypothesis index out of range");
      }
    } else if (const auto* m = std::get_if<MpLine>(&lp.lines[k])) {
      for (std::size_t ref : {m->minor, m->major}) {
        if (ref == 0 || ref >= line_no) {
          throw LineError(ErrorCode::malformed_proof, line_no,
                          "mp cites line " + std::to_string(ref) + ", which is not an earlier line");
        }
      }
    }
  }
}

/// Formula asserted by each line. A failing MP line still gets a formula
/// (the consequent of whichever input is an implication) so that later lines
/// and graph import stay well defined; the line is reported invalid.
inline std::vector<Formula> line_formulas(const LinearProof& lp) {
  check_well_formed(lp);
  std::vector<Formula> out;
  out.reserve(lp.lines.size());
  for (const ProofLine& line : lp.lines) {
    if (const auto* h = std::get_if<HypLine>(&line)) {
      out.push_back(lp.hypotheses[h->hypothesis]);
    } else if (const auto* a = std::get_if<AxiomLine>(&line)) {
      out.push_back(a->formula);
    } else {
      const auto& m = std::get<MpLine>(line);
      const Formula& minor = out[m.minor - 1];
      const Formula& major = out[m.major - 1];
      if (auto c = modus_ponens_either_way(minor, major)) {
        out.push_back(*c);
      } else if (major.is_implication()) {
        out.push_back(major.rhs());
      } else if (minor.is_implication()) {
        out.push_back(minor.rhs());
      } else {
        out.push_back(major);
      }
    }
  }
  return out;
}

struct LinearCheck {
  bool valid = true;
  /// 1-based line of the first defect.
  std::size_t failed_line = 0;
  Verdict verdict;
  std::vector<Formula> formulas;

  const Formula& conclusion() const { return formulas.back(); }
};

/// Checks every line independently of any graph: axiom lines must instantiate
/// a schema, MP lines must be correct applications.
inline LinearCheck check_linear_proof(const LinearProof& lp) {
  LinearCheck result;
  result.formulas = line_formulas(lp);
  for (std::size_t k = 0; k < lp.lines.size() && result.valid; ++k) {
    Verdict v;
    if (const auto* a = std::get_if<AxiomLine>(&lp.lines[k])) {
      v = check_truism(a->formula);
    } else if (const auto* m = std::get_if<MpLine>(&lp.lines[k])) {
      const Formula& minor = result.formulas[m->minor - 1];
      const Formula& major = result.formulas[m->major - 1];
      if (!modus_ponens_either_way(minor, major)) {
        try {
          logic::apply_modus_ponens(minor, major);
        } catch (const Error& e) {
          v = Verdict::fail(e.code() == ErrorCode::not_implication ? FailureReason::no_implication
                                                                   : FailureReason::antecedent_mismatch,
                            e.what());
        }
      }
    }
    if (!v.valid()) {
      result.valid = false;
      result.failed_line = k + 1;
      result.verdict = std::move(v);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Graph translation

struct ImportResult {
  NodeId root;
  /// Every node created, in creation order.
  std::vector<NodeId> created;
  /// Node carrying each line; empty for axiom lines, which only exist as
  /// truisms inlined into the nodes that consume them.
  std::vector<std::optional<NodeId>> line_nodes;
};

/// Translates a linear proof into proposition nodes (one per distinct
/// hypothesis) and proof nodes (one per MP line). Axiom lines become inline
/// truisms of the consuming node, so every node has at most two premises and
/// two truisms regardless of proof length. The root verifies iff every MP
/// line is a correct application.
template <NodeSink Sink>
ImportResult import_linear_proof(const LinearProof& lp, Sink& sink, Role hypothesis_role = Role::data) {
  const std::vector<Formula> formulas = line_formulas(lp);
  if (std::holds_alternative<AxiomLine>(lp.lines.back())) {
    throw LineError(ErrorCode::malformed_proof, lp.lines.size(),
                    "the conclusion is a bare axiom line; no proof node can carry it");
  }

  ImportResult result;
  result.line_nodes.resize(lp.lines.size());
  std::vector<std::optional<NodeId>> hypothesis_nodes(lp.hypotheses.size());
  for (std::size_t i = 0; i < lp.hypotheses.size(); ++i) {
    bool duplicate = false;
    for (std::size_t j = 0; j < i && !duplicate; ++j) {
      if (lp.hypotheses[j] == lp.hypotheses[i]) {
        hypothesis_nodes[i] = hypothesis_nodes[j];
        duplicate = true;
      }
    }
    if (duplicate) continue;
    NodeId id = sink.add_node(PropositionNode{lp.hypotheses[i], hypothesis_role});
    hypothesis_nodes[i] = id;
    result.created.push_back(id);
  }

  for (std::size_t k = 0; k < lp.lines.size(); ++k) {
    const ProofLine& line = lp.lines[k];
    if (const auto* h = std::get_if<HypLine>(&line)) {
      result.line_nodes[k] = hypothesis_nodes[h->hypothesis];
    } else if (const auto* m = std::get_if<MpLine>(&line)) {
      ProofNode node{{}, {}, formulas[k]};
      for (std::size_t ref : {m->minor, m->major}) {
        if (const auto& id = result.line_nodes[ref - 1]) {
          node.premises.push_back(*id);
        } else {
          node.truisms.push_back(formulas[ref - 1]);
        }
      }
      NodeId id = sink.add_node(std::move(node));
      result.line_nodes[k] = id;
      result.created.push_back(id);
    }
  }
  result.root = *result.line_nodes.back();
  return result;
}

/// Linearizes the verified derivation under `root` in dependency order.
/// Throws invalid_graph when the derivation does not verify.
template <NodeLookup G>
LinearProof export_linear_proof(const G& graph, NodeId root) {
  const DerivationReport report = verify_derivation(graph, root);
  if (!report.valid) {
    std::size_t bad = *report.first_invalid();
    throw Error(ErrorCode::invalid_graph,
                "derivation under node " + std::to_string(root.value) + " fails at node " +
                    std::to_string(report.steps[bad].node.value) + ": " +
                    report.steps[bad].verdict.detail);
  }

  LinearProof lp;
  lp.hypotheses = report.hypotheses;
  auto hypothesis_index = [&](const Formula& f) {
    for (std::size_t i = 0; i < lp.hypotheses.size(); ++i) {
      if (lp.hypotheses[i] == f) return i;
    }
    throw Error(ErrorCode::internal, "hypothesis missing from report");
  };

  for (const Step& step : report.steps) {
    switch (step.kind) {
      case StepKind::hypothesis:
        lp.lines.emplace_back(HypLine{hypothesis_index(step.formula)});
        break;
      case StepKind::truism:
        lp.lines.emplace_back(AxiomLine{step.formula});
        break;
      case StepKind::modus_ponens: {
        std::size_t a = step.inputs.at(0);
        std::size_t b = step.inputs.at(1);
        const Formula& fb = report.steps[b].formula;
        // Emit as (minor, major).
        bool b_is_major = fb.is_implication() && fb.lhs() == report.steps[a].formula;
        lp.lines.emplace_back(b_is_major ? MpLine{a + 1, b + 1} : MpLine{b + 1, a + 1});
        break;
      }
    }
  }
  return lp;
}

}  // namespace factgraph::proof
