#pragma once

// JSON shapes of the service responses. The CLI's --format json output uses
// the same shapes.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "factgraph/error.hpp"
#include "factgraph/logic/semantics.hpp"
#include "factgraph/logic/syntax.hpp"
#include "factgraph/proof/graph.hpp"
#include "factgraph/proof/theory.hpp"
#include "factgraph/query/arguments.hpp"
#include "factgraph/store/codec.hpp"

namespace factgraph::service {

using nlohmann::json;

inline json error_to_json(ErrorCode code, std::string_view message, std::string_view field = {}) {
  json err = {{"code", to_string(code)}, {"message", message}};
  err["field"] = field.empty() ? json(nullptr) : json(field);
  return {{"error", std::move(err)}};
}

inline json error_to_json(const Error& e) {
  if (const auto* le = dynamic_cast<const LineError*>(&e)) {
    json j = error_to_json(e.code(), e.what(), e.field().empty() ? "line" : e.field());
    j["error"]["line"] = le->line();
    return j;
  }
  return error_to_json(e.code(), e.what(), e.field());
}

inline json user_to_json(const store::User& u) {
  return {{"id", u.id.value}, {"handle", u.handle}, {"authoritative", u.authoritative}};
}

/// Message record: the stored fields plus creation time and current hotness.
inline json message_record(const store::StoreState& snap, const store::Message& m) {
  json j = store::message_to_json(m);
  j["created_at"] = m.created_at;
  j["hotness"] = snap.aggregate_hotness(m.id);
  return j;
}

inline json listing_to_json(const query::ArgumentListing& l) {
  json entries = json::array();
  for (const auto& e : l.entries) {
    entries.push_back({{"id", e.id.value}, {"hotness", e.hotness}, {"authoritative", e.authoritative}});
  }
  return {{"target", l.target.value}, {"polarity", store::polarity_to_json(l.polarity)}, {"entries", entries}};
}

/// Steps are numbered from 1 in the output, like linear-proof lines.
/// `oracle_entailed` is the truth-table check of hypotheses against the
/// conclusion, null when the atom count exceeds `atom_cap`.
inline json report_to_json(const proof::DerivationReport& r, std::size_t atom_cap = logic::default_atom_cap) {
  json steps = json::array();
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const proof::Step& s = r.steps[i];
    json inputs = json::array();
    for (std::size_t k : s.inputs) inputs.push_back(k + 1);
    json step = {{"step", i + 1},
                 {"node", s.node.value},
                 {"kind", to_string(s.kind)},
                 {"formula", logic::print_formula(s.formula)},
                 {"valid", s.verdict.valid()},
                 {"inputs", inputs}};
    if (!s.verdict.valid()) {
      step["reason"] = to_string(s.verdict.reason);
      step["detail"] = s.verdict.detail;
    }
    steps.push_back(std::move(step));
  }
  json hyps = json::array();
  for (const auto& h : r.hypotheses) hyps.push_back(logic::print_formula(h));

  json oracle = nullptr;
  try {
    oracle = logic::entails(r.hypotheses, r.conclusion, atom_cap);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::atom_cap_exceeded) throw;
  }
  auto first = r.first_invalid();
  return {{"root", r.root.value},
          {"valid", r.valid},
          {"conclusion", logic::print_formula(r.conclusion)},
          {"hypotheses", hyps},
          {"steps", steps},
          {"first_invalid", first ? json(*first + 1) : json(nullptr)},
          {"oracle_entailed", oracle}};
}

inline json member_to_json(const proof::TheoryMember& m) {
  return {{"node", m.node.value}, {"formula", logic::print_formula(m.formula)}};
}

inline json consistency_to_json(TheoryId theory, const proof::ConsistencyVerdict& v) {
  json j = {{"theory", theory.value}, {"consistent", v.consistent()}, {"witness", nullptr}};
  if (v.witness) {
    j["witness"] = {{"positive", member_to_json(v.witness->first)}, {"negative", member_to_json(v.witness->second)}};
  }
  return j;
}

inline json import_to_json(const proof::ImportResult& r) {
  json ids = json::array();
  for (NodeId id : r.created) ids.push_back(id.value);
  return {{"root_id", r.root.value}, {"message_ids", ids}};
}

}  // namespace factgraph::service
