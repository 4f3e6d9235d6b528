#pragma once

// JSON encoding of store records and events. One event per line:
//   {"ev":"user","id":N,"handle":S}
//   {"ev":"msg","id":N,"author":N,"body":S,"kind":"plain|prop|proof",
//    "formula":S?,"role":"data|explanatory"?,"premises":[N]?,"truisms":[S]?,
//    "conclusion":S?,"target":N?,"polarity":1|0|null?,"ts":N?}
//   {"ev":"hot","user":N,"msg":N,"score":F,"ts":N?}
//   {"ev":"auth","user":N,"flag":B}
//   {"ev":"theory","id":N,"name":S,"members":[N]}

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "factgraph/error.hpp"
#include "factgraph/logic/syntax.hpp"
#include "factgraph/store/model.hpp"

namespace factgraph::store {

using nlohmann::json;

inline json polarity_to_json(Polarity p) {
  switch (p) {
    case Polarity::agree: return 1;
    case Polarity::disagree: return 0;
    case Polarity::no_opinion: return nullptr;
  }
  return nullptr;
}

/// Accepts 1, 0 or null; anything else is a bad_request.
inline Polarity polarity_from_json(const json& j) {
  if (j.is_null()) return Polarity::no_opinion;
  if (j.is_number_integer()) {
    if (j.get<long long>() == 1) return Polarity::agree;
    if (j.get<long long>() == 0) return Polarity::disagree;
  }
  throw Error(ErrorCode::bad_request, "polarity must be 1, 0 or null", "polarity");
}

inline std::string_view message_kind(const Message& m) {
  if (!m.payload) return "plain";
  return std::holds_alternative<proof::PropositionNode>(*m.payload) ? "prop" : "proof";
}

/// Message fields shared by the event log and the service's message record.
inline json message_to_json(const Message& m) {
  json j = {{"id", m.id.value}, {"author", m.author.value}, {"body", m.body}, {"kind", message_kind(m)}};
  if (m.payload) {
    if (const auto* p = std::get_if<proof::PropositionNode>(&*m.payload)) {
      j["formula"] = logic::print_formula(p->formula);
      j["role"] = to_string(p->role);
    } else {
      const auto& pn = std::get<proof::ProofNode>(*m.payload);
      json premises = json::array();
      for (NodeId id : pn.premises) premises.push_back(id.value);
      json truisms = json::array();
      for (const auto& t : pn.truisms) truisms.push_back(logic::print_formula(t));
      j["premises"] = std::move(premises);
      j["truisms"] = std::move(truisms);
      j["conclusion"] = logic::print_formula(pn.conclusion);
    }
  }
  if (m.comment) {
    j["target"] = m.comment->target.value;
    j["polarity"] = polarity_to_json(m.comment->polarity);
  }
  return j;
}

namespace detail {

inline const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::bad_request, std::string("missing field '") + key + "'", key);
  return *it;
}

inline std::uint64_t require_id(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw Error(ErrorCode::bad_request, std::string("field '") + key + "' must be a non-negative integer", key);
  }
  return v.get<std::uint64_t>();
}

inline std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw Error(ErrorCode::bad_request, std::string("field '") + key + "' must be a string", key);
  return v.get<std::string>();
}

inline logic::Formula require_formula(const json& j, const char* key) {
  std::string text = require_string(j, key);
  try {
    return logic::parse_formula(text);
  } catch (const SyntaxError& e) {
    throw Error(ErrorCode::syntax_error, std::string(key) + ": " + e.what(), key);
  }
}

inline std::int64_t optional_ts(const json& j) {
  auto it = j.find("ts");
  return it != j.end() && it->is_number_integer() ? it->get<std::int64_t>() : 0;
}

}  // namespace detail

/// Builds a Message (without id, author or timestamp checks) from the
/// request/event fields. Throws bad_request / syntax_error on malformed input.
inline Message message_from_json(const json& j, MessageId id, UserId author, std::int64_t created_at) {
  using detail::require;
  Message m{id, author, created_at, {}, std::nullopt, std::nullopt};
  if (auto it = j.find("body"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::bad_request, "field 'body' must be a string", "body");
    m.body = it->get<std::string>();
  }
  std::string kind = "plain";
  if (auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::bad_request, "field 'kind' must be a string", "kind");
    kind = it->get<std::string>();
  }
  if (kind == "prop") {
    proof::Role role = proof::Role::data;
    if (auto it = j.find("role"); it != j.end() && !it->is_null()) {
      auto r = it->is_string() ? proof::parse_role(it->get<std::string>()) : std::nullopt;
      if (!r) throw Error(ErrorCode::bad_request, "role must be 'data' or 'explanatory'", "role");
      role = *r;
    }
    m.payload = proof::PropositionNode{detail::require_formula(j, "formula"), role};
  } else if (kind == "proof") {
    proof::ProofNode pn{{}, {}, detail::require_formula(j, "conclusion")};
    if (auto it = j.find("premises"); it != j.end()) {
      if (!it->is_array()) throw Error(ErrorCode::bad_request, "premises must be an array", "premises");
      for (const json& p : *it) {
        if (!p.is_number_integer() || p.get<long long>() < 0) {
          throw Error(ErrorCode::bad_request, "premises must be message ids", "premises");
        }
        pn.premises.push_back(NodeId{p.get<std::uint64_t>()});
      }
    }
    if (auto it = j.find("truisms"); it != j.end()) {
      if (!it->is_array()) throw Error(ErrorCode::bad_request, "truisms must be an array", "truisms");
      for (const json& t : *it) {
        if (!t.is_string()) throw Error(ErrorCode::bad_request, "truisms must be formulas", "truisms");
        try {
          pn.truisms.push_back(logic::parse_formula(t.get<std::string>()));
        } catch (const SyntaxError& e) {
          throw Error(ErrorCode::syntax_error, std::string("truisms: ") + e.what(), "truisms");
        }
      }
    }
    if (pn.truisms.size() > proof::max_truisms ||
        pn.premises.size() + pn.truisms.size() != proof::modus_ponens_arity) {
      throw Error(ErrorCode::malformed_node,
                  "a proof node needs exactly two inputs (premises plus at most two truisms)", "premises");
    }
    m.payload = std::move(pn);
  } else if (kind != "plain") {
    throw Error(ErrorCode::bad_request, "kind must be 'plain', 'prop' or 'proof'", "kind");
  }
  if (auto it = j.find("target"); it != j.end() && !it->is_null()) {
    MessageId target{detail::require_id(j, "target")};
    auto pol = j.find("polarity");
    m.comment = CommentEdge{target, pol == j.end() ? Polarity::no_opinion : polarity_from_json(*pol)};
  }
  return m;
}

inline json event_to_json(const Event& ev) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, UserCreated>) {
          return {{"ev", "user"}, {"id", e.id.value}, {"handle", e.handle}};
        } else if constexpr (std::is_same_v<T, MessagePosted>) {
          json j = {{"ev", "msg"}};
          j.update(message_to_json(e.message));
          j["ts"] = e.message.created_at;
          return j;
        } else if constexpr (std::is_same_v<T, HotnessRated>) {
          return {{"ev", "hot"},
                  {"user", e.rating.user.value},
                  {"msg", e.rating.message.value},
                  {"score", e.rating.score},
                  {"ts", e.rating.rated_at}};
        } else if constexpr (std::is_same_v<T, AuthoritySet>) {
          return {{"ev", "auth"}, {"user", e.user.value}, {"flag", e.flag}};
        } else {
          json members = json::array();
          for (NodeId id : e.theory.members) members.push_back(id.value);
          return {{"ev", "theory"}, {"id", e.theory.id.value}, {"name", e.theory.name}, {"members", members}};
        }
      },
      ev);
}

inline Event event_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw Error(ErrorCode::bad_request, "event must be a JSON object");
  const std::string kind = require_string(j, "ev");
  if (kind == "user") return UserCreated{UserId{require_id(j, "id")}, require_string(j, "handle")};
  if (kind == "msg") {
    return MessagePosted{message_from_json(j, MessageId{require_id(j, "id")},
                                           UserId{require_id(j, "author")}, optional_ts(j))};
  }
  if (kind == "hot") {
    const json& score = require(j, "score");
    if (!score.is_number()) throw Error(ErrorCode::bad_request, "score must be a number", "score");
    return HotnessRated{HotnessRating{UserId{require_id(j, "user")}, MessageId{require_id(j, "msg")},
                                      score.get<double>(), optional_ts(j)}};
  }
  if (kind == "auth") {
    const json& flag = require(j, "flag");
    if (!flag.is_boolean()) throw Error(ErrorCode::bad_request, "flag must be a boolean", "flag");
    return AuthoritySet{UserId{require_id(j, "user")}, flag.get<bool>()};
  }
  if (kind == "theory") {
    Theory t{TheoryId{require_id(j, "id")}, require_string(j, "name"), {}};
    const json& members = require(j, "members");
    if (!members.is_array()) throw Error(ErrorCode::bad_request, "members must be an array", "members");
    for (const json& m : members) {
      if (!m.is_number_integer() || m.get<long long>() < 0) {
        throw Error(ErrorCode::bad_request, "members must be message ids", "members");
      }
      t.members.push_back(NodeId{m.get<std::uint64_t>()});
    }
    return TheoryCreated{std::move(t)};
  }
  throw Error(ErrorCode::bad_request, "unknown event kind '" + kind + "'", "ev");
}

}  // namespace factgraph::store
