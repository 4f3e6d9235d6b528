#pragma once

// Store operations used by the CLI, against a local event log or a running
// service. Both return the service's JSON shapes.

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "factgraph/proof/linear.hpp"
#include "factgraph/proof/theory.hpp"
#include "factgraph/query/arguments.hpp"
#include "factgraph/service/views.hpp"
#include "factgraph/store/codec.hpp"
#include "factgraph/store/store.hpp"

namespace factgraph::cli {

using nlohmann::json;

class Backend {
 public:
  virtual ~Backend() = default;
  virtual json add_user(const std::string& handle) = 0;
  /// `request` has the POST /messages body shape.
  virtual json post_message(const json& request) = 0;
  virtual json rate(UserId user, MessageId msg, double score) = 0;
  virtual json authorize(UserId admin, UserId user, bool flag) = 0;
  virtual json arguments(MessageId target, store::Polarity polarity, std::size_t limit) = 0;
  virtual json import_proof(UserId author, const std::string& text, proof::Role role) = 0;
  virtual json verify(MessageId root) = 0;
  virtual json add_theory(const std::string& name, const std::vector<NodeId>& members) = 0;
  virtual json theory_consistency(TheoryId id) = 0;
};

class LocalBackend : public Backend {
 public:
  LocalBackend(store::StoreConfig config, std::size_t atom_cap) : store_(std::move(config)), atom_cap_(atom_cap) {}

  json add_user(const std::string& handle) override { return {{"id", store_.add_user(handle).value}}; }

  json post_message(const json& request) override {
    UserId author{store::detail::require_id(request, "author")};
    store::Message m = store::message_from_json(request, MessageId{0}, author, 0);
    return {{"id", store_.post_message(author, std::move(m.body), std::move(m.payload), m.comment).value}};
  }

  json rate(UserId user, MessageId msg, double score) override {
    store_.rate_hotness(user, msg, score);
    return json::object();
  }

  json authorize(UserId admin, UserId user, bool flag) override {
    store_.set_authoritative(admin, user, flag);
    return json::object();
  }

  json arguments(MessageId target, store::Polarity polarity, std::size_t limit) override {
    return service::listing_to_json(query::best_arguments(*store_.snapshot(), target, polarity, limit));
  }

  json import_proof(UserId author, const std::string& text, proof::Role role) override {
    return service::import_to_json(store_.import_proof(author, proof::parse_linear_proof(text), role));
  }

  json verify(MessageId root) override {
    auto snap = store_.snapshot();
    if (!snap->find_message(root)) throw Error(ErrorCode::not_found, "no such message", "id");
    return service::report_to_json(proof::verify_derivation(*snap, root), atom_cap_);
  }

  json add_theory(const std::string& name, const std::vector<NodeId>& members) override {
    return {{"id", store_.add_theory(name, members).value}};
  }

  json theory_consistency(TheoryId id) override {
    auto snap = store_.snapshot();
    const proof::Theory* t = snap->find_theory(id);
    if (!t) throw Error(ErrorCode::not_found, "no such theory", "id");
    return service::consistency_to_json(id, proof::check_consistency(*t, *snap));
  }

 private:
  store::Store store_;
  std::size_t atom_cap_;
};

class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(const std::string& url) : client_(url) {
    if (!client_.is_valid()) throw Error(ErrorCode::bad_request, "invalid server URL '" + url + "'", "url");
    client_.set_connection_timeout(5);
  }

  json add_user(const std::string& handle) override { return post("/users", {{"handle", handle}}); }

  json post_message(const json& request) override { return post("/messages", request); }

  json rate(UserId user, MessageId msg, double score) override {
    return post("/ratings", {{"user", user.value}, {"msg", msg.value}, {"score", score}});
  }

  json authorize(UserId admin, UserId user, bool flag) override {
    return post("/admin/authoritative", {{"admin", admin.value}, {"user", user.value}, {"flag", flag}});
  }

  json arguments(MessageId target, store::Polarity polarity, std::size_t limit) override {
    std::string path = "/arguments?target=" + std::to_string(target.value) +
                       "&polarity=" + std::string(store::to_string(polarity));
    if (limit != query::unlimited) path += "&limit=" + std::to_string(limit);
    return get(path);
  }

  json import_proof(UserId author, const std::string& text, proof::Role role) override {
    std::string path = "/proofs/import?author=" + std::to_string(author.value) +
                       "&role=" + std::string(proof::to_string(role));
    return unwrap(client_.Post(path, text, "text/plain"));
  }

  json verify(MessageId root) override { return get("/proofs/" + std::to_string(root.value) + "/verify"); }

  json add_theory(const std::string& name, const std::vector<NodeId>& members) override {
    json ids = json::array();
    for (NodeId m : members) ids.push_back(m.value);
    return post("/theories", {{"name", name}, {"members", ids}});
  }

  json theory_consistency(TheoryId id) override {
    return get("/theories/" + std::to_string(id.value) + "/consistency");
  }

 private:
  json post(const std::string& path, const json& body) {
    return unwrap(client_.Post(path, body.dump(), "application/json"));
  }

  json get(const std::string& path) { return unwrap(client_.Get(path)); }

  /// Turns an error response back into the Error it was rendered from.
  static json unwrap(const httplib::Result& res) {
    if (!res) {
      throw Error(ErrorCode::io_error, "cannot reach server: " + httplib::to_string(res.error()), "url");
    }
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) {
      throw Error(ErrorCode::io_error, "server sent a non-JSON response (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status >= 400) {
      const json& e = body.contains("error") ? body["error"] : json::object();
      std::string field = e.contains("field") && e["field"].is_string() ? e["field"].get<std::string>() : "";
      throw Error(error_code_from_string(e.value("code", "internal")), e.value("message", "request failed"), field);
    }
    return body;
  }

  httplib::Client client_;
};

}  // namespace factgraph::cli
