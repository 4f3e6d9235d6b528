#pragma once

#include <charconv>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "factgraph/error.hpp"
#include "factgraph/logic/semantics.hpp"
#include "factgraph/proof/linear.hpp"
#include "factgraph/proof/theory.hpp"
#include "factgraph/query/arguments.hpp"
#include "factgraph/service/views.hpp"
#include "factgraph/store/codec.hpp"
#include "factgraph/store/store.hpp"

namespace factgraph::service {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  std::size_t atom_cap = logic::default_atom_cap;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_request:
    case ErrorCode::syntax_error:
    case ErrorCode::malformed_proof:
    case ErrorCode::malformed_node:
    case ErrorCode::out_of_range:
      return 400;
    case ErrorCode::permission_denied:
      return 403;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::handle_taken:
      return 409;
    case ErrorCode::io_error:
    case ErrorCode::corrupt_event:
    case ErrorCode::internal:
      return 500;
    default:
      return 422;
  }
}

namespace detail {

inline std::uint64_t parse_id(std::string_view text, const char* field) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::bad_request, std::string(field) + " must be a non-negative integer", field);
  }
  return v;
}

inline json parse_body(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::bad_request, "request body is not valid JSON", "body");
  if (!j.is_object()) throw Error(ErrorCode::bad_request, "request body must be a JSON object", "body");
  return j;
}

inline std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) throw Error(ErrorCode::bad_request, std::string("missing parameter '") + name + "'", name);
  return req.get_param_value(name);
}

}  // namespace detail

/// HTTP front end over a Store. Handlers run on httplib's worker pool;
/// writes serialize inside the store, reads go to snapshots.
class Service {
 public:
  Service(store::Store& store, ServiceOptions options) : store_(store), options_(std::move(options)) {
    // httplib's default also sets SO_REUSEPORT, which lets a second server
    // share a busy port instead of failing.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    routes();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ~Service() { stop(); }

  /// Binds the listening socket and returns the port. Throws io_error if the
  /// port is taken.
  int bind() {
    int port = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                                  : (server_.bind_to_port(options_.host, options_.port) ? options_.port : -1);
    if (port < 0) {
      throw Error(ErrorCode::io_error,
                  "cannot listen on " + options_.host + ":" + std::to_string(options_.port), "port");
    }
    port_ = port;
    return port;
  }

  /// Serves until stop(). Binds first if bind() was not called.
  void run() {
    if (port_ < 0) bind();
    server_.listen_after_bind();
  }

  /// Serves on a background thread; returns once requests are accepted.
  int start() {
    if (port_ < 0) bind();
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }

 private:
  using Handler = std::function<json(const httplib::Request&, httplib::Response&)>;

  static httplib::Server::Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        res.status = 200;
        body = h(req, res);
      } catch (const Error& e) {
        res.status = http_status(e.code());
        body = error_to_json(e);
      } catch (const std::exception& e) {
        res.status = 500;
        body = error_to_json(ErrorCode::internal, e.what());
      }
      res.set_content(body.dump(), "application/json");
    };
  }

  static std::uint64_t path_id(const httplib::Request& req) {
    return detail::parse_id(req.matches[1].str(), "id");
  }

  void routes() {
    using store::detail::require_id;
    using store::detail::require_string;

    server_.Post("/users", wrap([this](const auto& req, auto& res) -> json {
      json j = detail::parse_body(req);
      UserId id = store_.add_user(require_string(j, "handle"));
      res.status = 201;
      return {{"id", id.value}};
    }));

    server_.Get(R"(/users/(\d+))", wrap([this](const auto& req, auto&) -> json {
      auto snap = store_.snapshot();
      const store::User* u = snap->find_user(UserId{path_id(req)});
      if (!u) throw Error(ErrorCode::not_found, "no such user", "id");
      return user_to_json(*u);
    }));

    server_.Post("/messages", wrap([this](const auto& req, auto& res) -> json {
      json j = detail::parse_body(req);
      UserId author{require_id(j, "author")};
      store::Message m = store::message_from_json(j, MessageId{0}, author, 0);
      MessageId id = store_.post_message(author, std::move(m.body), std::move(m.payload), m.comment);
      res.status = 201;
      return {{"id", id.value}};
    }));

    server_.Get(R"(/messages/(\d+))", wrap([this](const auto& req, auto&) -> json {
      auto snap = store_.snapshot();
      const store::Message* m = snap->find_message(MessageId{path_id(req)});
      if (!m) throw Error(ErrorCode::not_found, "no such message", "id");
      return message_record(*snap, *m);
    }));

    server_.Post("/ratings", wrap([this](const auto& req, auto&) -> json {
      json j = detail::parse_body(req);
      const json& score = store::detail::require(j, "score");
      if (!score.is_number()) throw Error(ErrorCode::bad_request, "score must be a number", "score");
      store_.rate_hotness(UserId{require_id(j, "user")}, MessageId{require_id(j, "msg")}, score.get<double>());
      return json::object();
    }));

    server_.Post("/admin/authoritative", wrap([this](const auto& req, auto&) -> json {
      json j = detail::parse_body(req);
      const json& flag = store::detail::require(j, "flag");
      if (!flag.is_boolean()) throw Error(ErrorCode::bad_request, "flag must be a boolean", "flag");
      store_.set_authoritative(UserId{require_id(j, "admin")}, UserId{require_id(j, "user")}, flag.get<bool>());
      return json::object();
    }));

    server_.Get("/arguments", wrap([this](const auto& req, auto&) -> json {
      MessageId target{detail::parse_id(detail::required_param(req, "target"), "target")};
      auto polarity = store::parse_polarity(detail::required_param(req, "polarity"));
      if (!polarity) throw Error(ErrorCode::bad_request, "polarity must be 1, 0 or null", "polarity");
      std::size_t limit = query::unlimited;
      if (req.has_param("limit")) limit = detail::parse_id(req.get_param_value("limit"), "limit");
      return listing_to_json(query::best_arguments(*store_.snapshot(), target, *polarity, limit));
    }));

    server_.Get(R"(/proofs/(\d+)/verify)", wrap([this](const auto& req, auto&) -> json {
      auto snap = store_.snapshot();
      MessageId id{path_id(req)};
      if (!snap->find_message(id)) throw Error(ErrorCode::not_found, "no such message", "id");
      return report_to_json(proof::verify_derivation(*snap, id), options_.atom_cap);
    }));

    server_.Post("/proofs/import", wrap([this](const auto& req, auto& res) -> json {
      UserId author{detail::parse_id(detail::required_param(req, "author"), "author")};
      proof::Role role = proof::Role::data;
      if (req.has_param("role")) {
        auto r = proof::parse_role(req.get_param_value("role"));
        if (!r) throw Error(ErrorCode::bad_request, "role must be 'data' or 'explanatory'", "role");
        role = *r;
      }
      proof::LinearProof lp = proof::parse_linear_proof(req.body);
      json out = import_to_json(store_.import_proof(author, lp, role));
      res.status = 201;
      return out;
    }));

    server_.Post("/theories", wrap([this](const auto& req, auto& res) -> json {
      json j = detail::parse_body(req);
      const json& members = store::detail::require(j, "members");
      if (!members.is_array()) throw Error(ErrorCode::bad_request, "members must be an array", "members");
      std::vector<NodeId> ids;
      for (const json& m : members) {
        if (!m.is_number_integer() || m.get<long long>() < 0) {
          throw Error(ErrorCode::bad_request, "members must be message ids", "members");
        }
        ids.push_back(NodeId{m.get<std::uint64_t>()});
      }
      TheoryId id = store_.add_theory(require_string(j, "name"), std::move(ids));
      res.status = 201;
      return {{"id", id.value}};
    }));

    server_.Get(R"(/theories/(\d+))", wrap([this](const auto& req, auto&) -> json {
      auto snap = store_.snapshot();
      const proof::Theory* t = snap->find_theory(TheoryId{path_id(req)});
      if (!t) throw Error(ErrorCode::not_found, "no such theory", "id");
      json members = json::array();
      for (NodeId m : t->members) members.push_back(m.value);
      return {{"id", t->id.value}, {"name", t->name}, {"members", members}};
    }));

    server_.Get(R"(/theories/(\d+)/consistency)", wrap([this](const auto& req, auto&) -> json {
      auto snap = store_.snapshot();
      const proof::Theory* t = snap->find_theory(TheoryId{path_id(req)});
      if (!t) throw Error(ErrorCode::not_found, "no such theory", "id");
      return consistency_to_json(t->id, proof::check_consistency(*t, *snap));
    }));

    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      ErrorCode code = res.status == 404 ? ErrorCode::not_found : ErrorCode::bad_request;
      res.set_content(error_to_json(code, res.status == 404 ? "no such endpoint" : "request rejected").dump(),
                      "application/json");
    });
  }

  store::Store& store_;
  ServiceOptions options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace factgraph::service
