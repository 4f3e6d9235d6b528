#pragma once

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "factgraph/cli/backend.hpp"
#include "factgraph/error.hpp"
#include "factgraph/logic/syntax.hpp"
#include "factgraph/proof/linear.hpp"
#include "factgraph/service/server.hpp"
#include "factgraph/service/views.hpp"
#include "factgraph/store/event_log.hpp"
#include "factgraph/store/store.hpp"

namespace factgraph::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain_error = 1;
inline constexpr int exit_usage = 2;

enum class Format { plain, json };

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read '" + path + "'", "file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string number(double v) { return json(v).dump(); }

inline std::optional<store::Polarity> polarity_arg(const std::string& s) { return store::parse_polarity(s); }

/// Blocks SIGINT and SIGTERM in the calling thread (and threads it starts)
/// and stops `service` when one arrives.
class SignalStopper {
 public:
  explicit SignalStopper(service::Service& service) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
    waiter_ = std::thread([this, &service] {
      int sig = 0;
      sigwait(&set_, &sig);
      if (!done_) service.stop();
    });
  }

  ~SignalStopper() {
    done_ = true;
    pthread_kill(waiter_.native_handle(), SIGTERM);
    waiter_.join();
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  sigset_t set_;
  sigset_t old_;
  std::atomic<bool> done_ = false;
  std::thread waiter_;
};

}  // namespace detail

/// Entry point of the factgraph tool. Exit codes: 0 success, 1 domain error,
/// 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fact-checking message store with a propositional proof kernel", "factgraph"};
  app.require_subcommand(1);

  std::string store_path;
  std::string url;
  Format format = Format::plain;
  std::vector<std::uint64_t> admins;
  std::size_t atom_cap = logic::default_atom_cap;
  store::SyncMode sync = store::SyncMode::write;

  app.add_option("--store", store_path, "Event log of a local store")->envname("FACTGRAPH_STORE");
  app.add_option("--url", url, "Base URL of a running service")->envname("FACTGRAPH_URL");
  app.add_option("--format", format, "Output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"plain", Format::plain}, {"json", Format::json}}));
  app.add_option("--admin", admins, "User ids allowed to designate authoritative users")
      ->delimiter(',')
      ->envname("FACTGRAPH_ADMINS");
  app.add_option("--atom-cap", atom_cap, "Largest atom count for truth-table checks")
      ->envname("FACTGRAPH_ATOM_CAP")
      ->check(CLI::Range(1, 63));
  app.add_option("--sync", sync, "Log durability: write or fdatasync")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, store::SyncMode>{{"write", store::SyncMode::write}, {"fdatasync", store::SyncMode::fdatasync}}));

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service on --store");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port, 0 for any free port")->envname("FACTGRAPH_PORT")->check(CLI::Range(0, 65535));

  // user
  auto* user = app.add_subcommand("user", "Create a user");
  std::string handle;
  user->add_option("handle", handle)->required();

  // post
  auto* post = app.add_subcommand("post", "Post a message, optionally as a comment or with a node payload");
  std::uint64_t author = 0;
  std::string body;
  std::optional<std::uint64_t> target;
  std::string polarity_text = "null";
  std::string formula, role = "data", conclusion;
  std::vector<std::uint64_t> premises;
  std::vector<std::string> truisms;
  post->add_option("--author", author)->required();
  post->add_option("--body", body);
  post->add_option("--target", target, "Message this comments on");
  post->add_option("--polarity", polarity_text, "1 agree, 0 disagree, null no opinion")
      ->check(CLI::IsMember({"1", "0", "null"}));
  auto* formula_opt = post->add_option("--formula", formula, "Proposition payload");
  post->add_option("--role", role)->check(CLI::IsMember({"data", "explanatory"}));
  auto* conclusion_opt = post->add_option("--conclusion", conclusion, "Proof payload conclusion");
  post->add_option("--premise", premises, "Proof payload premise (repeatable)");
  post->add_option("--truism", truisms, "Proof payload inline axiom (repeatable)");
  formula_opt->excludes(conclusion_opt);

  // rate
  auto* rate = app.add_subcommand("rate", "Set a hotness rating");
  std::uint64_t rater = 0, rated = 0;
  double score = 0.0;
  rate->add_option("--user", rater)->required();
  rate->add_option("--msg", rated)->required();
  rate->add_option("--score", score)->required();

  // args
  auto* args = app.add_subcommand("args", "Best arguments on a target");
  std::uint64_t args_target = 0;
  std::string args_polarity;
  std::optional<std::size_t> limit;
  args->add_option("--target", args_target)->required();
  args->add_option("--polarity", args_polarity)->required()->check(CLI::IsMember({"1", "0", "null"}));
  args->add_option("--limit", limit);

  // authorize
  auto* authorize = app.add_subcommand("authorize", "Designate an authoritative user");
  std::uint64_t auth_admin = 0, auth_user = 0;
  bool revoke = false;
  authorize->add_option("--admin", auth_admin)->required();
  authorize->add_option("--user", auth_user)->required();
  authorize->add_flag("--revoke", revoke);

  // prove
  auto* prove = app.add_subcommand("prove", "Linear proofs");
  prove->require_subcommand(1);
  auto* prove_check = prove->add_subcommand("check", "Check a linear proof file offline");
  std::string proof_file;
  prove_check->add_option("file", proof_file, "Proof file, - for stdin")->required();
  auto* prove_import = prove->add_subcommand("import", "Import a linear proof as messages");
  std::uint64_t import_author = 0;
  std::string import_role = "data";
  prove_import->add_option("file", proof_file, "Proof file, - for stdin")->required();
  prove_import->add_option("--author", import_author)->required();
  prove_import->add_option("--role", import_role)->check(CLI::IsMember({"data", "explanatory"}));
  auto* prove_verify = prove->add_subcommand("verify", "Verify the derivation rooted at a message");
  std::uint64_t verify_root = 0;
  prove_verify->add_option("id", verify_root)->required();

  // theory
  auto* theory = app.add_subcommand("theory", "Theories");
  theory->require_subcommand(1);
  auto* theory_add = theory->add_subcommand("add", "Create a theory from proposition messages");
  std::string theory_name;
  std::vector<std::uint64_t> members;
  theory_add->add_option("--name", theory_name)->required();
  theory_add->add_option("--member", members, "Proposition message id (repeatable)");
  auto* theory_check = theory->add_subcommand("check", "Check a theory for a contradictory pair");
  std::uint64_t theory_id = 0;
  theory_check->add_option("id", theory_id)->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Replay --store and summarize it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
  }

  const bool as_json = format == Format::json;
  auto emit = [&](const json& j, const std::string& plain) {
    if (as_json) {
      out << j.dump() << '\n';
    } else {
      out << plain << '\n';
    }
  };

  auto store_config = [&] {
    store::StoreConfig config;
    for (auto id : admins) config.admins.insert(UserId{id});
    config.log_path = store_path;
    config.sync = sync;
    return config;
  };

  auto backend = [&]() -> std::unique_ptr<Backend> {
    if (!store_path.empty() && !url.empty()) throw detail::UsageError("give either --store or --url, not both");
    if (!url.empty()) return std::make_unique<RemoteBackend>(url);
    if (store_path.empty()) throw detail::UsageError("this command needs --store or --url");
    return std::make_unique<LocalBackend>(store_config(), atom_cap);
  };

  try {
    if (*serve) {
      if (store_path.empty()) throw detail::UsageError("serve needs --store");
      if (!url.empty()) throw detail::UsageError("serve does not take --url");
      store::Store s(store_config());
      service::Service svc(s, {host, port, atom_cap});
      int bound = svc.bind();
      {
        detail::SignalStopper stopper(svc);
        out << "listening on http://" << host << ":" << bound << std::endl;
        svc.run();
      }
      out << "stopped" << std::endl;
      return exit_ok;
    }

    if (*user) {
      json r = backend()->add_user(handle);
      emit(r, std::to_string(r["id"].get<std::uint64_t>()));
      return exit_ok;
    }

    if (*post) {
      json req = {{"author", author}, {"body", body}};
      if (*formula_opt) {
        req["kind"] = "prop";
        req["formula"] = formula;
        req["role"] = role;
      } else if (*conclusion_opt) {
        req["kind"] = "proof";
        req["conclusion"] = conclusion;
        req["premises"] = premises;
        req["truisms"] = truisms;
      }
      if (target) {
        req["target"] = *target;
        req["polarity"] = store::polarity_to_json(*detail::polarity_arg(polarity_text));
      }
      json r = backend()->post_message(req);
      emit(r, std::to_string(r["id"].get<std::uint64_t>()));
      return exit_ok;
    }

    if (*rate) {
      emit(backend()->rate(UserId{rater}, MessageId{rated}, score), "ok");
      return exit_ok;
    }

    if (*args) {
      json r = backend()->arguments(MessageId{args_target}, *detail::polarity_arg(args_polarity),
                                    limit.value_or(query::unlimited));
      if (as_json) {
        out << r.dump() << '\n';
      } else {
        for (const json& e : r["entries"]) {
          out << e["id"].get<std::uint64_t>() << ' ' << detail::number(e["hotness"].get<double>()) << ' '
              << (e["authoritative"].get<bool>() ? "true" : "false") << '\n';
        }
      }
      return exit_ok;
    }

    if (*authorize) {
      emit(backend()->authorize(UserId{auth_admin}, UserId{auth_user}, !revoke), "ok");
      return exit_ok;
    }

    if (*prove_check) {
      proof::LinearProof lp = proof::parse_linear_proof(detail::read_input(proof_file));
      proof::LinearCheck check = proof::check_linear_proof(lp);
      json hyps = json::array();
      for (const auto& h : lp.hypotheses) hyps.push_back(logic::print_formula(h));
      json r = {{"valid", check.valid},
                {"conclusion", logic::print_formula(check.conclusion())},
                {"hypotheses", hyps},
                {"lines", lp.lines.size()},
                {"failed_line", nullptr}};
      std::string plain;
      if (check.valid) {
        plain = "valid, conclusion: " + logic::print_formula(check.conclusion());
        if (!lp.hypotheses.empty()) {
          plain += "\nhypotheses:";
          for (const auto& h : lp.hypotheses) plain += " " + logic::print_formula(h) + ";";
          plain.pop_back();
        }
      } else {
        r["failed_line"] = check.failed_line;
        r["reason"] = to_string(check.verdict.reason);
        r["detail"] = check.verdict.detail;
        plain = "invalid, line " + std::to_string(check.failed_line) + ": " +
                std::string(to_string(check.verdict.reason)) + ": " + check.verdict.detail;
      }
      emit(r, plain);
      return check.valid ? exit_ok : exit_domain_error;
    }

    if (*prove_import) {
      std::string text = detail::read_input(proof_file);
      json r = backend()->import_proof(UserId{import_author}, text, *proof::parse_role(import_role));
      std::string plain = "root " + std::to_string(r["root_id"].get<std::uint64_t>()) + "\nmessages";
      for (const json& id : r["message_ids"]) plain += " " + std::to_string(id.get<std::uint64_t>());
      emit(r, plain);
      return exit_ok;
    }

    if (*prove_verify) {
      json r = backend()->verify(MessageId{verify_root});
      std::ostringstream plain;
      for (const json& s : r["steps"]) {
        plain << s["step"].get<std::size_t>() << ". [" << s["node"].get<std::uint64_t>() << "] "
              << s["kind"].get<std::string>() << ' ' << s["formula"].get<std::string>() << "  "
              << (s["valid"].get<bool>() ? std::string("ok") : s["reason"].get<std::string>()) << '\n';
      }
      plain << (r["valid"].get<bool>() ? "valid" : "invalid") << ", conclusion: " << r["conclusion"].get<std::string>();
      emit(r, plain.str());
      return r["valid"].get<bool>() ? exit_ok : exit_domain_error;
    }

    if (*theory_add) {
      std::vector<NodeId> ids;
      for (auto m : members) ids.push_back(NodeId{m});
      json r = backend()->add_theory(theory_name, ids);
      emit(r, std::to_string(r["id"].get<std::uint64_t>()));
      return exit_ok;
    }

    if (*theory_check) {
      json r = backend()->theory_consistency(TheoryId{theory_id});
      std::string plain = "consistent";
      if (!r["consistent"].get<bool>()) {
        const json& w = r["witness"];
        plain = "inconsistent: node " + std::to_string(w["positive"]["node"].get<std::uint64_t>()) + " (" +
                w["positive"]["formula"].get<std::string>() + ") and node " +
                std::to_string(w["negative"]["node"].get<std::uint64_t>()) + " (" +
                w["negative"]["formula"].get<std::string>() + ")";
      }
      emit(r, plain);
      return exit_ok;
    }

    if (*replay) {
      if (store_path.empty()) throw detail::UsageError("replay needs --store");
      store::StoreState state = store::replay_file(store_path);
      json r = {{"users", state.users().size()},
                {"messages", state.messages().size()},
                {"ratings", state.rating_count()},
                {"theories", state.theories().size()}};
      emit(r, "users " + std::to_string(state.users().size()) + ", messages " +
                  std::to_string(state.messages().size()) + ", ratings " + std::to_string(state.rating_count()) +
                  ", theories " + std::to_string(state.theories().size()));
      return exit_ok;
    }
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    if (as_json) {
      err << service::error_to_json(e).dump() << '\n';
    } else {
      err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    }
    return exit_domain_error;
  }
  return exit_usage;
}

}  // namespace factgraph::cli
