#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/ids.hpp"
#include "factgraph/proof/linear.hpp"
#include "factgraph/store/event_log.hpp"
#include "factgraph/store/model.hpp"

namespace factgraph::store {

/// Milliseconds since the epoch.
using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

struct StoreConfig {
  /// Users allowed to designate authoritative voices.
  std::set<UserId> admins;
  /// Event log; empty keeps the store in memory only.
  std::filesystem::path log_path;
  SyncMode sync = SyncMode::write;
  Clock clock = system_clock_ms;
};

using Snapshot = std::shared_ptr<const StoreState>;

/// The platform's message store. Writes are serialized: each one is
/// validated, appended to the event log, and only then applied and
/// acknowledged. Readers take immutable snapshots and never block writers
/// for longer than the snapshot copy.
class Store {
 public:
  explicit Store(StoreConfig config = {}) : config_(std::move(config)) {
    if (!config_.clock) config_.clock = system_clock_ms;
    if (!config_.log_path.empty()) {
      state_ = replay_file(config_.log_path);
      log_.emplace(config_.log_path, config_.sync);
    }
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  UserId add_user(std::string handle) {
    std::lock_guard lock(write_mutex_);
    UserId id = state_.next_user_id();
    commit(UserCreated{id, std::move(handle)});
    return id;
  }

  MessageId post_message(UserId author, std::string body, std::optional<proof::GraphNode> payload = {},
                         std::optional<CommentEdge> comment = {}) {
    std::lock_guard lock(write_mutex_);
    MessageId id = state_.next_message_id();
    commit(MessagePosted{Message{id, author, config_.clock(), std::move(body), std::move(payload), comment}});
    return id;
  }

  /// Sets the rating of `message` by `user`, replacing any earlier one.
  /// Out-of-range scores are rejected, never clamped.
  void rate_hotness(UserId user, MessageId message, double score) {
    std::lock_guard lock(write_mutex_);
    commit(HotnessRated{HotnessRating{user, message, score, config_.clock()}});
  }

  void set_authoritative(UserId admin, UserId user, bool flag) {
    std::lock_guard lock(write_mutex_);
    if (!config_.admins.contains(admin)) {
      throw Error(ErrorCode::permission_denied,
                  "user " + std::to_string(admin.value) + " may not designate authoritative voices", "admin");
    }
    commit(AuthoritySet{user, flag});
  }

  TheoryId add_theory(std::string name, std::vector<NodeId> members) {
    std::lock_guard lock(write_mutex_);
    TheoryId id = state_.next_theory_id();
    commit(TheoryCreated{Theory{id, std::move(name), std::move(members)}});
    return id;
  }

  /// Posts a linear proof as proposition and proof messages authored by
  /// `author`. The whole import is one write: no reader sees it half done.
  proof::ImportResult import_proof(UserId author, const proof::LinearProof& lp,
                                   proof::Role hypothesis_role = proof::Role::data) {
    std::lock_guard lock(write_mutex_);
    if (!state_.find_user(author)) {
      throw Error(ErrorCode::unknown_author, "no user " + std::to_string(author.value), "author");
    }
    // Dry run against a scratch copy so a failure leaves the log untouched.
    StoreState scratch = state_;
    std::vector<Event> events;
    MessageSink sink{scratch, events, author, config_.clock()};
    proof::ImportResult result = proof::import_linear_proof(lp, sink, hypothesis_role);
    for (const Event& ev : events) {
      if (log_) log_->append(ev);
    }
    state_ = std::move(scratch);
    snapshot_.reset();
    return result;
  }

  Snapshot snapshot() const {
    std::lock_guard lock(write_mutex_);
    if (!snapshot_) snapshot_ = std::make_shared<const StoreState>(state_);
    return snapshot_;
  }

  const StoreConfig& config() const noexcept { return config_; }

 private:
  struct MessageSink {
    StoreState& state;
    std::vector<Event>& events;
    UserId author;
    std::int64_t now;

    template <class Node>
    NodeId add_node(Node node) {
      MessageId id = state.next_message_id();
      std::string body;
      if constexpr (std::is_same_v<Node, proof::PropositionNode>) {
        body = "hyp " + logic::print_formula(node.formula);
      } else {
        body = "mp " + logic::print_formula(node.conclusion);
      }
      Event ev = MessagePosted{Message{id, author, now, std::move(body), proof::GraphNode(std::move(node)), {}}};
      state.apply(ev);
      events.push_back(std::move(ev));
      return id;
    }
  };

  void commit(const Event& ev) {
    state_.validate(ev);
    if (log_) log_->append(ev);
    state_.apply(ev);
    snapshot_.reset();
  }

  StoreConfig config_;
  mutable std::mutex write_mutex_;
  StoreState state_;
  mutable Snapshot snapshot_;
  std::optional<EventLog> log_;
};

}  // namespace factgraph::store
