#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/ids.hpp"
#include "factgraph/proof/graph.hpp"
#include "factgraph/proof/theory.hpp"

namespace factgraph::store {

struct User {
  UserId id;
  std::string handle;
  bool authoritative = false;

  friend bool operator==(const User&, const User&) = default;
};

/// Stance of a comment toward its target. On the wire: agree = 1,
/// disagree = 0, no_opinion = null.
enum class Polarity { disagree, agree, no_opinion };

constexpr std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::agree: return "1";
    case Polarity::disagree: return "0";
    case Polarity::no_opinion: return "null";
  }
  return "null";
}

/// Parses the textual wire form ("1", "0", "null").
inline std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "1") return Polarity::agree;
  if (s == "0") return Polarity::disagree;
  if (s == "null") return Polarity::no_opinion;
  return std::nullopt;
}

struct CommentEdge {
  MessageId target;
  Polarity polarity = Polarity::no_opinion;

  friend bool operator==(const CommentEdge&, const CommentEdge&) = default;
};

struct Message {
  MessageId id;
  UserId author;
  std::int64_t created_at = 0;
  std::string body;
  std::optional<proof::GraphNode> payload;
  std::optional<CommentEdge> comment;

  friend bool operator==(const Message&, const Message&) = default;
};

struct HotnessRating {
  UserId user;
  MessageId message;
  double score = 0.0;
  std::int64_t rated_at = 0;

  friend bool operator==(const HotnessRating&, const HotnessRating&) = default;
};

using proof::Theory;

inline bool is_valid_score(double score) { return std::isfinite(score) && score >= 0.0 && score <= 1.0; }

// ---------------------------------------------------------------------------
// Events: every mutation of the store is one of these, in log order.

struct UserCreated {
  UserId id;
  std::string handle;
};

struct MessagePosted {
  Message message;
};

struct HotnessRated {
  HotnessRating rating;
};

struct AuthoritySet {
  UserId user;
  bool flag = false;
};

struct TheoryCreated {
  Theory theory;
};

using Event = std::variant<UserCreated, MessagePosted, HotnessRated, AuthoritySet, TheoryCreated>;

// ---------------------------------------------------------------------------

/// Materialized store contents. Immutable once published as a snapshot.
class StoreState {
 public:
  const User* find_user(UserId id) const {
    return id.value >= 1 && id.value <= users_.size() ? &users_[id.value - 1] : nullptr;
  }

  const User* find_user(std::string_view handle) const {
    auto it = handles_.find(std::string(handle));
    return it == handles_.end() ? nullptr : find_user(it->second);
  }

  const Message* find_message(MessageId id) const {
    return id.value >= 1 && id.value <= messages_.size() ? &messages_[id.value - 1] : nullptr;
  }

  const proof::GraphNode* find_node(NodeId id) const {
    const Message* m = find_message(id);
    return m && m->payload ? &*m->payload : nullptr;
  }

  const Theory* find_theory(TheoryId id) const {
    return id.value >= 1 && id.value <= theories_.size() ? &theories_[id.value - 1] : nullptr;
  }

  /// Comments whose target is `target`, in ascending id order.
  std::span<const MessageId> comments_on(MessageId target) const {
    auto it = comments_.find(target);
    if (it == comments_.end()) return {};
    return it->second;
  }

  /// Live ratings of a message keyed by rater, or nullptr if unrated.
  const std::map<UserId, HotnessRating>* ratings_for(MessageId id) const {
    auto it = ratings_.find(id);
    return it == ratings_.end() ? nullptr : &it->second;
  }

  /// Mean of the live ratings of `id`; 0.0 when nobody has rated it.
  double aggregate_hotness(MessageId id) const {
    if (!find_message(id)) {
      throw Error(ErrorCode::unknown_message, "no message " + std::to_string(id.value), "msg");
    }
    const auto* ratings = ratings_for(id);
    if (!ratings || ratings->empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [user, r] : *ratings) sum += r.score;
    return sum / static_cast<double>(ratings->size());
  }

  const std::vector<User>& users() const noexcept { return users_; }
  const std::vector<Message>& messages() const noexcept { return messages_; }
  const std::vector<Theory>& theories() const noexcept { return theories_; }

  std::size_t rating_count() const {
    std::size_t n = 0;
    for (const auto& [msg, rs] : ratings_) n += rs.size();
    return n;
  }

  UserId next_user_id() const { return UserId{users_.size() + 1}; }
  MessageId next_message_id() const { return MessageId{messages_.size() + 1}; }
  TheoryId next_theory_id() const { return TheoryId{theories_.size() + 1}; }

  /// Throws the domain error that would make `ev` inapplicable to this state.
  void validate(const Event& ev) const {
    std::visit([this](const auto& e) { check(e); }, ev);
  }

  /// Validates, then applies.
  void apply(const Event& ev) {
    validate(ev);
    std::visit([this](const auto& e) { commit(e); }, ev);
  }

  friend bool operator==(const StoreState& a, const StoreState& b) {
    return a.users_ == b.users_ && a.messages_ == b.messages_ && a.ratings_ == b.ratings_ &&
           a.theories_ == b.theories_;
  }

 private:
  void check(const UserCreated& e) const {
    if (e.id != next_user_id()) {
      throw Error(ErrorCode::bad_request, "user id out of sequence", "id");
    }
    if (e.handle.empty()) throw Error(ErrorCode::bad_request, "handle must not be empty", "handle");
    if (handles_.contains(e.handle)) {
      throw Error(ErrorCode::handle_taken, "handle '" + e.handle + "' is taken", "handle");
    }
  }

  void check(const MessagePosted& e) const {
    const Message& m = e.message;
    if (m.id != next_message_id()) {
      throw Error(ErrorCode::bad_request, "message id out of sequence", "id");
    }
    if (!find_user(m.author)) {
      throw Error(ErrorCode::unknown_author, "no user " + std::to_string(m.author.value), "author");
    }
    if (m.comment && !find_message(m.comment->target)) {
      throw Error(ErrorCode::unknown_target,
                  "no message " + std::to_string(m.comment->target.value) + " to comment on", "target");
    }
    if (!m.payload) return;
    if (const auto* pn = std::get_if<proof::ProofNode>(&*m.payload)) {
      if (pn->premises.size() + pn->truisms.size() != proof::modus_ponens_arity) {
        throw Error(ErrorCode::malformed_node,
                    "a proof node needs exactly two inputs (premises plus truisms)", "premises");
      }
      for (NodeId p : pn->premises) {
        if (!find_node(p)) {
          throw Error(ErrorCode::unknown_premise,
                      "premise " + std::to_string(p.value) + " is not an earlier proposition or proof",
                      "premises");
        }
      }
    }
  }

  void check(const HotnessRated& e) const {
    const HotnessRating& r = e.rating;
    if (!is_valid_score(r.score)) {
      throw Error(ErrorCode::out_of_range, "hotness score must lie in [0, 1]", "score");
    }
    if (!find_user(r.user)) {
      throw Error(ErrorCode::unknown_user, "no user " + std::to_string(r.user.value), "user");
    }
    if (!find_message(r.message)) {
      throw Error(ErrorCode::unknown_message, "no message " + std::to_string(r.message.value), "msg");
    }
  }

  void check(const AuthoritySet& e) const {
    if (!find_user(e.user)) {
      throw Error(ErrorCode::unknown_user, "no user " + std::to_string(e.user.value), "user");
    }
  }

  void check(const TheoryCreated& e) const {
    if (e.theory.id != next_theory_id()) {
      throw Error(ErrorCode::bad_request, "theory id out of sequence", "id");
    }
    for (NodeId id : e.theory.members) {
      const proof::GraphNode* n = find_node(id);
      if (!n || !std::holds_alternative<proof::PropositionNode>(*n)) {
        throw Error(ErrorCode::unknown_member,
                    "theory member " + std::to_string(id.value) + " is not a proposition node",
                    "members");
      }
    }
  }

  void commit(const UserCreated& e) {
    users_.push_back(User{e.id, e.handle, false});
    handles_.emplace(e.handle, e.id);
  }

  void commit(const MessagePosted& e) {
    if (e.message.comment) comments_[e.message.comment->target].push_back(e.message.id);
    messages_.push_back(e.message);
  }

  void commit(const HotnessRated& e) { ratings_[e.rating.message].insert_or_assign(e.rating.user, e.rating); }

  void commit(const AuthoritySet& e) { users_[e.user.value - 1].authoritative = e.flag; }

  void commit(const TheoryCreated& e) { theories_.push_back(e.theory); }

  std::vector<User> users_;
  std::unordered_map<std::string, UserId> handles_;
  std::vector<Message> messages_;
  std::unordered_map<MessageId, std::vector<MessageId>> comments_;
  std::unordered_map<MessageId, std::map<UserId, HotnessRating>> ratings_;
  std::vector<Theory> theories_;
};

/// Free-function form of StoreState::aggregate_hotness.
inline double aggregate_hotness(const StoreState& snapshot, MessageId message) {
  return snapshot.aggregate_hotness(message);
}

}  // namespace factgraph::store
