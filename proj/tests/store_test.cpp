#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "factgraph/logic/syntax.hpp"
#include "factgraph/query/arguments.hpp"
#include "factgraph/store/codec.hpp"
#include "factgraph/store/event_log.hpp"
#include "factgraph/store/store.hpp"
#include "support/fixtures.hpp"
#include "support/session.hpp"

namespace {

using namespace factgraph;
using namespace factgraph::store;
using logic::parse_formula;

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

struct StoreTest : ::testing::Test {
  Store s{testkit::session_config()};
  UserId alice = s.add_user("alice");
  UserId bob = s.add_user("bob");
  UserId carol = s.add_user("carol");
};

// --- post_message ------------------------------------------------------------

TEST_F(StoreTest, PostsAPropositionNode) {
  MessageId m = s.post_message(alice, "GDP grew", proof::PropositionNode{parse_formula("econ_strong_2020")});
  EXPECT_EQ(m, MessageId{1});
  Snapshot snap = s.snapshot();
  const Message* msg = snap->find_message(m);
  ASSERT_TRUE(msg);
  EXPECT_EQ(msg->author, alice);
  EXPECT_EQ(msg->body, "GDP grew");
  const auto& node = std::get<proof::PropositionNode>(*msg->payload);
  EXPECT_EQ(node.formula, parse_formula("econ_strong_2020"));
  EXPECT_EQ(node.role, proof::Role::data);
  EXPECT_EQ(message_to_json(*msg)["kind"], "prop");
}

TEST_F(StoreTest, DisagreeCommentIsEncodedAsZero) {
  MessageId m1 = s.post_message(alice, "claim");
  MessageId m2 = s.post_message(bob, "no", {}, CommentEdge{m1, Polarity::disagree});
  nlohmann::json j = message_to_json(*s.snapshot()->find_message(m2));
  EXPECT_EQ(j["target"], 1);
  EXPECT_EQ(j["polarity"], 0);
  ASSERT_TRUE(j["polarity"].is_number_integer());

  MessageId m3 = s.post_message(bob, "hm", {}, CommentEdge{m1, Polarity::no_opinion});
  EXPECT_TRUE(message_to_json(*s.snapshot()->find_message(m3))["polarity"].is_null());
}

TEST_F(StoreTest, RejectsUnknownTargetAndAuthor) {
  EXPECT_EQ(error_of([&] { s.post_message(alice, "x", {}, CommentEdge{MessageId{99}, Polarity::agree}); }),
            ErrorCode::unknown_target);
  EXPECT_EQ(error_of([&] { s.post_message(UserId{42}, "x"); }), ErrorCode::unknown_author);
  EXPECT_TRUE(s.snapshot()->messages().empty());
}

TEST_F(StoreTest, ProofMessagesNeedKnownPremisesAndArityTwo) {
  MessageId p = s.post_message(alice, "p", proof::PropositionNode{parse_formula("p")});
  MessageId plain = s.post_message(alice, "plain");
  auto proof_of = [](std::vector<NodeId> premises) {
    return proof::ProofNode{std::move(premises), {parse_formula("p -> q -> p")}, parse_formula("q -> p")};
  };
  EXPECT_EQ(error_of([&] { s.post_message(alice, "x", proof_of({plain})); }), ErrorCode::unknown_premise);
  EXPECT_EQ(error_of([&] { s.post_message(alice, "x", proof_of({MessageId{50}})); }), ErrorCode::unknown_premise);
  EXPECT_EQ(error_of([&] { s.post_message(alice, "x", proof_of({p, p})); }), ErrorCode::malformed_node);
  MessageId ok = s.post_message(alice, "x", proof_of({p}));
  EXPECT_TRUE(s.snapshot()->find_node(ok));
}

TEST_F(StoreTest, HandlesAreUnique) {
  EXPECT_EQ(error_of([&] { s.add_user("alice"); }), ErrorCode::handle_taken);
  EXPECT_EQ(error_of([&] { s.add_user(""); }), ErrorCode::bad_request);
  EXPECT_EQ(s.snapshot()->find_user("bob")->id, bob);
}

// --- hotness ------------------------------------------------------------------

TEST_F(StoreTest, LastRatingWins) {
  MessageId m = s.post_message(alice, "m");
  s.rate_hotness(bob, m, 0.2);
  s.rate_hotness(bob, m, 0.9);
  Snapshot snap = s.snapshot();
  EXPECT_EQ(snap->ratings_for(m)->size(), 1u);
  EXPECT_EQ(snap->ratings_for(m)->at(bob).score, 0.9);
  EXPECT_EQ(aggregate_hotness(*snap, m), 0.9);
}

TEST_F(StoreTest, OutOfRangeRatingIsRejectedNotClamped) {
  MessageId m = s.post_message(alice, "m");
  s.rate_hotness(bob, m, 0.3);
  try {
    s.rate_hotness(bob, m, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range);
    EXPECT_EQ(e.field(), "score");
  }
  EXPECT_EQ(aggregate_hotness(*s.snapshot(), m), 0.3);
  EXPECT_EQ(error_of([&] { s.rate_hotness(bob, m, std::nan("")); }), ErrorCode::out_of_range);
  EXPECT_EQ(error_of([&] { s.rate_hotness(UserId{9}, m, 0.5); }), ErrorCode::unknown_user);
  EXPECT_EQ(error_of([&] { s.rate_hotness(bob, MessageId{9}, 0.5); }), ErrorCode::unknown_message);
}

TEST_F(StoreTest, BoundaryScoresAreAccepted) {
  MessageId m = s.post_message(alice, "m");
  s.rate_hotness(bob, m, 0.0);
  s.rate_hotness(carol, m, 1.0);
  EXPECT_EQ(aggregate_hotness(*s.snapshot(), m), 0.5);
}

TEST_F(StoreTest, AggregateIsTheMeanOfDistinctRaters) {
  MessageId m = s.post_message(alice, "m");
  s.rate_hotness(alice, m, 0.8);
  s.rate_hotness(bob, m, 0.4);
  const double expected = (0.8 + 0.4) / 2;  // 0.6
  EXPECT_DOUBLE_EQ(aggregate_hotness(*s.snapshot(), m), expected);
}

TEST_F(StoreTest, UnratedIsZeroAndSingleRatingIsItself) {
  MessageId m = s.post_message(alice, "m");
  EXPECT_EQ(aggregate_hotness(*s.snapshot(), m), 0.0);
  s.rate_hotness(carol, m, 0.35);
  EXPECT_EQ(aggregate_hotness(*s.snapshot(), m), 0.35);
  EXPECT_EQ(error_of([&] { aggregate_hotness(*s.snapshot(), MessageId{7}); }), ErrorCode::unknown_message);
}

TEST_F(StoreTest, RatingFuzzKeepsAggregatesInRange) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> score(-1.0, 2.0);
  std::vector<MessageId> msgs;
  for (int i = 0; i < 5; ++i) msgs.push_back(s.post_message(alice, "m"));
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> accepted;
  for (int i = 0; i < 2000; ++i) {
    double v = score(rng);
    UserId u{1 + rng() % 3};
    MessageId m = msgs[rng() % msgs.size()];
    bool ok = true;
    try {
      s.rate_hotness(u, m, v);
    } catch (const Error& e) {
      ok = false;
      ASSERT_EQ(e.code(), ErrorCode::out_of_range);
    }
    ASSERT_EQ(ok, v >= 0.0 && v <= 1.0) << v;
    if (ok) accepted[{m.value, u.value}] = v;
  }
  Snapshot snap = s.snapshot();
  for (MessageId m : msgs) {
    double h = aggregate_hotness(*snap, m);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 1.0);
  }
  EXPECT_EQ(snap->rating_count(), accepted.size());
}

// --- authority ------------------------------------------------------------------

TEST_F(StoreTest, OnlyAdminsDesignateAuthority) {
  ASSERT_EQ(alice, testkit::session_admin);
  s.set_authoritative(alice, bob, true);
  EXPECT_TRUE(s.snapshot()->find_user(bob)->authoritative);
  EXPECT_EQ(error_of([&] { s.set_authoritative(bob, carol, true); }), ErrorCode::permission_denied);
  EXPECT_FALSE(s.snapshot()->find_user(carol)->authoritative);
  EXPECT_EQ(error_of([&] { s.set_authoritative(alice, UserId{77}, true); }), ErrorCode::unknown_user);
}

TEST_F(StoreTest, AuthorityIsIdempotent) {
  s.set_authoritative(alice, bob, true);
  Snapshot once = s.snapshot();
  s.set_authoritative(alice, bob, true);
  EXPECT_EQ(*s.snapshot(), *once);
  s.set_authoritative(alice, bob, false);
  EXPECT_FALSE(s.snapshot()->find_user(bob)->authoritative);
}

// --- ids and snapshots ---------------------------------------------------------------

TEST_F(StoreTest, IdsAreSequentialAndNeverReused) {
  std::vector<MessageId> ids;
  for (int i = 0; i < 5; ++i) {
    ids.push_back(s.post_message(alice, "m"));
    try {
      s.post_message(alice, "bad", {}, CommentEdge{MessageId{1000}, Polarity::agree});
    } catch (const Error&) {
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], MessageId{i + 1});
}

TEST_F(StoreTest, SnapshotsAreImmutable) {
  MessageId m = s.post_message(alice, "m");
  Snapshot before = s.snapshot();
  EXPECT_EQ(before, s.snapshot());  // cached until the next write
  s.rate_hotness(bob, m, 1.0);
  EXPECT_EQ(before->aggregate_hotness(m), 0.0);
  EXPECT_EQ(s.snapshot()->aggregate_hotness(m), 1.0);
}

TEST_F(StoreTest, ImportProofPostsMessages) {
  auto lp = proof::parse_linear_proof(testkit::read_fixture("p_implies_p.prf"));
  proof::ImportResult r = s.import_proof(bob, lp);
  Snapshot snap = s.snapshot();
  EXPECT_EQ(snap->messages().size(), 2u);
  EXPECT_EQ(snap->find_message(r.root)->body, "mp p -> p");
  EXPECT_TRUE(proof::verify_derivation(*snap, r.root).valid);
  EXPECT_EQ(error_of([&] { s.import_proof(UserId{40}, lp); }), ErrorCode::unknown_author);
}

TEST_F(StoreTest, TheoriesNeedPropositionMembers) {
  MessageId p = s.post_message(alice, "p", proof::PropositionNode{parse_formula("p")});
  MessageId plain = s.post_message(alice, "plain");
  EXPECT_EQ(s.add_theory("t", {p}), TheoryId{1});
  EXPECT_EQ(error_of([&] { s.add_theory("u", {plain}); }), ErrorCode::unknown_member);
  EXPECT_EQ(error_of([&] { s.add_theory("u", {MessageId{30}}); }), ErrorCode::unknown_member);
}

TEST(StoreConcurrency, ParallelWritersGetDistinctIds) {
  Store s(testkit::session_config());
  for (int i = 0; i < 4; ++i) s.add_user("w" + std::to_string(i));
  std::vector<std::thread> threads;
  std::vector<std::vector<MessageId>> got(4);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 250; ++i) {
        got[t].push_back(s.post_message(UserId{static_cast<std::uint64_t>(t + 1)}, "m"));
        (void)s.snapshot()->messages().size();
      }
    });
  }
  for (auto& th : threads) th.join();
  std::set<MessageId> all;
  for (const auto& v : got) {
    EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
    all.insert(v.begin(), v.end());
  }
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_EQ(*all.rbegin(), MessageId{1000});
}

// --- event log and replay ------------------------------------------------------------

TEST(Replay, EmptyLogIsEmptyStore) {
  std::istringstream in("");
  StoreState state = replay(in);
  EXPECT_TRUE(state.users().empty());
  EXPECT_TRUE(state.messages().empty());
  testkit::TempDir dir;
  EXPECT_TRUE(replay_file(dir / "absent.jsonl").users().empty());
}

TEST(Replay, WireFormatExample) {
  std::istringstream in(
      "{\"ev\":\"user\",\"id\":1,\"handle\":\"a\"}\n"
      "{\"ev\":\"msg\",\"id\":1,\"author\":1,\"body\":\"claim\",\"kind\":\"prop\",\"formula\":\"p -> q\"}\n"
      "{\"ev\":\"msg\",\"id\":2,\"author\":1,\"body\":\"yes\",\"kind\":\"plain\",\"target\":1,\"polarity\":1}\n"
      "{\"ev\":\"hot\",\"user\":1,\"msg\":2,\"score\":0.25}\n");
  StoreState state = replay(in);
  EXPECT_EQ(state.messages().size(), 2u);
  EXPECT_EQ(state.find_message(MessageId{2})->comment->polarity, Polarity::agree);
  EXPECT_EQ(state.aggregate_hotness(MessageId{2}), 0.25);
}

TEST(Replay, IsDeterministicAndMatchesLiveState) {
  testkit::TempDir dir;
  std::mt19937_64 rng(41);
  testkit::ShadowStore shadow;
  StoreState live;
  {
    Store s(testkit::session_config(dir / "log.jsonl"));
    testkit::SessionGen session(rng, 10, 60);
    for (int i = 0; i < 300; ++i) session.step(s, shadow);
    s.import_proof(UserId{2}, proof::parse_linear_proof(testkit::read_fixture("p_implies_p.prf")));
    s.add_theory("t", {});
    live = *s.snapshot();
  }
  StoreState once = replay_file(dir / "log.jsonl");
  StoreState twice = replay_file(dir / "log.jsonl");
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once, live);

  // Reopening continues the id sequence.
  Store reopened(testkit::session_config(dir / "log.jsonl"));
  EXPECT_EQ(reopened.add_user("late"), UserId{live.users().size() + 1});
}

TEST(Replay, QueriesAgreeAfterReplay) {
  testkit::TempDir dir;
  std::mt19937_64 rng(42);
  testkit::ShadowStore shadow;
  Snapshot live;
  {
    Store s(testkit::session_config(dir / "log.jsonl"));
    testkit::SessionGen session(rng, 8, 40);
    for (int i = 0; i < 400; ++i) session.step(s, shadow);
    live = s.snapshot();
  }
  StoreState replayed = replay_file(dir / "log.jsonl");
  for (const Message& m : live->messages()) {
    for (auto pol : {Polarity::agree, Polarity::disagree, Polarity::no_opinion}) {
      ASSERT_EQ(query::best_arguments(replayed, m.id, pol), query::best_arguments(*live, m.id, pol));
    }
  }
}

TEST(Replay, TruncatedFinalLineIsCorrupt) {
  testkit::TempDir dir;
  {
    Store s(testkit::session_config(dir / "log.jsonl"));
    UserId u = s.add_user("a");
    MessageId m = s.post_message(u, "m");
    s.rate_hotness(u, m, 0.5);
  }
  std::string text = testkit::read_fixture((dir / "log.jsonl").string());
  ASSERT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  text.resize(text.size() - 6);
  std::istringstream in(text);
  try {
    replay(in);
    FAIL();
  } catch (const LineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::corrupt_event);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Replay, InapplicableEventIsCorrupt) {
  std::istringstream in(
      "{\"ev\":\"user\",\"id\":1,\"handle\":\"a\"}\n"
      "{\"ev\":\"hot\",\"user\":1,\"msg\":5,\"score\":0.5}\n");
  try {
    replay(in);
    FAIL();
  } catch (const LineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::corrupt_event);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Replay, RejectedWritesAreNotLogged) {
  testkit::TempDir dir;
  {
    Store s(testkit::session_config(dir / "log.jsonl"));
    UserId u = s.add_user("a");
    MessageId m = s.post_message(u, "m");
    EXPECT_THROW(s.rate_hotness(u, m, 2.0), Error);
    EXPECT_THROW(s.add_user("a"), Error);
  }
  StoreState state = replay_file(dir / "log.jsonl");
  EXPECT_EQ(state.rating_count(), 0u);
  EXPECT_EQ(state.users().size(), 1u);
}

TEST(Codec, EventsRoundTrip) {
  std::mt19937_64 rng(43);
  testkit::ShadowStore shadow;
  Store s(testkit::session_config());
  testkit::SessionGen session(rng, 6, 30);
  for (int i = 0; i < 200; ++i) session.step(s, shadow);
  s.import_proof(UserId{1}, proof::parse_linear_proof(testkit::read_fixture("p_implies_p.prf")));
  for (const Message& m : s.snapshot()->messages()) {
    Event ev = MessagePosted{m};
    Event back = event_from_json(nlohmann::json::parse(event_to_json(ev).dump()));
    ASSERT_EQ(std::get<MessagePosted>(back).message, m);
  }
}

TEST(Codec, PolarityWireValues) {
  EXPECT_EQ(polarity_from_json(1), Polarity::agree);
  EXPECT_EQ(polarity_from_json(0), Polarity::disagree);
  EXPECT_EQ(polarity_from_json(nullptr), Polarity::no_opinion);
  EXPECT_EQ(error_of([] { polarity_from_json(2); }), ErrorCode::bad_request);
  EXPECT_EQ(error_of([] { polarity_from_json("1"); }), ErrorCode::bad_request);
  EXPECT_EQ(error_of([] { polarity_from_json(true); }), ErrorCode::bad_request);
}

}  // namespace
