#include <gtest/gtest.h>

#include <random>

#include "factgraph/query/arguments.hpp"
#include "factgraph/store/store.hpp"
#include "support/session.hpp"

namespace {

using namespace factgraph;
using namespace factgraph::store;
using query::best_arguments;

std::vector<std::uint64_t> ids_of(const query::ArgumentListing& l) {
  std::vector<std::uint64_t> out;
  for (const auto& e : l.entries) out.push_back(e.id.value);
  return out;
}

// m1 is the target; m2, m3 agree and m4 disagrees.
struct Debate : ::testing::Test {
  Store s{testkit::session_config()};
  UserId admin = s.add_user("admin");
  UserId u2 = s.add_user("u2");
  UserId u3 = s.add_user("u3");
  UserId u4 = s.add_user("u4");
  MessageId m1 = s.post_message(admin, "claim");
  MessageId m2 = s.post_message(u2, "yes", {}, CommentEdge{m1, Polarity::agree});
  MessageId m3 = s.post_message(u3, "yes!", {}, CommentEdge{m1, Polarity::agree});
  MessageId m4 = s.post_message(u4, "no", {}, CommentEdge{m1, Polarity::disagree});

  void SetUp() override {
    s.rate_hotness(admin, m2, 0.6);
    s.rate_hotness(admin, m3, 0.9);
    s.rate_hotness(admin, m4, 0.8);
  }
};

TEST_F(Debate, HottestFirstPerPolarity) {
  auto snap = s.snapshot();
  EXPECT_EQ(ids_of(best_arguments(*snap, m1, Polarity::agree, 10)), (std::vector<std::uint64_t>{3, 2}));
  EXPECT_EQ(ids_of(best_arguments(*snap, m1, Polarity::disagree, 10)), (std::vector<std::uint64_t>{4}));
  EXPECT_TRUE(best_arguments(*snap, m1, Polarity::no_opinion, 10).entries.empty());
  auto listing = best_arguments(*snap, m1, Polarity::agree);
  EXPECT_EQ(listing.entries[0].hotness, 0.9);
  EXPECT_EQ(listing.entries[1].hotness, 0.6);
}

TEST_F(Debate, AuthoritativeAuthorsComeFirst) {
  s.set_authoritative(admin, u3, true);
  s.rate_hotness(admin, m2, 0.95);
  auto listing = best_arguments(*s.snapshot(), m1, Polarity::agree, 10);
  EXPECT_EQ(ids_of(listing), (std::vector<std::uint64_t>{3, 2}));
  EXPECT_TRUE(listing.entries[0].authoritative);
  EXPECT_FALSE(listing.entries[1].authoritative);

  s.set_authoritative(admin, u3, false);
  EXPECT_EQ(ids_of(best_arguments(*s.snapshot(), m1, Polarity::agree)), (std::vector<std::uint64_t>{2, 3}));
}

TEST_F(Debate, TiesGoToTheOlderMessage) {
  s.rate_hotness(admin, m3, 0.6);
  EXPECT_EQ(ids_of(best_arguments(*s.snapshot(), m1, Polarity::agree)), (std::vector<std::uint64_t>{2, 3}));
}

TEST_F(Debate, LimitTruncates) {
  auto snap = s.snapshot();
  EXPECT_TRUE(best_arguments(*snap, m1, Polarity::agree, 0).entries.empty());
  EXPECT_EQ(ids_of(best_arguments(*snap, m1, Polarity::agree, 1)), (std::vector<std::uint64_t>{3}));
}

TEST_F(Debate, Counts) {
  EXPECT_EQ(query::argument_counts(*s.snapshot(), m1), (query::ArgumentCounts{2, 1, 0}));
  s.post_message(u2, "hmm", {}, CommentEdge{m1, Polarity::no_opinion});
  EXPECT_EQ(query::argument_counts(*s.snapshot(), m1), (query::ArgumentCounts{2, 1, 1}));
  EXPECT_EQ(query::argument_counts(*s.snapshot(), m2), (query::ArgumentCounts{0, 0, 0}));
}

TEST_F(Debate, UnknownTarget) {
  try {
    best_arguments(*s.snapshot(), MessageId{99}, Polarity::agree);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_target);
  }
}

TEST_F(Debate, PostFilterRunsBeforeTruncation) {
  query::PostFilter reverse = [](query::ArgumentListing& l) { std::reverse(l.entries.begin(), l.entries.end()); };
  EXPECT_EQ(ids_of(best_arguments(*s.snapshot(), m1, Polarity::agree, 1, reverse)),
            (std::vector<std::uint64_t>{2}));
}

TEST_F(Debate, CommentsOnCommentsStayLocal) {
  MessageId reply = s.post_message(u4, "re", {}, CommentEdge{m3, Polarity::disagree});
  EXPECT_EQ(ids_of(best_arguments(*s.snapshot(), m3, Polarity::disagree)),
            (std::vector<std::uint64_t>{reply.value}));
  EXPECT_EQ(ids_of(best_arguments(*s.snapshot(), m1, Polarity::disagree)), (std::vector<std::uint64_t>{4}));
}

// --- properties against the shadow model -------------------------------------------

std::vector<testkit::ShadowStore::Row> rows_of(const query::ArgumentListing& l) {
  std::vector<testkit::ShadowStore::Row> out;
  for (const auto& e : l.entries) out.push_back({e.id.value, e.hotness, e.authoritative});
  return out;
}

TEST(QueryProperties, MatchesShadowModel) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    Store s(testkit::session_config());
    testkit::ShadowStore shadow;
    testkit::SessionGen session(rng, 12, 80);
    const int writes = 50 + static_cast<int>(rng() % 300);
    for (int i = 0; i < writes; ++i) session.step(s, shadow);
    auto snap = s.snapshot();
    for (std::uint64_t target = 1; target <= std::min<std::size_t>(snap->messages().size(), 5); ++target) {
      for (auto pol : {Polarity::agree, Polarity::disagree, Polarity::no_opinion}) {
        for (std::size_t limit : {std::size_t{0}, std::size_t{1}, std::size_t{5}, query::unlimited}) {
          auto listing = best_arguments(*snap, MessageId{target}, pol, limit);
          ASSERT_EQ(rows_of(listing), shadow.listing(target, testkit::polarity_code(pol), limit))
              << "trial " << trial << " target " << target;
        }
      }
    }
  }
}

TEST(QueryProperties, StructuralInvariants) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    Store s(testkit::session_config());
    testkit::ShadowStore shadow;
    testkit::SessionGen session(rng, 10, 60);
    for (int i = 0; i < 250; ++i) session.step(s, shadow);
    auto snap = s.snapshot();
    for (const Message& target : snap->messages()) {
      for (auto pol : {Polarity::agree, Polarity::disagree, Polarity::no_opinion}) {
        auto full = best_arguments(*snap, target.id, pol);
        // Polarity purity.
        for (const auto& e : full.entries) {
          const Message* m = snap->find_message(e.id);
          ASSERT_EQ(m->comment->target, target.id);
          ASSERT_EQ(m->comment->polarity, pol);
        }
        // Authoritative prefix, then descending hotness with ascending id on ties.
        for (std::size_t i = 1; i < full.entries.size(); ++i) {
          const auto& a = full.entries[i - 1];
          const auto& b = full.entries[i];
          ASSERT_TRUE(a.authoritative || !b.authoritative);
          if (a.authoritative == b.authoritative) {
            ASSERT_TRUE(a.hotness > b.hotness || (a.hotness == b.hotness && a.id < b.id));
          }
        }
        // Limited listings are prefixes; repeated queries are identical.
        for (std::size_t k = 0; k <= full.entries.size(); ++k) {
          auto part = best_arguments(*snap, target.id, pol, k);
          ASSERT_TRUE(std::equal(part.entries.begin(), part.entries.end(), full.entries.begin()));
          ASSERT_EQ(part.entries.size(), k);
        }
        ASSERT_EQ(best_arguments(*snap, target.id, pol), full);
      }
    }
  }
}

}  // namespace
