#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "factgraph/error.hpp"
#include "factgraph/ids.hpp"
#include "factgraph/store/model.hpp"

namespace factgraph::query {

using store::Polarity;
using store::StoreState;

struct ArgumentEntry {
  MessageId id;
  double hotness = 0.0;
  bool authoritative = false;

  friend bool operator==(const ArgumentEntry&, const ArgumentEntry&) = default;
};

struct ArgumentListing {
  MessageId target;
  Polarity polarity = Polarity::agree;
  std::vector<ArgumentEntry> entries;

  friend bool operator==(const ArgumentListing&, const ArgumentListing&) = default;
};

/// Re-ranking stage applied after sorting and before truncation. Empty means
/// identity; per-user personalization plugs in here.
using PostFilter = std::function<void(ArgumentListing&)>;

inline constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();

/// Best arguments for (agree), against (disagree) or without opinion on
/// `target`: comments with exactly that polarity, authoritative authors
/// first, each segment by descending aggregate hotness with ties to the older
/// message, truncated to `limit`.
inline ArgumentListing best_arguments(const StoreState& snapshot, MessageId target, Polarity polarity,
                                      std::size_t limit = unlimited, const PostFilter& post_filter = {}) {
  if (!snapshot.find_message(target)) {
    throw Error(ErrorCode::unknown_target, "no message " + std::to_string(target.value), "target");
  }
  ArgumentListing listing{target, polarity, {}};
  for (MessageId id : snapshot.comments_on(target)) {
    const store::Message& m = *snapshot.find_message(id);
    if (m.comment->polarity != polarity) continue;
    const store::User* author = snapshot.find_user(m.author);
    listing.entries.push_back({id, snapshot.aggregate_hotness(id), author && author->authoritative});
  }
  std::sort(listing.entries.begin(), listing.entries.end(), [](const ArgumentEntry& a, const ArgumentEntry& b) {
    if (a.authoritative != b.authoritative) return a.authoritative;
    if (a.hotness != b.hotness) return a.hotness > b.hotness;
    return a.id < b.id;
  });
  if (post_filter) post_filter(listing);
  if (listing.entries.size() > limit) listing.entries.resize(limit);
  return listing;
}

struct ArgumentCounts {
  std::size_t agree = 0;
  std::size_t disagree = 0;
  std::size_t no_opinion = 0;

  friend bool operator==(const ArgumentCounts&, const ArgumentCounts&) = default;
};

inline ArgumentCounts argument_counts(const StoreState& snapshot, MessageId target) {
  if (!snapshot.find_message(target)) {
    throw Error(ErrorCode::unknown_target, "no message " + std::to_string(target.value), "target");
  }
  ArgumentCounts counts;
  for (MessageId id : snapshot.comments_on(target)) {
    switch (snapshot.find_message(id)->comment->polarity) {
      case Polarity::agree: ++counts.agree; break;
      case Polarity::disagree: ++counts.disagree; break;
      case Polarity::no_opinion: ++counts.no_opinion; break;
    }
  }
  return counts;
}

}  // namespace factgraph::query
