#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace factgraph {

template <class Tag>
struct StrongId {
  std::uint64_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
  friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << id.value; }
};

struct UserTag;
struct MessageTag;
struct TheoryTag;

using UserId = StrongId<UserTag>;
using MessageId = StrongId<MessageTag>;
using TheoryId = StrongId<TheoryTag>;

// Proposition and proof nodes live inside messages and share their ids.
using NodeId = MessageId;

}  // namespace factgraph

template <class Tag>
struct std::hash<factgraph::StrongId<Tag>> {
  std::size_t operator()(factgraph::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
