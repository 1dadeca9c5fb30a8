#pragma once

#include "ioforensics/archive.hpp"
#include "ioforensics/records.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace iof {

enum class InteractionKind { mention, retweet, reply, quote };
std::string_view to_string(InteractionKind k);

/// One directed social gesture from a tweet's author to another account.
struct InteractionEvent {
  UserId source;
  UserId target;
  InteractionKind kind = InteractionKind::mention;
  Timestamp timestamp{};
  std::string tweet_id;
  bool external = false;  // target is in neither ingested corpus

  bool operator==(const InteractionEvent&) const = default;
};

using EventSink = std::function<void(InteractionEvent&&)>;

/// Mention targets of a tweet, as user ids: the structured mention column when
/// present, otherwise handles scanned from the text and resolved through
/// `directory` (unresolved handles become "@handle").
std::vector<UserId> mention_targets(const TweetRecord& tweet, const UserDirectory& directory);

/// Emits one event for the kind-specific target (retweeted, replied-to or
/// quoted account) and one mention event per distinct mentioned account other
/// than the author and the kind-specific target.
void extract_interactions(const TweetRecord& tweet, const UserDirectory& directory, const EventSink& sink);
void extract_interactions(std::span<const TweetRecord> tweets, const UserDirectory& directory,
                          const EventSink& sink);
std::vector<InteractionEvent> extract_interactions(std::span<const TweetRecord> tweets,
                                                   const UserDirectory& directory);

}  // namespace iof
