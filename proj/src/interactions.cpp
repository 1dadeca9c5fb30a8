#include "ioforensics/interactions.hpp"

#include <algorithm>

namespace iof {

std::string_view to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::mention: return "mention";
    case InteractionKind::retweet: return "retweet";
    case InteractionKind::reply: return "reply";
    case InteractionKind::quote: return "quote";
  }
  return "mention";
}

std::vector<UserId> mention_targets(const TweetRecord& tweet, const UserDirectory& directory) {
  std::vector<UserId> out;
  auto push_unique = [&](UserId id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
  };
  if (!tweet.target_user_ids.empty()) {
    for (const auto& id : tweet.target_user_ids) push_unique(id);
    return out;
  }
  for (const auto& handle : scan_mentions(tweet.text)) {
    if (const UserRecord* u = directory.find_by_screen_name(handle))
      push_unique(u->user_id);
    else
      push_unique("@" + handle);
  }
  return out;
}

void extract_interactions(const TweetRecord& tweet, const UserDirectory& directory, const EventSink& sink) {
  auto emit = [&](const UserId& target, InteractionKind kind) {
    InteractionEvent e;
    e.source = tweet.author_id;
    e.target = target;
    e.kind = kind;
    e.timestamp = tweet.timestamp;
    e.tweet_id = tweet.tweet_id;
    e.external = !directory.contains(target);
    sink(std::move(e));
  };

  const UserId* primary = nullptr;
  InteractionKind primary_kind = InteractionKind::mention;
  switch (tweet.kind) {
    case TweetKind::retweet:
      if (tweet.retweeted_user_id) primary = &*tweet.retweeted_user_id, primary_kind = InteractionKind::retweet;
      break;
    case TweetKind::reply:
      if (tweet.replied_to_user_id) primary = &*tweet.replied_to_user_id, primary_kind = InteractionKind::reply;
      break;
    case TweetKind::quote:
      if (tweet.quoted_user_id) primary = &*tweet.quoted_user_id, primary_kind = InteractionKind::quote;
      break;
    case TweetKind::original:
      break;
  }
  if (primary) emit(*primary, primary_kind);
  for (const auto& target : mention_targets(tweet, directory)) {
    if (target == tweet.author_id) continue;
    if (primary && target == *primary) continue;
    emit(target, InteractionKind::mention);
  }
}

void extract_interactions(std::span<const TweetRecord> tweets, const UserDirectory& directory,
                          const EventSink& sink) {
  for (const auto& t : tweets) extract_interactions(t, directory, sink);
}

std::vector<InteractionEvent> extract_interactions(std::span<const TweetRecord> tweets,
                                                   const UserDirectory& directory) {
  std::vector<InteractionEvent> out;
  extract_interactions(tweets, directory, [&](InteractionEvent&& e) { out.push_back(std::move(e)); });
  return out;
}

}  // namespace iof
