#include "ioforensics/interactions.hpp"

#include <doctest.h>

#include <set>

using namespace iof;

namespace {

UserRecord user(std::string id, std::string handle) {
  UserRecord u;
  u.user_id = std::move(id);
  u.screen_name = std::move(handle);
  return u;
}

TweetRecord tweet(std::string author, TweetKind kind) {
  TweetRecord t;
  t.tweet_id = "t";
  t.author_id = std::move(author);
  t.kind = kind;
  t.timestamp = std::chrono::sys_seconds{std::chrono::seconds{1580000000}};
  return t;
}

const UserDirectory kDir({user("A", "alice"), user("B", "bob"), user("C", "carol")});

}  // namespace

TEST_CASE("retweet yields one retweet event") {
  auto t = tweet("A", TweetKind::retweet);
  t.retweeted_user_id = "B";
  t.text = "RT @bob: hello";
  std::vector<TweetRecord> one{t};
  auto ev = extract_interactions(one, kDir);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].source == "A");
  CHECK(ev[0].target == "B");
  CHECK(ev[0].kind == InteractionKind::retweet);
  CHECK(ev[0].timestamp == t.timestamp);
  CHECK_FALSE(ev[0].external);
}

TEST_CASE("reply target is not repeated as a mention") {
  auto t = tweet("A", TweetKind::reply);
  t.replied_to_user_id = "B";
  t.target_user_ids = {"B", "C"};
  std::vector<TweetRecord> one{t};
  auto ev = extract_interactions(one, kDir);
  REQUIRE(ev.size() == 2);
  CHECK((ev[0].target == "B" && ev[0].kind == InteractionKind::reply));
  CHECK((ev[1].target == "C" && ev[1].kind == InteractionKind::mention));
}

TEST_CASE("retweet plus extra mentions, author excluded") {
  auto t = tweet("A", TweetKind::retweet);
  t.retweeted_user_id = "B";
  t.target_user_ids = {"B", "A", "C", "C"};
  std::vector<TweetRecord> one{t};
  auto ev = extract_interactions(one, kDir);
  REQUIRE(ev.size() == 2);
  CHECK(ev[1].target == "C");
}

TEST_CASE("text fallback resolves handles and flags unknown ones") {
  auto t = tweet("A", TweetKind::original);
  t.text = "@Bob and @stranger, hi @bob";
  std::vector<TweetRecord> one{t};
  auto ev = extract_interactions(one, kDir);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].target == "B");
  CHECK(ev[1].target == "@stranger");
  CHECK(ev[1].external);
}

TEST_CASE("quote uses the resolved quoted author") {
  auto t = tweet("A", TweetKind::quote);
  t.quoted_tweet_id = "q";
  t.quoted_user_id = "C";
  std::vector<TweetRecord> one{t};
  auto ev = extract_interactions(one, kDir);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].kind == InteractionKind::quote);
}

TEST_CASE("empty stream") {
  std::vector<TweetRecord> none;
  CHECK(extract_interactions(none, kDir).empty());
}

TEST_CASE("event count matches a per-tweet recount") {
  std::vector<TweetRecord> tweets;
  const TweetKind kinds[] = {TweetKind::original, TweetKind::retweet, TweetKind::reply, TweetKind::quote};
  const std::vector<std::vector<UserId>> mention_sets{{}, {"B"}, {"B", "C"}, {"A", "B", "B"}, {"X", "C"}};
  int n = 0;
  for (auto k : kinds)
    for (const auto& m : mention_sets)
      for (const char* target : {"B", "C", ""}) {
        auto t = tweet("A", k);
        t.tweet_id = std::to_string(n++);
        t.target_user_ids = m;
        if (*target) {
          if (k == TweetKind::retweet) t.retweeted_user_id = target;
          if (k == TweetKind::reply) t.replied_to_user_id = target;
          if (k == TweetKind::quote) t.quoted_user_id = target;
        }
        tweets.push_back(t);
      }
  std::size_t expected = 0;
  for (const auto& t : tweets) {
    std::optional<UserId> primary;
    if (t.kind == TweetKind::retweet) primary = t.retweeted_user_id;
    if (t.kind == TweetKind::reply) primary = t.replied_to_user_id;
    if (t.kind == TweetKind::quote) primary = t.quoted_user_id;
    std::set<UserId> mentions(t.target_user_ids.begin(), t.target_user_ids.end());
    mentions.erase(t.author_id);
    if (primary) mentions.erase(*primary);
    expected += mentions.size() + (primary ? 1 : 0);
  }
  CHECK(extract_interactions(tweets, kDir).size() == expected);
}
