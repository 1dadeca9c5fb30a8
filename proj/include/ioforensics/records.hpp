#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iof {

using UserId = std::string;
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

enum class Corpus { takedown, live, negative };
enum class SuspensionStatus { active, suspended_t1, suspended_t2, unknown };
enum class TweetKind { original, retweet, reply, quote };

std::string_view to_string(Corpus c);
std::string_view to_string(SuspensionStatus s);
std::string_view to_string(TweetKind k);
std::optional<Corpus> parse_corpus(std::string_view s);
std::optional<SuspensionStatus> parse_suspension_status(std::string_view s);

/// Accounts suspended in the first cohort are also suspended at the later check.
constexpr bool suspended_by_t2(SuspensionStatus s) {
  return s == SuspensionStatus::suspended_t1 || s == SuspensionStatus::suspended_t2;
}
constexpr bool suspended_by_t1(SuspensionStatus s) { return s == SuspensionStatus::suspended_t1; }

struct UserRecord {
  UserId user_id;
  std::optional<std::string> screen_name;  // absent when the archive hashed it
  std::optional<std::string> display_name;
  std::optional<std::string> profile_description;
  std::uint64_t follower_count = 0;
  std::uint64_t following_count = 0;
  Date account_creation_date{};
  std::optional<std::string> account_language;
  Corpus corpus = Corpus::takedown;
  SuspensionStatus suspension_status = SuspensionStatus::unknown;

  bool operator==(const UserRecord&) const = default;
};

struct TweetRecord {
  std::string tweet_id;
  UserId author_id;
  std::string text;
  Timestamp timestamp{};
  TweetKind kind = TweetKind::original;
  std::vector<UserId> target_user_ids;  // structured mention column, may be empty
  std::optional<UserId> retweeted_user_id;
  std::optional<UserId> replied_to_user_id;
  std::optional<UserId> quoted_user_id;
  std::optional<std::string> quoted_tweet_id;
  std::vector<std::string> hashtags;  // no leading '#', case-folded
  std::vector<std::string> urls;
  std::optional<std::string> language;

  bool operator==(const TweetRecord&) const = default;
};

// Date/time helpers. All times are UTC.
std::optional<Date> parse_date(std::string_view s);
/// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM", "YYYY-MM-DD HH:MM:SS" and the ISO
/// forms with 'T' separator and optional trailing 'Z'.
std::optional<Timestamp> parse_timestamp(std::string_view s);
std::string format_date(Date d);
std::string format_timestamp(Timestamp t);  // "YYYY-MM-DD HH:MM:SS"

}  // namespace iof
