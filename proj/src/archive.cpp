#include "ioforensics/archive.hpp"

#include "ioforensics/csv.hpp"
#include "ioforensics/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace iof {

namespace {

// Canonical column order used internally for both CSV and JSON-lines rows.
enum Col : std::size_t {
  kTweetId,
  kUserId,
  kDisplayName,
  kScreenName,
  kDescription,
  kFollowers,
  kFollowing,
  kCreated,
  kTweetTime,
  kText,
  kIsRetweet,
  kRetweetUser,
  kReplyUser,
  kQuotedTweet,
  kMentions,
  kHashtags,
  kUrls,
  kTweetLanguage,
  kAccountLanguage,  // optional
  kColumnCount
};

constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "tweetid",          "userid",          "user_display_name", "user_screen_name",
    "user_profile_description", "follower_count", "following_count", "account_creation_date",
    "tweet_time",       "tweet_text",      "is_retweet",        "retweet_userid",
    "in_reply_to_userid", "quoted_tweet_tweetid", "user_mentions", "hashtags",
    "urls",             "tweet_language",  "account_language"};

using Row = std::array<std::string, kColumnCount>;

std::optional<std::size_t> canonical_index(std::string_view name) {
  for (std::size_t i = 0; i < kColumnNames.size(); ++i)
    if (kColumnNames[i] == name) return i;
  return std::nullopt;
}

std::optional<std::string> non_empty(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

// Platform handles are at most 15 characters; longer values in the handle
// column are the archive's hashes.
bool is_hashed_handle(std::string_view handle) { return handle.empty() || handle.size() > 15; }

std::optional<std::uint64_t> parse_count(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  // Some exports write counts as floats ("12.0").
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    if (s.find_first_not_of('0', dot + 1) != std::string_view::npos) return std::nullopt;
    s = s.substr(0, dot);
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  const std::string v = text::ascii_lower(text::trim(s));
  if (v == "true" || v == "1" || v == "t" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "f" || v == "no" || v.empty()) return false;
  return std::nullopt;
}

std::string strip_hash(std::string_view tag) {
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return std::string(tag);
}

struct Parsed {
  UserRecord user;
  TweetRecord tweet;
};

// Returns the rejection reason, or empty on success.
std::string convert_row(const Row& r, Corpus corpus, Parsed& out) {
  UserRecord& u = out.user;
  TweetRecord& t = out.tweet;
  if (r[kTweetId].empty()) return "empty tweetid";
  if (r[kUserId].empty()) return "empty userid";

  u.user_id = r[kUserId];
  u.corpus = corpus;
  u.suspension_status = SuspensionStatus::unknown;
  const std::string_view handle = r[kScreenName];
  if (is_hashed_handle(handle)) {
    u.screen_name.reset();
  } else {
    if (std::any_of(handle.begin(), handle.end(), [](char c) {
          return c == ' ' || c == '\t' || c == '\n' || c == '\r';
        }))
      return "screen name contains whitespace";
    u.screen_name = std::string(handle);
  }
  // Hashed accounts carry the same hash in the display-name column.
  if (!u.screen_name && (r[kDisplayName] == r[kScreenName] || r[kDisplayName] == r[kUserId]))
    u.display_name.reset();
  else
    u.display_name = non_empty(r[kDisplayName]);
  u.profile_description = non_empty(r[kDescription]);
  auto followers = parse_count(r[kFollowers]);
  if (!followers) return "bad follower_count '" + r[kFollowers] + "'";
  auto following = parse_count(r[kFollowing]);
  if (!following) return "bad following_count '" + r[kFollowing] + "'";
  u.follower_count = *followers;
  u.following_count = *following;
  auto created = parse_date(text::trim(r[kCreated]));
  if (!created) return "bad account_creation_date '" + r[kCreated] + "'";
  u.account_creation_date = *created;
  u.account_language = non_empty(r[kAccountLanguage]);

  t.tweet_id = r[kTweetId];
  t.author_id = u.user_id;
  t.text = r[kText];
  auto ts = parse_timestamp(text::trim(r[kTweetTime]));
  if (!ts) return "bad tweet_time '" + r[kTweetTime] + "'";
  t.timestamp = *ts;
  auto is_rt = parse_bool(r[kIsRetweet]);
  if (!is_rt) return "bad is_retweet '" + r[kIsRetweet] + "'";
  t.retweeted_user_id = non_empty(text::trim(r[kRetweetUser]));
  t.replied_to_user_id = non_empty(text::trim(r[kReplyUser]));
  t.quoted_tweet_id = non_empty(text::trim(r[kQuotedTweet]));
  t.quoted_user_id.reset();
  if (*is_rt) {
    if (!t.retweeted_user_id) return "retweet without retweet_userid";
    t.kind = TweetKind::retweet;
  } else if (t.replied_to_user_id) {
    t.kind = TweetKind::reply;
  } else if (t.quoted_tweet_id) {
    t.kind = TweetKind::quote;
  } else {
    t.kind = TweetKind::original;
  }
  if (!*is_rt) t.retweeted_user_id.reset();
  t.target_user_ids = parse_bracketed_list(r[kMentions]);
  t.hashtags.clear();
  for (const auto& h : parse_bracketed_list(r[kHashtags])) {
    std::string tag = strip_hash(h);
    if (!tag.empty()) t.hashtags.push_back(text::fold_turkish(tag));
  }
  t.urls = parse_bracketed_list(r[kUrls]);
  t.language = non_empty(text::trim(r[kTweetLanguage]));
  return {};
}

class IngestAccumulator {
 public:
  explicit IngestAccumulator(IngestResult& result) : result_(result) {}

  void accept_user(UserRecord&& u, std::size_t row) {
    auto it = index_.find(u.user_id);
    if (it == index_.end()) {
      index_.emplace(u.user_id, result_.users.size());
      result_.users.push_back(std::move(u));
      return;
    }
    UserRecord& existing = result_.users[it->second];
    if (!(existing == u)) {
      result_.conflicts.push_back({u.user_id, row});
      existing = std::move(u);
    }
  }

 private:
  IngestResult& result_;
  std::unordered_map<UserId, std::size_t> index_;
};

void process_row(const Row& row, std::size_t row_number, Corpus corpus, IngestResult& result,
                 IngestAccumulator& acc, const TweetSink& sink) {
  Parsed parsed;
  std::string reason = convert_row(row, corpus, parsed);
  if (!reason.empty()) {
    result.rejections.push_back({row_number, std::move(reason)});
    return;
  }
  acc.accept_user(std::move(parsed.user), row_number);
  ++result.tweets_emitted;
  if (sink) sink(std::move(parsed.tweet));
}

std::string json_cell(const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::vector<std::string> items;
    for (const auto& e : v) items.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    return format_bracketed_list(items);
  }
  return v.dump();
}

}  // namespace

ArchiveSchema ArchiveSchema::takedown() {
  ArchiveSchema s;
  for (std::size_t i = 0; i < kAccountLanguage; ++i) s.required.emplace_back(kColumnNames[i]);
  s.ignored = {"account_language",  "user_reported_location", "user_profile_url", "in_reply_to_tweetid",
               "retweet_tweetid",   "latitude",               "longitude",        "quote_count",
               "reply_count",       "like_count",             "retweet_count",    "poll_choices",
               "tweet_client_name", "is_quote"};
  return s;
}

IngestResult parse_takedown_archive(std::istream& in, const ArchiveSchema& schema, Corpus corpus,
                                    const TweetSink& sink) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError("archive is empty: missing header row");

  // header position -> canonical column (or none for ignored columns)
  std::vector<std::optional<std::size_t>> mapping;
  std::set<std::string> seen;
  for (const auto& raw : fields) {
    const std::string name(text::trim(raw));
    const bool required = std::find(schema.required.begin(), schema.required.end(), name) != schema.required.end();
    const bool ignored = std::find(schema.ignored.begin(), schema.ignored.end(), name) != schema.ignored.end();
    if (!required && !ignored) throw SchemaError("unknown column '" + name + "'");
    if (!seen.insert(name).second) throw SchemaError("duplicate column '" + name + "'");
    mapping.push_back(canonical_index(name));
  }
  for (const auto& name : schema.required)
    if (!seen.count(name)) throw SchemaError("missing required column '" + name + "'");

  IngestResult result;
  IngestAccumulator acc(result);
  Row row;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty() && !reader.malformed()) continue;  // blank line
    const std::size_t row_number = reader.record_number() - 1;
    ++result.rows_read;
    if (reader.malformed()) {
      result.rejections.push_back({row_number, "malformed CSV quoting"});
      continue;
    }
    if (fields.size() != mapping.size()) {
      result.rejections.push_back({row_number, "expected " + std::to_string(mapping.size()) + " fields, got " +
                                                   std::to_string(fields.size())});
      continue;
    }
    for (auto& cell : row) cell.clear();
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (mapping[i]) row[*mapping[i]] = std::move(fields[i]);
    process_row(row, row_number, corpus, result, acc, sink);
  }
  return result;
}

IngestResult parse_takedown_archive(const std::filesystem::path& path, const ArchiveSchema& schema,
                                    Corpus corpus, const TweetSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open archive " + path.string());
  return parse_takedown_archive(in, schema, corpus, sink);
}

IngestResult parse_jsonl_corpus(std::istream& in, Corpus corpus, const TweetSink& sink) {
  IngestResult result;
  IngestAccumulator acc(result);
  std::string line;
  std::size_t line_number = 0;
  Row row;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    ++result.rows_read;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.rejections.push_back({line_number, "invalid JSON object"});
      continue;
    }
    for (auto& cell : row) cell.clear();
    std::string missing;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      auto it = obj.find(std::string(kColumnNames[i]));
      if (it == obj.end()) {
        if (i != kAccountLanguage && missing.empty()) missing = std::string(kColumnNames[i]);
        continue;
      }
      row[i] = json_cell(*it);
    }
    if (!missing.empty()) {
      result.rejections.push_back({line_number, "missing field '" + missing + "'"});
      continue;
    }
    process_row(row, line_number, corpus, result, acc, sink);
  }
  return result;
}

IngestResult parse_jsonl_corpus(const std::filesystem::path& path, Corpus corpus, const TweetSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  return parse_jsonl_corpus(in, corpus, sink);
}

IngestResult parse_corpus_file(const std::filesystem::path& path, Corpus corpus, const TweetSink& sink) {
  const auto ext = text::ascii_lower(path.extension().string());
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return parse_jsonl_corpus(path, corpus, sink);
  return parse_takedown_archive(path, ArchiveSchema::takedown(), corpus, sink);
}

std::size_t resolve_quote_targets(std::vector<TweetRecord>& tweets) {
  std::unordered_map<std::string, UserId> author_of;
  author_of.reserve(tweets.size());
  for (const auto& t : tweets) author_of.emplace(t.tweet_id, t.author_id);
  std::size_t resolved = 0;
  for (auto& t : tweets) {
    if (!t.quoted_tweet_id) continue;
    auto it = author_of.find(*t.quoted_tweet_id);
    if (it == author_of.end()) continue;
    t.quoted_user_id = it->second;
    ++resolved;
  }
  return resolved;
}

std::vector<UserRecord> merge_user_tables(const std::vector<std::vector<UserRecord>>& shards,
                                          std::vector<UserConflict>* conflicts) {
  IngestResult merged;
  IngestAccumulator acc(merged);
  for (const auto& shard : shards)
    for (const auto& u : shard) acc.accept_user(UserRecord(u), 0);
  if (conflicts) *conflicts = std::move(merged.conflicts);
  return std::move(merged.users);
}

std::vector<std::string> parse_bracketed_list(std::string_view cell) {
  std::vector<std::string> out;
  cell = text::trim(cell);
  if (cell.size() >= 2 && cell.front() == '[' && cell.back() == ']') cell = cell.substr(1, cell.size() - 2);
  std::string current;
  char quote = 0;
  bool had_content = false;
  auto flush = [&] {
    std::string_view item = quote ? std::string_view(current) : text::trim(current);
    if (!item.empty() || had_content) out.emplace_back(item);
    current.clear();
    had_content = false;
  };
  for (std::size_t i = 0; i < cell.size(); ++i) {
    const char c = cell[i];
    if (quote) {
      if (c == '\\' && i + 1 < cell.size()) {
        current.push_back(cell[++i]);
      } else if (c == quote) {
        quote = 0;
      } else {
        current.push_back(c);
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      had_content = true;
      current.clear();
    } else if (c == ',') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  if (!text::trim(current).empty() || had_content) flush();
  return out;
}

std::string format_bracketed_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += '\'';
    for (char c : items[i]) {
      if (c == '\'' || c == '\\') out += '\\';
      out += c;
    }
    out += '\'';
  }
  out += ']';
  return out;
}

void write_takedown_archive(std::ostream& out, const std::vector<UserRecord>& users,
                            const std::vector<TweetRecord>& tweets) {
  std::unordered_map<UserId, const UserRecord*> by_id;
  for (const auto& u : users) by_id.emplace(u.user_id, &u);
  std::vector<std::string> header;
  for (std::size_t i = 0; i < kColumnCount; ++i) header.emplace_back(kColumnNames[i]);
  csv::write_row(out, header);
  Row row;
  for (const auto& t : tweets) {
    for (auto& cell : row) cell.clear();
    if (auto it = by_id.find(t.author_id); it != by_id.end()) {
      const UserRecord& u = *it->second;
      row[kUserId] = u.user_id;
      row[kDisplayName] = u.display_name.value_or("");
      row[kScreenName] = u.screen_name.value_or("");
      row[kDescription] = u.profile_description.value_or("");
      row[kFollowers] = std::to_string(u.follower_count);
      row[kFollowing] = std::to_string(u.following_count);
      row[kCreated] = format_date(u.account_creation_date);
      row[kAccountLanguage] = u.account_language.value_or("");
    } else {
      row[kUserId] = t.author_id;
    }
    row[kTweetId] = t.tweet_id;
    row[kTweetTime] = format_timestamp(t.timestamp);
    row[kText] = t.text;
    row[kIsRetweet] = t.kind == TweetKind::retweet ? "true" : "false";
    row[kRetweetUser] = t.retweeted_user_id.value_or("");
    row[kReplyUser] = t.replied_to_user_id.value_or("");
    row[kQuotedTweet] = t.quoted_tweet_id.value_or("");
    row[kMentions] = format_bracketed_list(t.target_user_ids);
    row[kHashtags] = format_bracketed_list(t.hashtags);
    row[kUrls] = format_bracketed_list(t.urls);
    row[kTweetLanguage] = t.language.value_or("");
    csv::write_row(out, std::vector<std::string>(row.begin(), row.end()));
  }
}

// ---------------------------------------------------------------------------

namespace {

bool is_mention_token(std::string_view token) {
  return token.size() >= 2 && token[0] == '@' && text::is_word_byte(token[1]);
}

}  // namespace

MentionStats mention_stats(std::string_view text) {
  MentionStats stats;
  for (auto token : text::split_whitespace(text)) {
    ++stats.tokens;
    if (is_mention_token(token)) ++stats.mentions;
  }
  return stats;
}

bool detect_follow_train(std::string_view text) {
  const MentionStats s = mention_stats(text);
  // mentions / tokens > 0.8  <=>  5 * mentions > 4 * tokens
  return s.mentions >= 5 && 5 * s.mentions > 4 * s.tokens;
}

std::vector<std::string> scan_mentions(std::string_view text) {
  std::vector<std::string> names;
  for (auto token : text::split_whitespace(text)) {
    if (!is_mention_token(token)) continue;
    std::size_t end = 1;
    while (end < token.size() && text::is_word_byte(token[end])) ++end;
    names.emplace_back(token.substr(1, end - 1));
  }
  return names;
}

// ---------------------------------------------------------------------------

bool passes_filter(const UserRecord& user, const CollectionFilter& filter) {
  if (filter.excluded_user_ids.count(user.user_id)) return false;
  return static_cast<int>(user.account_creation_date.year()) >= filter.min_creation_year;
}

std::vector<UserRecord> apply_collection_filter(const std::vector<UserRecord>& users,
                                                const CollectionFilter& filter) {
  std::vector<UserRecord> out;
  std::copy_if(users.begin(), users.end(), std::back_inserter(out),
               [&](const UserRecord& u) { return passes_filter(u, filter); });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SuspensionSnapshot> read_suspension_snapshots(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) return {};
  std::optional<std::size_t> id_col, status_col, time_col;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string name(text::trim(fields[i]));
    if (name == "user_id" || name == "userid") id_col = i;
    else if (name == "status") status_col = i;
    else if (name == "checked_at") time_col = i;
    else throw SchemaError("unknown suspension snapshot column '" + name + "'");
  }
  if (!id_col || !status_col || !time_col)
    throw SchemaError("suspension snapshot needs user_id, status, checked_at");
  std::vector<SuspensionSnapshot> out;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() <= std::max({*id_col, *status_col, *time_col}))
      throw std::runtime_error("suspension snapshot row " + std::to_string(reader.record_number()) +
                               " is short");
    auto ts = parse_timestamp(text::trim(fields[*time_col]));
    if (!ts)
      throw std::runtime_error("suspension snapshot row " + std::to_string(reader.record_number()) +
                               ": bad checked_at '" + fields[*time_col] + "'");
    out.push_back({std::string(text::trim(fields[*id_col])), text::ascii_lower(text::trim(fields[*status_col])),
                   *ts});
  }
  return out;
}

std::vector<SuspensionSnapshot> read_suspension_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open suspension snapshots " + path.string());
  return read_suspension_snapshots(in);
}

void apply_suspension_snapshots(std::vector<UserRecord>& users,
                                const std::vector<SuspensionSnapshot>& snapshots) {
  if (snapshots.empty()) return;
  Timestamp first_check = Timestamp::max();
  for (const auto& s : snapshots) first_check = std::min(first_check, s.checked_at);

  struct Seen {
    bool active = false;
    bool suspended_first = false;
    bool suspended_later = false;
    std::optional<SuspensionStatus> explicit_status;
  };
  std::unordered_map<UserId, Seen> seen;
  for (const auto& s : snapshots) {
    Seen& st = seen[s.user_id];
    if (s.status == "active") {
      st.active = true;
    } else if (s.status == "suspended") {
      (s.checked_at == first_check ? st.suspended_first : st.suspended_later) = true;
    } else if (auto parsed = parse_suspension_status(s.status); parsed && *parsed != SuspensionStatus::unknown) {
      st.explicit_status = parsed;
    }
  }
  for (auto& u : users) {
    auto it = seen.find(u.user_id);
    if (it == seen.end()) continue;
    const Seen& st = it->second;
    if (st.explicit_status) u.suspension_status = *st.explicit_status;
    else if (st.suspended_first) u.suspension_status = SuspensionStatus::suspended_t1;
    else if (st.suspended_later) u.suspension_status = SuspensionStatus::suspended_t2;
    else if (st.active) u.suspension_status = SuspensionStatus::active;
  }
}

// ---------------------------------------------------------------------------

namespace {
std::string snowball_message(const std::vector<UserId>& failed) {
  std::string msg = "snowball expansion failed for " + std::to_string(failed.size()) + " parent(s):";
  for (const auto& f : failed) msg += " " + f;
  return msg;
}
}  // namespace

SnowballError::SnowballError(std::vector<UserId> partial, std::vector<UserId> failed)
    : std::runtime_error(snowball_message(failed)), partial_(std::move(partial)), failed_(std::move(failed)) {}

std::vector<UserId> plan_snowball(const std::vector<UserId>& parents, PlatformClient& client) {
  std::set<UserId> accounts;
  std::vector<UserId> failed;
  for (const auto& p : parents) {
    try {
      auto fo = client.followers(p);
      auto fr = client.friends(p);
      accounts.insert(fo.begin(), fo.end());
      accounts.insert(fr.begin(), fr.end());
    } catch (const std::exception&) {
      failed.push_back(p);
    }
  }
  std::vector<UserId> out(accounts.begin(), accounts.end());
  if (!failed.empty()) throw SnowballError(std::move(out), std::move(failed));
  return out;
}

// ---------------------------------------------------------------------------

UserDirectory::UserDirectory(const std::vector<UserRecord>& users) {
  for (const auto& u : users) add(u);
}

void UserDirectory::add(const UserRecord& user) {
  by_id_[user.user_id] = user;
  if (user.screen_name) by_screen_name_[text::ascii_lower(*user.screen_name)] = user.user_id;
}

const UserRecord* UserDirectory::find(const UserId& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

const UserRecord* UserDirectory::find_by_screen_name(std::string_view screen_name) const {
  auto it = by_screen_name_.find(text::ascii_lower(screen_name));
  return it == by_screen_name_.end() ? nullptr : find(it->second);
}

}  // namespace iof
