#pragma once

#include "ioforensics/records.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace iof {

/// Column layout of a takedown archive. `required` columns must all be present;
/// `ignored` columns are tolerated and skipped. Any other header name is an error.
struct ArchiveSchema {
  std::vector<std::string> required;
  std::vector<std::string> ignored;

  /// The columns of the platform's information-operations release.
  static ArchiveSchema takedown();
};

/// Header mismatch: unknown or missing column.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rejection {
  std::size_t row = 0;  // 1-based data row (header excluded) or JSON line number
  std::string reason;
};

struct UserConflict {
  UserId user_id;
  std::size_t row = 0;
};

/// Outcome of one ingest pass. Users are in first-seen order; a later row with
/// the same user_id overwrites earlier fields and is recorded as a conflict
/// when any field differs.
struct IngestResult {
  std::vector<UserRecord> users;
  std::vector<Rejection> rejections;
  std::vector<UserConflict> conflicts;
  std::size_t rows_read = 0;
  std::size_t tweets_emitted = 0;

  double reject_ratio() const {
    return rows_read == 0 ? 0.0 : static_cast<double>(rejections.size()) / static_cast<double>(rows_read);
  }
  /// Runs with more than 1% rejected rows fail.
  bool within_reject_budget(double max_ratio = 0.01) const { return reject_ratio() <= max_ratio; }
};

using TweetSink = std::function<void(TweetRecord&&)>;

/// Streams a takedown CSV. Every data row yields one tweet through `sink` or one
/// rejection. Throws SchemaError when the header does not match `schema`.
IngestResult parse_takedown_archive(std::istream& in, const ArchiveSchema& schema, Corpus corpus,
                                    const TweetSink& sink);
IngestResult parse_takedown_archive(const std::filesystem::path& path, const ArchiveSchema& schema,
                                    Corpus corpus, const TweetSink& sink);

/// JSON-lines corpus, one tweet object per line with the CSV column names as keys.
/// List columns may be JSON arrays or bracketed strings.
IngestResult parse_jsonl_corpus(std::istream& in, Corpus corpus, const TweetSink& sink);
IngestResult parse_jsonl_corpus(const std::filesystem::path& path, Corpus corpus, const TweetSink& sink);

/// Chooses CSV or JSON-lines by file extension (.jsonl/.json → JSON-lines).
IngestResult parse_corpus_file(const std::filesystem::path& path, Corpus corpus, const TweetSink& sink);

/// Fills quoted_user_id from the author of the quoted tweet when that tweet is
/// part of `tweets`. Returns the number of quote targets resolved.
std::size_t resolve_quote_targets(std::vector<TweetRecord>& tweets);

/// Deterministic merge of per-shard user tables: shards are applied in order,
/// last write wins, conflicting rewrites are reported.
std::vector<UserRecord> merge_user_tables(const std::vector<std::vector<UserRecord>>& shards,
                                          std::vector<UserConflict>* conflicts = nullptr);

/// Writes users and tweets back in the takedown CSV layout (required columns only).
void write_takedown_archive(std::ostream& out, const std::vector<UserRecord>& users,
                            const std::vector<TweetRecord>& tweets);

/// Parses "[a, 'b', \"c\"]" style list cells. Empty cell or "[]" gives an empty list.
std::vector<std::string> parse_bracketed_list(std::string_view cell);
std::string format_bracketed_list(const std::vector<std::string>& items);

// ---------------------------------------------------------------------------
// Follow trains

struct MentionStats {
  std::size_t mentions = 0;
  std::size_t tokens = 0;
};

/// Tokens are maximal whitespace-separated substrings; a mention is a token
/// starting with '@' followed by at least one word character.
MentionStats mention_stats(std::string_view text);

/// At least 5 mentions and mentions/tokens strictly above 0.8.
bool detect_follow_train(std::string_view text);
inline bool detect_follow_train(const TweetRecord& tweet) { return detect_follow_train(tweet.text); }

/// Screen names (without '@') of the mention tokens in `text`, in order,
/// trailing punctuation stripped.
std::vector<std::string> scan_mentions(std::string_view text);

// ---------------------------------------------------------------------------
// Collection filters

struct CollectionFilter {
  int min_creation_year = 2020;
  std::set<UserId> excluded_user_ids;
};

bool passes_filter(const UserRecord& user, const CollectionFilter& filter);
std::vector<UserRecord> apply_collection_filter(const std::vector<UserRecord>& users,
                                                const CollectionFilter& filter);

// ---------------------------------------------------------------------------
// Suspension snapshots

struct SuspensionSnapshot {
  UserId user_id;
  std::string status;  // "active", "suspended", or an explicit cohort label
  Timestamp checked_at{};
};

std::vector<SuspensionSnapshot> read_suspension_snapshots(std::istream& in);
std::vector<SuspensionSnapshot> read_suspension_snapshots(const std::filesystem::path& path);

/// Assigns suspension cohorts. Users suspended at the earliest check time are
/// suspended_t1; users first seen suspended at a later check are suspended_t2;
/// users only seen active are active; users without snapshots are unknown.
void apply_suspension_snapshots(std::vector<UserRecord>& users,
                                const std::vector<SuspensionSnapshot>& snapshots);

// ---------------------------------------------------------------------------
// Snowball collection plan

class PlatformClient {
 public:
  virtual ~PlatformClient() = default;
  virtual std::vector<UserId> followers(const UserId& user) = 0;
  virtual std::vector<UserId> friends(const UserId& user) = 0;
};

/// Thrown when some parents could not be expanded; carries the union gathered
/// from the parents that succeeded.
class SnowballError : public std::runtime_error {
 public:
  SnowballError(std::vector<UserId> partial, std::vector<UserId> failed);
  const std::vector<UserId>& partial() const { return partial_; }
  const std::vector<UserId>& failed_parents() const { return failed_; }

 private:
  std::vector<UserId> partial_;
  std::vector<UserId> failed_;
};

/// Sorted, deduplicated union of followers and friends of every parent.
std::vector<UserId> plan_snowball(const std::vector<UserId>& parents, PlatformClient& client);

// ---------------------------------------------------------------------------

/// Lookup of every ingested account across corpora.
class UserDirectory {
 public:
  UserDirectory() = default;
  explicit UserDirectory(const std::vector<UserRecord>& users);

  void add(const UserRecord& user);
  const UserRecord* find(const UserId& id) const;
  bool contains(const UserId& id) const { return find(id) != nullptr; }
  /// Case-insensitive screen-name lookup.
  const UserRecord* find_by_screen_name(std::string_view screen_name) const;
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<UserId, UserRecord> by_id_;
  std::unordered_map<std::string, UserId> by_screen_name_;
};

}  // namespace iof
