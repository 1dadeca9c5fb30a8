#pragma once

#include "ioforensics/records.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iof {

enum class AccountType { main, retweet, backup, sequel, none };
std::string_view to_string(AccountType t);
std::optional<AccountType> parse_account_type(std::string_view s);

/// Lower rank wins when several type rules fire: sequel, backup, retweet, main.
int type_priority(AccountType t);

enum class RuleField { profile_description, display_name, tweet_hashtags };
std::string_view to_string(RuleField f);

enum class MatchKind {
  phrase,            // case-folded substring starting at a word boundary
  self_phrase,       // phrase not followed by an @handle (a reference to another account)
  hashtag,           // '#tag' token in text, or an entry of the tweet hashtag lists
  marker,            // exact code point sequence, no folding
  enclosing_marker,  // marker on both sides of some text
};
std::string_view to_string(MatchKind k);

struct RuleYield {
  enum class Kind { account_type, national, group, explicit_signal } kind = Kind::explicit_signal;
  AccountType account_type = AccountType::none;
  std::string group;

  bool operator==(const RuleYield&) const = default;
};

struct LabelRule {
  std::string id;
  RuleField field = RuleField::profile_description;
  MatchKind match = MatchKind::phrase;
  std::vector<std::string> patterns;
  RuleYield yields;

  bool operator==(const LabelRule&) const = default;
};

struct RuleSet {
  int version = 1;
  std::string name;
  std::vector<LabelRule> rules;

  bool operator==(const RuleSet&) const = default;
};

class RuleFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON rule file: {"version": 1, "name": ..., "rules": [{"id", "field",
/// "match", "patterns", "yields"}]}; yields is "type:<t>", "national",
/// "group:<name>" or "explicit".
RuleSet parse_rules(std::string_view json_text);
RuleSet load_rules(const std::filesystem::path& path);
std::string serialize_rules(const RuleSet& rules);

struct Memberships {
  bool national = false;
  std::set<std::string> groups;

  bool empty() const { return !national && groups.empty(); }
  bool operator==(const Memberships&) const = default;
};

struct AccountLabel {
  UserId user_id;
  AccountType account_type = AccountType::none;
  Memberships memberships;
  bool explicit_node = false;
  std::vector<std::string> matched_rules;  // every rule that fired, in rule-file order

  bool operator==(const AccountLabel&) const = default;
};

/// Rules with patterns pre-folded for repeated labelling.
class Labeler {
 public:
  /// Throws std::invalid_argument on an empty rule set.
  explicit Labeler(const RuleSet& rules);
  Labeler(const Labeler&) = delete;
  Labeler& operator=(const Labeler&) = delete;
  Labeler(Labeler&&) = default;  // vector moves keep element addresses
  Labeler& operator=(Labeler&&) = default;

  /// `tweets` may hold any slice of the corpus; only the user's own tweets are consulted.
  AccountLabel label(const UserRecord& user, std::span<const TweetRecord> tweets = {}) const;

 private:
  struct Compiled {
    const LabelRule* rule;
    std::vector<std::u32string> patterns;
  };
  bool fires(const Compiled& rule, const UserRecord& user, std::span<const TweetRecord> tweets) const;
  std::vector<LabelRule> rules_;  // owned; compiled_ points into it
  std::vector<Compiled> compiled_;
};

AccountLabel classify_account(const UserRecord& user, const RuleSet& rules,
                              std::span<const TweetRecord> tweets = {});

struct GroupMarker {
  std::string group;
  std::string pattern;
  MatchKind match = MatchKind::phrase;
};

/// Groups whose name phrase or emoji marker appears in the display name or the
/// profile description.
std::set<std::string> detect_group_membership(const UserRecord& user, std::span<const GroupMarker> markers);

/// Marks live accounts matched as direct sequels: sequel type unless another
/// type already applies, explicit in every case.
void apply_direct_sequels(std::vector<AccountLabel>& labels, const std::set<UserId>& sequel_user_ids);

struct ExplicitPartition {
  std::set<UserId> explicit_nodes;
  std::set<UserId> implicit_nodes;
};

/// Splits `nodes` by the explicit flag of their labels. Throws
/// std::invalid_argument for a node without a label.
ExplicitPartition partition_explicit(std::span<const UserId> nodes, std::span<const AccountLabel> labels);
ExplicitPartition partition_explicit(std::span<const AccountLabel> labels);

struct TypeTally {
  std::uint64_t total = 0;
  std::uint64_t retweets = 0;
  std::uint64_t originals = 0;
  /// retweets / total × 100 rounded to 1 decimal; absent with no tweets.
  std::optional<double> percent_retweets() const;
};

struct TaxonomyTally {
  std::map<AccountType, std::size_t> users;
  std::map<AccountType, TypeTally> tweets;
  std::size_t national_users = 0;
  std::map<std::string, std::size_t> group_users;
  TypeTally all_tweets;
};

/// Per-type user counts and tweet composition. Tweets by unlabelled authors
/// only contribute to all_tweets.
TaxonomyTally tally_by_type(std::span<const AccountLabel> labels, std::span<const TweetRecord> tweets);

/// user_id,account_type,memberships,explicit,matched_rules
void write_labels_csv(std::ostream& out, std::span<const AccountLabel> labels);

}  // namespace iof
