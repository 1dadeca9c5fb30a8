#pragma once

#include "ioforensics/interactions.hpp"
#include "ioforensics/records.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iof {

struct SimilarityScores {
  double username_ratio = 0.0;
  std::optional<double> bio_ratio;   // absent when either description is null
  std::optional<double> name_ratio;  // absent when either display name is null
  std::size_t common_interactions = 0;
};

struct SequelThresholds {
  double username_high = 0.9;
  double username_low = 0.6;
  double bio_min = 0.5;
  double name_min = 0.8;
  std::size_t common_min = 2;

  /// Throws std::invalid_argument unless high > low, ratios in (0, 1], common_min ≥ 1.
  void validate() const;
};

enum class SequelRule { high_username, low_username_plus_evidence, none };
std::string_view to_string(SequelRule r);

struct SequelVerdict {
  bool verdict = false;
  SequelRule rule = SequelRule::none;
};

/// Username ratio > high; or > low together with bio > bio_min, name > name_min,
/// or at least common_min shared third parties.
SequelVerdict classify_sequel(const SimilarityScores& scores, const SequelThresholds& thresholds = {});

/// Distinct interaction targets per account, all kinds pooled, self excluded.
class InteractionIndex {
 public:
  InteractionIndex() = default;
  explicit InteractionIndex(std::span<const InteractionEvent> events);
  void add(const InteractionEvent& event);
  /// Sorts and deduplicates target lists; call after the last add().
  void finalize();

  bool contains(const UserId& user) const { return targets_.count(user) > 0; }
  const std::vector<UserId>* targets(const UserId& user) const;

 private:
  std::unordered_map<UserId, std::vector<UserId>> targets_;
};

/// |targets(u) ∩ targets(v)| excluding u and v. Unknown users count 0; `unknown`
/// receives the ids that were missing from the index.
std::size_t common_interactions(const UserId& u, const UserId& v, const InteractionIndex& index,
                                std::vector<UserId>* unknown = nullptr);

/// Usernames are ASCII by platform rules; lowercased byte-wise.
std::string fold_username(std::string_view screen_name);

/// Live accounts prepared for repeated best-match queries. Accounts without a
/// visible username are skipped and listed in `skipped()`.
class LiveCorpus {
 public:
  explicit LiveCorpus(std::span<const UserRecord> live_users);

  struct Entry {
    const UserRecord* user;
    std::u32string username;  // folded
  };
  std::span<const Entry> entries() const { return entries_; }  // sorted by (username, user_id)
  const std::vector<UserId>& skipped() const { return skipped_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
  std::vector<UserId> skipped_;
};

struct BestMatch {
  const UserRecord* live_user = nullptr;
  double username_ratio = 0.0;
};

/// Highest username ratio in the live corpus; ties go to the lexicographically
/// smallest folded username, then the smallest user_id. Empty corpus → nullopt.
std::optional<BestMatch> best_match(std::string_view takedown_username, const LiveCorpus& live);

struct SequelCandidate {
  UserId takedown_user_id;
  UserId live_user_id;
  std::string takedown_label;  // username, or user_id when hashed
  std::string live_label;
  SimilarityScores scores;
  bool verdict = false;
  SequelRule rule_fired = SequelRule::none;
};

struct SequelResult {
  std::vector<SequelCandidate> candidates;  // username_ratio descending
  std::vector<UserId> skipped_takedown;      // no visible username
  std::vector<UserId> skipped_live;
  std::vector<UserId> unindexed_users;       // absent from the interaction index

  std::vector<SequelCandidate> sequels() const;
};

struct SequelOptions {
  SequelThresholds thresholds;
  unsigned threads = 0;
};

/// One candidate per takedown account with a visible username: its best live
/// match, full scores and verdict.
SequelResult direct_sequels(std::span<const UserRecord> takedown_users, std::span<const UserRecord> live_users,
                            const InteractionIndex& index, const SequelOptions& options = {});

/// takedown_username,live_username,username_similarity,bio_similarity,
/// name_similarity,common_interactions,verdict,rule_fired
void write_sequel_csv(std::ostream& out, std::span<const SequelCandidate> candidates);

}  // namespace iof
