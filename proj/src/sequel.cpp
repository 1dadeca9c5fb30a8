#include "ioforensics/sequel.hpp"

#include "ioforensics/csv.hpp"
#include "ioforensics/parallel.hpp"
#include "ioforensics/similarity.hpp"
#include "ioforensics/text.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace iof {

void SequelThresholds::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!(username_high > username_low)) throw std::invalid_argument("username_high must exceed username_low");
  if (!in_unit(username_high) || !in_unit(username_low) || !in_unit(bio_min) || !in_unit(name_min))
    throw std::invalid_argument("sequel ratio thresholds must lie in (0, 1]");
  if (common_min < 1) throw std::invalid_argument("common_min must be at least 1");
}

std::string_view to_string(SequelRule r) {
  switch (r) {
    case SequelRule::high_username: return "high_username";
    case SequelRule::low_username_plus_evidence: return "low_username_plus_evidence";
    case SequelRule::none: return "none";
  }
  return "none";
}

SequelVerdict classify_sequel(const SimilarityScores& s, const SequelThresholds& t) {
  if (s.username_ratio > t.username_high) return {true, SequelRule::high_username};
  if (s.username_ratio > t.username_low) {
    const bool bio = s.bio_ratio && *s.bio_ratio > t.bio_min;
    const bool common = s.common_interactions >= t.common_min;
    const bool name = s.name_ratio && *s.name_ratio > t.name_min;
    if (bio || common || name) return {true, SequelRule::low_username_plus_evidence};
  }
  return {false, SequelRule::none};
}

// ---------------------------------------------------------------------------

InteractionIndex::InteractionIndex(std::span<const InteractionEvent> events) {
  for (const auto& e : events) add(e);
  finalize();
}

void InteractionIndex::add(const InteractionEvent& event) {
  if (event.source == event.target) return;
  targets_[event.source].push_back(event.target);
}

void InteractionIndex::finalize() {
  for (auto& [user, list] : targets_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

const std::vector<UserId>* InteractionIndex::targets(const UserId& user) const {
  auto it = targets_.find(user);
  return it == targets_.end() ? nullptr : &it->second;
}

std::size_t common_interactions(const UserId& u, const UserId& v, const InteractionIndex& index,
                                std::vector<UserId>* unknown) {
  const auto* tu = index.targets(u);
  const auto* tv = index.targets(v);
  if (unknown) {
    if (!tu) unknown->push_back(u);
    if (!tv) unknown->push_back(v);
  }
  if (!tu || !tv) return 0;
  std::size_t count = 0;
  auto a = tu->begin();
  auto b = tv->begin();
  while (a != tu->end() && b != tv->end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      if (*a != u && *a != v) ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

std::string fold_username(std::string_view screen_name) { return text::ascii_lower(screen_name); }

// ---------------------------------------------------------------------------

LiveCorpus::LiveCorpus(std::span<const UserRecord> live_users) {
  for (const auto& u : live_users) {
    if (!u.screen_name) {
      skipped_.push_back(u.user_id);
      continue;
    }
    entries_.push_back({&u, text::to_u32(fold_username(*u.screen_name))});
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.username != b.username) return a.username < b.username;
    return a.user->user_id < b.user->user_id;
  });
}

std::optional<BestMatch> best_match(std::string_view takedown_username, const LiveCorpus& live) {
  if (live.empty()) return std::nullopt;
  const LcsPattern pattern(text::to_u32(fold_username(takedown_username)));
  BestMatch best;
  double best_ratio = -1.0;
  for (const auto& entry : live.entries()) {
    // Entries are in tie-break order, so only a strictly better ratio replaces
    // the incumbent and a bound below it can be skipped without loss.
    if (username_ratio_bound(pattern.size(), entry.username.size()) < best_ratio) continue;
    const double r = pattern.ratio_with(entry.username);
    if (r > best_ratio) {
      best_ratio = r;
      best.live_user = entry.user;
    }
  }
  best.username_ratio = best_ratio;
  return best;
}

namespace {

std::optional<double> folded_gestalt(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  if (!a || !b) return std::nullopt;
  return gestalt_ratio(text::fold_turkish(*a), text::fold_turkish(*b));
}

}  // namespace

std::vector<SequelCandidate> SequelResult::sequels() const {
  std::vector<SequelCandidate> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [](const SequelCandidate& c) { return c.verdict; });
  return out;
}

SequelResult direct_sequels(std::span<const UserRecord> takedown_users, std::span<const UserRecord> live_users,
                            const InteractionIndex& index, const SequelOptions& options) {
  options.thresholds.validate();
  SequelResult result;
  const LiveCorpus live(live_users);
  result.skipped_live = live.skipped();
  if (live.empty()) {
    for (const auto& u : takedown_users)
      if (!u.screen_name) result.skipped_takedown.push_back(u.user_id);
    return result;
  }

  std::vector<const UserRecord*> queries;
  for (const auto& u : takedown_users) {
    if (u.screen_name)
      queries.push_back(&u);
    else
      result.skipped_takedown.push_back(u.user_id);
  }

  std::vector<SequelCandidate> slots(queries.size());
  std::vector<std::vector<UserId>> unknown(queries.size());
  parallel_for(queries.size(), options.threads, [&](unsigned, std::size_t i) {
    const UserRecord& t = *queries[i];
    const auto match = best_match(*t.screen_name, live);
    const UserRecord& l = *match->live_user;
    SequelCandidate& c = slots[i];
    c.takedown_user_id = t.user_id;
    c.live_user_id = l.user_id;
    c.takedown_label = *t.screen_name;
    c.live_label = l.screen_name.value_or(l.user_id);
    c.scores.username_ratio = match->username_ratio;
    c.scores.bio_ratio = folded_gestalt(t.profile_description, l.profile_description);
    c.scores.name_ratio = folded_gestalt(t.display_name, l.display_name);
    c.scores.common_interactions = common_interactions(t.user_id, l.user_id, index, &unknown[i]);
    const SequelVerdict v = classify_sequel(c.scores, options.thresholds);
    c.verdict = v.verdict;
    c.rule_fired = v.rule;
  });

  for (auto& u : unknown) result.unindexed_users.insert(result.unindexed_users.end(), u.begin(), u.end());
  std::sort(result.unindexed_users.begin(), result.unindexed_users.end());
  result.unindexed_users.erase(std::unique(result.unindexed_users.begin(), result.unindexed_users.end()),
                               result.unindexed_users.end());

  std::stable_sort(slots.begin(), slots.end(), [](const SequelCandidate& a, const SequelCandidate& b) {
    if (a.scores.username_ratio != b.scores.username_ratio) return a.scores.username_ratio > b.scores.username_ratio;
    return a.takedown_user_id < b.takedown_user_id;
  });
  result.candidates = std::move(slots);
  return result;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void write_sequel_csv(std::ostream& out, std::span<const SequelCandidate> candidates) {
  csv::write_row(out, {"takedown_username", "live_username", "username_similarity", "bio_similarity",
                       "name_similarity", "common_interactions", "verdict", "rule_fired"});
  for (const auto& c : candidates) {
    csv::write_row(out, {c.takedown_label, c.live_label, fixed3(c.scores.username_ratio),
                         c.scores.bio_ratio ? fixed3(*c.scores.bio_ratio) : "",
                         c.scores.name_ratio ? fixed3(*c.scores.name_ratio) : "",
                         std::to_string(c.scores.common_interactions), c.verdict ? "true" : "false",
                         std::string(to_string(c.rule_fired))});
  }
}

}  // namespace iof
