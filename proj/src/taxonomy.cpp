#include "ioforensics/taxonomy.hpp"

#include "ioforensics/csv.hpp"
#include "ioforensics/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace iof {

std::string_view to_string(AccountType t) {
  switch (t) {
    case AccountType::main: return "main";
    case AccountType::retweet: return "retweet";
    case AccountType::backup: return "backup";
    case AccountType::sequel: return "sequel";
    case AccountType::none: return "none";
  }
  return "none";
}

std::optional<AccountType> parse_account_type(std::string_view s) {
  for (auto t : {AccountType::main, AccountType::retweet, AccountType::backup, AccountType::sequel, AccountType::none})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

int type_priority(AccountType t) {
  switch (t) {
    case AccountType::sequel: return 0;
    case AccountType::backup: return 1;
    case AccountType::retweet: return 2;
    case AccountType::main: return 3;
    case AccountType::none: return 4;
  }
  return 4;
}

std::string_view to_string(RuleField f) {
  switch (f) {
    case RuleField::profile_description: return "profile_description";
    case RuleField::display_name: return "display_name";
    case RuleField::tweet_hashtags: return "tweet_hashtags";
  }
  return "profile_description";
}

std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::phrase: return "phrase";
    case MatchKind::self_phrase: return "self_phrase";
    case MatchKind::hashtag: return "hashtag";
    case MatchKind::marker: return "marker";
    case MatchKind::enclosing_marker: return "enclosing_marker";
  }
  return "phrase";
}

namespace {

template <class E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const E (&values)[N]) {
  for (E v : values)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

constexpr RuleField kFields[] = {RuleField::profile_description, RuleField::display_name, RuleField::tweet_hashtags};
constexpr MatchKind kKinds[] = {MatchKind::phrase, MatchKind::self_phrase, MatchKind::hashtag, MatchKind::marker,
                                MatchKind::enclosing_marker};

RuleYield parse_yield(const std::string& s, const std::string& rule_id) {
  RuleYield y;
  if (s == "national") {
    y.kind = RuleYield::Kind::national;
  } else if (s == "explicit") {
    y.kind = RuleYield::Kind::explicit_signal;
  } else if (s.rfind("type:", 0) == 0) {
    auto t = parse_account_type(s.substr(5));
    if (!t || *t == AccountType::none) throw RuleFileError("rule '" + rule_id + "': bad account type in '" + s + "'");
    y.kind = RuleYield::Kind::account_type;
    y.account_type = *t;
  } else if (s.rfind("group:", 0) == 0 && s.size() > 6) {
    y.kind = RuleYield::Kind::group;
    y.group = s.substr(6);
  } else {
    throw RuleFileError("rule '" + rule_id + "': unknown yield '" + s + "'");
  }
  return y;
}

std::string format_yield(const RuleYield& y) {
  switch (y.kind) {
    case RuleYield::Kind::account_type: return "type:" + std::string(to_string(y.account_type));
    case RuleYield::Kind::national: return "national";
    case RuleYield::Kind::group: return "group:" + y.group;
    case RuleYield::Kind::explicit_signal: return "explicit";
  }
  return "explicit";
}

}  // namespace

RuleSet parse_rules(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw RuleFileError("rule file is not a JSON object");
  RuleSet set;
  set.version = doc.value("version", 0);
  if (set.version != 1) throw RuleFileError("unsupported rule file version " + std::to_string(set.version));
  set.name = doc.value("name", "");
  if (!doc.contains("rules") || !doc["rules"].is_array()) throw RuleFileError("rule file needs a 'rules' array");
  std::set<std::string> ids;
  for (const auto& r : doc["rules"]) {
    LabelRule rule;
    if (!r.is_object()) throw RuleFileError("rule entries must be objects");
    rule.id = r.value("id", "");
    if (rule.id.empty()) throw RuleFileError("rule without id");
    if (!ids.insert(rule.id).second) throw RuleFileError("duplicate rule id '" + rule.id + "'");
    auto field = parse_enum(r.value("field", ""), kFields);
    if (!field) throw RuleFileError("rule '" + rule.id + "': unknown field");
    rule.field = *field;
    auto match = parse_enum(r.value("match", ""), kKinds);
    if (!match) throw RuleFileError("rule '" + rule.id + "': unknown match kind");
    rule.match = *match;
    if (!r.contains("patterns") || !r["patterns"].is_array() || r["patterns"].empty())
      throw RuleFileError("rule '" + rule.id + "': needs a non-empty 'patterns' list");
    for (const auto& p : r["patterns"]) {
      if (!p.is_string() || p.get<std::string>().empty())
        throw RuleFileError("rule '" + rule.id + "': patterns must be non-empty strings");
      rule.patterns.push_back(p.get<std::string>());
    }
    if (rule.field == RuleField::tweet_hashtags && rule.match != MatchKind::hashtag)
      throw RuleFileError("rule '" + rule.id + "': tweet_hashtags rules must use hashtag matching");
    rule.yields = parse_yield(r.value("yields", ""), rule.id);
    set.rules.push_back(std::move(rule));
  }
  return set;
}

RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuleFileError("cannot open rule file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str());
}

std::string serialize_rules(const RuleSet& rules) {
  nlohmann::ordered_json doc;
  doc["version"] = rules.version;
  doc["name"] = rules.name;
  doc["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : rules.rules) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["field"] = std::string(to_string(r.field));
    j["match"] = std::string(to_string(r.match));
    j["patterns"] = r.patterns;
    j["yields"] = format_yield(r.yields);
    doc["rules"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

bool left_boundary(std::u32string_view text, std::size_t pos) {
  return pos == 0 || !text::is_word_codepoint(text[pos - 1]);
}

bool followed_by_handle(std::u32string_view text, std::size_t end) {
  static constexpr std::u32string_view kConnectors = U" \t:-=>–—➡\U0001F449";
  while (end < text.size() && kConnectors.find(text[end]) != std::u32string_view::npos) ++end;
  return end < text.size() && text[end] == U'@';
}

bool phrase_in(std::u32string_view text, std::u32string_view pattern, bool self_only) {
  for (std::size_t pos = text.find(pattern); pos != std::u32string_view::npos; pos = text.find(pattern, pos + 1)) {
    if (!left_boundary(text, pos)) continue;
    if (self_only && followed_by_handle(text, pos + pattern.size())) continue;
    return true;
  }
  return false;
}

bool hashtag_in(std::u32string_view text, std::u32string_view tag) {
  std::u32string needle = U"#";
  needle += tag;
  for (std::size_t pos = text.find(needle); pos != std::u32string_view::npos; pos = text.find(needle, pos + 1)) {
    const std::size_t end = pos + needle.size();
    if (end == text.size() || !text::is_word_codepoint(text[end])) return true;
  }
  return false;
}

bool enclosing_in(std::u32string_view text, std::u32string_view marker) {
  const std::size_t first = text.find(marker);
  if (first == std::u32string_view::npos) return false;
  return text.find(marker, first + marker.size() + 1) != std::u32string_view::npos;
}

std::u32string compile_pattern(const std::string& pattern, MatchKind kind) {
  switch (kind) {
    case MatchKind::marker:
    case MatchKind::enclosing_marker:
      return text::to_u32(text::nfc(pattern));
    case MatchKind::hashtag: {
      std::string_view p = pattern;
      while (!p.empty() && p.front() == '#') p.remove_prefix(1);
      return text::to_u32(text::fold_turkish(p));
    }
    case MatchKind::phrase:
    case MatchKind::self_phrase:
      return text::to_u32(text::fold_turkish(pattern));
  }
  return {};
}

bool match_text(std::u32string_view folded, std::u32string_view normalized, MatchKind kind,
                std::u32string_view pattern) {
  switch (kind) {
    case MatchKind::phrase: return phrase_in(folded, pattern, false);
    case MatchKind::self_phrase: return phrase_in(folded, pattern, true);
    case MatchKind::hashtag: return hashtag_in(folded, pattern);
    case MatchKind::marker: return normalized.find(pattern) != std::u32string_view::npos;
    case MatchKind::enclosing_marker: return enclosing_in(normalized, pattern);
  }
  return false;
}

struct PreparedField {
  std::u32string folded;
  std::u32string normalized;
};

PreparedField prepare(const std::optional<std::string>& s) {
  if (!s) return {};
  return {text::to_u32(text::fold_turkish(*s)), text::to_u32(text::nfc(*s))};
}

}  // namespace

Labeler::Labeler(const RuleSet& rules) : rules_(rules.rules) {
  if (rules_.empty()) throw std::invalid_argument("labelling needs at least one rule");
  for (const auto& r : rules_) {
    Compiled c{&r, {}};
    for (const auto& p : r.patterns) c.patterns.push_back(compile_pattern(p, r.match));
    compiled_.push_back(std::move(c));
  }
}

bool Labeler::fires(const Compiled& c, const UserRecord& user, std::span<const TweetRecord> tweets) const {
  const LabelRule& rule = *c.rule;
  if (rule.field == RuleField::tweet_hashtags) {
    for (const auto& t : tweets) {
      if (t.author_id != user.user_id) continue;
      for (const auto& h : t.hashtags) {
        const std::u32string tag = text::to_u32(h);
        for (const auto& p : c.patterns)
          if (tag == p) return true;
      }
    }
    return false;
  }
  return false;
}

AccountLabel Labeler::label(const UserRecord& user, std::span<const TweetRecord> tweets) const {
  AccountLabel label;
  label.user_id = user.user_id;
  const PreparedField description = prepare(user.profile_description);
  const PreparedField display = prepare(user.display_name);
  bool explicit_signal = false;
  int best_priority = type_priority(AccountType::none);

  for (const auto& c : compiled_) {
    const LabelRule& rule = *c.rule;
    bool hit = false;
    if (rule.field == RuleField::tweet_hashtags) {
      hit = fires(c, user, tweets);
    } else {
      const PreparedField& f = rule.field == RuleField::display_name ? display : description;
      for (const auto& p : c.patterns) {
        if (match_text(f.folded, f.normalized, rule.match, p)) {
          hit = true;
          break;
        }
      }
    }
    if (!hit) continue;
    label.matched_rules.push_back(rule.id);
    switch (rule.yields.kind) {
      case RuleYield::Kind::account_type: {
        const int prio = type_priority(rule.yields.account_type);
        if (prio < best_priority) {
          best_priority = prio;
          label.account_type = rule.yields.account_type;
        }
        break;
      }
      case RuleYield::Kind::national: label.memberships.national = true; break;
      case RuleYield::Kind::group: label.memberships.groups.insert(rule.yields.group); break;
      case RuleYield::Kind::explicit_signal: explicit_signal = true; break;
    }
  }
  label.explicit_node = label.account_type != AccountType::none || !label.memberships.empty() || explicit_signal;
  return label;
}

AccountLabel classify_account(const UserRecord& user, const RuleSet& rules, std::span<const TweetRecord> tweets) {
  return Labeler(rules).label(user, tweets);
}

std::set<std::string> detect_group_membership(const UserRecord& user, std::span<const GroupMarker> markers) {
  std::set<std::string> groups;
  const PreparedField fields[] = {prepare(user.display_name), prepare(user.profile_description)};
  for (const auto& m : markers) {
    const std::u32string pattern = compile_pattern(m.pattern, m.match);
    for (const auto& f : fields) {
      if (match_text(f.folded, f.normalized, m.match, pattern)) {
        groups.insert(m.group);
        break;
      }
    }
  }
  return groups;
}

void apply_direct_sequels(std::vector<AccountLabel>& labels, const std::set<UserId>& sequel_user_ids) {
  for (auto& l : labels) {
    if (!sequel_user_ids.count(l.user_id)) continue;
    if (l.account_type == AccountType::none) l.account_type = AccountType::sequel;
    l.explicit_node = true;
    l.matched_rules.emplace_back("direct_sequel");
  }
}

ExplicitPartition partition_explicit(std::span<const UserId> nodes, std::span<const AccountLabel> labels) {
  std::map<UserId, bool> flag;
  for (const auto& l : labels) flag[l.user_id] = l.explicit_node;
  ExplicitPartition p;
  for (const auto& id : nodes) {
    auto it = flag.find(id);
    if (it == flag.end()) throw std::invalid_argument("node '" + id + "' has no account label");
    (it->second ? p.explicit_nodes : p.implicit_nodes).insert(id);
  }
  return p;
}

ExplicitPartition partition_explicit(std::span<const AccountLabel> labels) {
  std::vector<UserId> nodes;
  for (const auto& l : labels) nodes.push_back(l.user_id);
  return partition_explicit(nodes, labels);
}

std::optional<double> TypeTally::percent_retweets() const {
  if (total == 0) return std::nullopt;
  // Integer half-up rounding to one decimal.
  const std::uint64_t tenths = (retweets * 2000 + total) / (2 * total);
  return static_cast<double>(tenths) / 10.0;
}

TaxonomyTally tally_by_type(std::span<const AccountLabel> labels, std::span<const TweetRecord> tweets) {
  TaxonomyTally tally;
  std::map<UserId, AccountType> type_of;
  for (const auto& l : labels) {
    type_of[l.user_id] = l.account_type;
    ++tally.users[l.account_type];
    if (l.memberships.national) ++tally.national_users;
    for (const auto& g : l.memberships.groups) ++tally.group_users[g];
  }
  auto count = [](TypeTally& t, const TweetRecord& tw) {
    ++t.total;
    if (tw.kind == TweetKind::retweet) ++t.retweets;
    else ++t.originals;
  };
  for (const auto& tw : tweets) {
    count(tally.all_tweets, tw);
    auto it = type_of.find(tw.author_id);
    if (it != type_of.end()) count(tally.tweets[it->second], tw);
  }
  return tally;
}

void write_labels_csv(std::ostream& out, std::span<const AccountLabel> labels) {
  csv::write_row(out, {"user_id", "account_type", "memberships", "explicit", "matched_rules"});
  for (const auto& l : labels) {
    std::string memberships;
    auto append = [](std::string& s, std::string_view item) {
      if (!s.empty()) s += ';';
      s += item;
    };
    if (l.memberships.national) append(memberships, "national");
    for (const auto& g : l.memberships.groups) append(memberships, "group:" + g);
    std::string rules;
    for (const auto& r : l.matched_rules) append(rules, r);
    csv::write_row(out, {l.user_id, std::string(to_string(l.account_type)), memberships,
                         l.explicit_node ? "true" : "false", rules});
  }
}

}  // namespace iof
