#include "ioforensics/pipeline.hpp"

#include "ioforensics/csv.hpp"
#include "ioforensics/digest.hpp"
#include "ioforensics/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace iof {

namespace {

constexpr std::size_t kRejectionSamples = 50;

Json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write-then-rename so a crash never leaves a truncated artifact behind.
void write_file(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ostringstream out;
  fn(out);
  write_file(path, out.str());
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void PipelineConfig::validate() const {
  if (!seed) throw ConfigError("seed is mandatory (set \"seed\" in the config or pass --seed)");
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (output_dir.empty()) throw ConfigError("output directory is not set");
  if (!(max_reject_ratio >= 0.0 && max_reject_ratio <= 1.0)) throw ConfigError("max_reject_ratio must lie in [0, 1]");
  bool any = false;
  for (const auto& [corpus, files] : corpora) {
    for (const auto& f : files) {
      any = true;
      if (!fs::is_regular_file(f)) throw ConfigError(std::string(to_string(corpus)) + " corpus file not found: " + f.string());
    }
  }
  if (!any) throw ConfigError("no corpus files configured");
  auto must_exist = [](const std::optional<fs::path>& p, const char* what) {
    if (p && !fs::is_regular_file(*p)) throw ConfigError(std::string(what) + " not found: " + p->string());
  };
  must_exist(suspensions, "suspension snapshot file");
  must_exist(std::optional<fs::path>(rules), "rule file");
  must_exist(classifier_metrics, "classifier metrics file");
  must_exist(classifier_predictions, "classifier predictions file");
  try {
    thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("thresholds: ") + e.what());
  }
  for (const auto& w : windows) {
    if (w.name.empty()) throw ConfigError("window without a name");
    if (!(w.window.start < w.window.end)) throw ConfigError("window '" + w.name + "' is empty");
  }
}

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  const Json j = parse_json_text(json_text, "config");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"corpora",   "suspensions", "rules",   "live_filter",
                                           "thresholds", "seed",        "trials",  "windows",
                                           "classifier", "output_dir",  "max_reject_ratio", "threads"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  PipelineConfig c;
  try {
    if (j.contains("corpora")) {
      for (const auto& [name, files] : j.at("corpora").items()) {
        auto corpus = parse_corpus(name);
        if (!corpus) throw ConfigError("unknown corpus '" + name + "'");
        auto& list = c.corpora[*corpus];
        if (files.is_string()) list.push_back(resolve(base_dir, files.get<std::string>()));
        else
          for (const auto& f : files) list.push_back(resolve(base_dir, f.get<std::string>()));
      }
    }
    if (j.contains("suspensions")) c.suspensions = resolve(base_dir, j.at("suspensions").get<std::string>());
    c.rules = j.contains("rules") ? resolve(base_dir, j.at("rules").get<std::string>()) : fs::path(IOF_DEFAULT_RULES);
    if (j.contains("live_filter")) {
      const Json& f = j.at("live_filter");
      CollectionFilter filter;
      filter.min_creation_year = f.value("min_creation_year", filter.min_creation_year);
      if (f.contains("excluded_user_ids"))
        for (const auto& id : f.at("excluded_user_ids")) filter.excluded_user_ids.insert(id.get<std::string>());
      c.live_filter = std::move(filter);
    }
    if (j.contains("thresholds")) {
      const Json& t = j.at("thresholds");
      c.thresholds.username_high = t.value("username_high", c.thresholds.username_high);
      c.thresholds.username_low = t.value("username_low", c.thresholds.username_low);
      c.thresholds.bio_min = t.value("bio_min", c.thresholds.bio_min);
      c.thresholds.name_min = t.value("name_min", c.thresholds.name_min);
      c.thresholds.common_min = t.value("common_min", c.thresholds.common_min);
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.trials = j.value("trials", c.trials);
    if (j.contains("windows")) {
      for (const auto& w : j.at("windows")) {
        NamedWindow nw;
        nw.name = w.at("name").get<std::string>();
        auto start = parse_timestamp(w.at("start").get<std::string>());
        auto end = parse_timestamp(w.at("end").get<std::string>());
        if (!start || !end) throw ConfigError("window '" + nw.name + "' has an unparseable bound");
        nw.window = {*start, *end};
        c.windows.push_back(std::move(nw));
      }
    }
    if (j.contains("classifier")) {
      const Json& cl = j.at("classifier");
      if (cl.contains("metrics")) c.classifier_metrics = resolve(base_dir, cl.at("metrics").get<std::string>());
      if (cl.contains("predictions"))
        c.classifier_predictions = resolve(base_dir, cl.at("predictions").get<std::string>());
    }
    c.output_dir = j.contains("output_dir") ? resolve(base_dir, j.at("output_dir").get<std::string>())
                                            : (base_dir / "out").lexically_normal();
    c.max_reject_ratio = j.value("max_reject_ratio", c.max_reject_ratio);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(text, base);
}

// ---------------------------------------------------------------------------
// Ingest

std::vector<UserRecord> IngestedData::graph_users() const {
  std::vector<UserRecord> out;
  for (Corpus c : {Corpus::takedown, Corpus::live}) {
    auto it = users.find(c);
    if (it != users.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<TweetRecord> IngestedData::graph_tweets() const {
  std::vector<TweetRecord> out;
  for (Corpus c : {Corpus::takedown, Corpus::live}) {
    auto it = tweets.find(c);
    if (it != tweets.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

IngestedData run_ingest(const PipelineConfig& config) {
  IngestedData data;
  Sha256 digest;
  digest.field("ingest").field(kToolVersion);

  for (const auto& [corpus, files] : config.corpora) {
    auto& summary = data.summary[corpus];
    auto& tweets = data.tweets[corpus];
    std::vector<std::vector<UserRecord>> shards;
    std::vector<UserConflict> conflicts;
    for (const auto& file : files) {
      digest.field(to_string(corpus)).field(sha256_file(file));
      IngestResult r;
      try {
        r = parse_corpus_file(file, corpus, [&](TweetRecord&& t) { tweets.push_back(std::move(t)); });
      } catch (const std::exception& e) {
        throw StageError("ingest", file.string() + ": " + e.what());
      }
      ++summary.files;
      summary.rows += r.rows_read;
      summary.rejections += r.rejections.size();
      summary.conflicts += r.conflicts.size();
      for (auto& rej : r.rejections)
        data.rejections.push_back({rej.row, file.filename().string() + ": " + rej.reason});
      shards.push_back(std::move(r.users));
    }
    data.users[corpus] = merge_user_tables(shards, &conflicts);
    summary.conflicts += conflicts.size();
  }

  if (config.live_filter) {
    const auto& f = *config.live_filter;
    digest.field("live_filter").field(std::to_string(f.min_creation_year));
    for (const auto& id : f.excluded_user_ids) digest.field(id);
    auto it = data.users.find(Corpus::live);
    if (it != data.users.end()) {
      auto kept = apply_collection_filter(it->second, f);
      data.summary[Corpus::live].filtered_out = it->second.size() - kept.size();
      std::set<UserId> keep_ids;
      for (const auto& u : kept) keep_ids.insert(u.user_id);
      it->second = std::move(kept);
      auto& tw = data.tweets[Corpus::live];
      std::erase_if(tw, [&](const TweetRecord& t) { return !keep_ids.count(t.author_id); });
    }
  }

  // Quotes may cross corpora, so resolve on the concatenation.
  {
    std::vector<TweetRecord> all;
    std::vector<std::pair<Corpus, std::size_t>> sizes;
    for (auto& [corpus, tw] : data.tweets) {
      sizes.emplace_back(corpus, tw.size());
      std::move(tw.begin(), tw.end(), std::back_inserter(all));
      tw.clear();
    }
    resolve_quote_targets(all);
    std::size_t offset = 0;
    for (const auto& [corpus, n] : sizes) {
      auto first = all.begin() + static_cast<std::ptrdiff_t>(offset);
      data.tweets[corpus].assign(std::make_move_iterator(first),
                                 std::make_move_iterator(first + static_cast<std::ptrdiff_t>(n)));
      offset += n;
    }
  }

  if (config.suspensions) {
    digest.field("suspensions").field(sha256_file(*config.suspensions));
    std::vector<SuspensionSnapshot> snapshots;
    try {
      snapshots = read_suspension_snapshots(*config.suspensions);
    } catch (const std::exception& e) {
      throw StageError("ingest", config.suspensions->string() + ": " + e.what());
    }
    for (auto& [_, users] : data.users) apply_suspension_snapshots(users, snapshots);
  }

  for (auto& [corpus, tw] : data.tweets) {
    // Grouped by author so per-account stages can take contiguous slices.
    std::stable_sort(tw.begin(), tw.end(),
                     [](const TweetRecord& a, const TweetRecord& b) { return a.author_id < b.author_id; });
    auto& s = data.summary[corpus];
    s.tweets = tw.size();
    s.users = data.users[corpus].size();
    for (const auto& t : tw) {
      if (t.kind == TweetKind::retweet) ++s.retweets;
      if (detect_follow_train(t)) ++s.follow_trains;
    }
  }

  digest.field("max_reject_ratio").field(exact(config.max_reject_ratio));
  data.digest = digest.hex();
  return data;
}

namespace {

Json summary_json(const CorpusSummary& s) {
  return {{"files", s.files},         {"rows", s.rows},           {"users", s.users},
          {"tweets", s.tweets},       {"rejections", s.rejections}, {"conflicts", s.conflicts},
          {"retweets", s.retweets},   {"follow_trains", s.follow_trains}, {"filtered_out", s.filtered_out}};
}

Json ingest_json(const IngestedData& data, bool all_rejections) {
  Json corpora = Json::object();
  std::size_t rows = 0;
  for (const auto& [corpus, s] : data.summary) {
    corpora[std::string(to_string(corpus))] = summary_json(s);
    rows += s.rows;
  }
  Json rejections = Json::array();
  const std::size_t limit = all_rejections ? data.rejections.size() : std::min(data.rejections.size(), kRejectionSamples);
  for (std::size_t i = 0; i < limit; ++i)
    rejections.push_back({{"row", data.rejections[i].row}, {"reason", data.rejections[i].reason}});
  Json j;
  j["corpora"] = std::move(corpora);
  j["rows_read"] = rows;
  j["rows_rejected"] = data.rejections.size();
  j["rejections"] = std::move(rejections);
  return j;
}

std::span<const TweetRecord> tweets_of(const std::vector<TweetRecord>& sorted, const UserId& user) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), user,
                             [](const TweetRecord& t, const UserId& id) { return t.author_id < id; });
  auto hi = lo;
  while (hi != sorted.end() && hi->author_id == user) ++hi;
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Stage cache: one JSON file per stage, named by the digest of its inputs.

class StageCache {
 public:
  explicit StageCache(fs::path dir) : dir_(std::move(dir)) {}

  std::optional<Json> load(const std::string& stage, const std::string& key) const {
    const fs::path p = path(stage, key);
    if (!fs::is_regular_file(p)) return std::nullopt;
    try {
      Json j = Json::parse(read_file(p));
      if (j.value("key", "") != key) return std::nullopt;
      return j.at("value");
    } catch (const std::exception&) {
      return std::nullopt;  // unreadable entries are recomputed
    }
  }

  void store(const std::string& stage, const std::string& key, Json value) const {
    Json j;
    j["key"] = key;
    j["value"] = std::move(value);
    write_file(path(stage, key), j.dump());
  }

 private:
  fs::path path(const std::string& stage, const std::string& key) const {
    return dir_ / (stage + "-" + key.substr(0, 24) + ".json");
  }
  fs::path dir_;
};

Json tally_json(const TypeTally& t) {
  const auto pct = t.percent_retweets();
  return {{"tweets", t.total}, {"retweets", t.retweets}, {"originals", t.originals},
          {"percent_retweets", pct ? Json(*pct) : Json(nullptr)}};
}

Json taxonomy_json(const std::vector<AccountLabel>& labels, const IngestedData& data) {
  std::map<UserId, const AccountLabel*> by_id;
  for (const auto& l : labels) by_id[l.user_id] = &l;
  Json out = Json::object();
  for (Corpus corpus : {Corpus::takedown, Corpus::live}) {
    auto users = data.users.find(corpus);
    if (users == data.users.end()) continue;
    std::vector<AccountLabel> subset;
    for (const auto& u : users->second)
      if (auto it = by_id.find(u.user_id); it != by_id.end()) subset.push_back(*it->second);
    const auto tw = data.tweets.find(corpus);
    const std::span<const TweetRecord> tweets =
        tw == data.tweets.end() ? std::span<const TweetRecord>{} : std::span<const TweetRecord>(tw->second);
    const TaxonomyTally tally = tally_by_type(subset, tweets);

    Json types = Json::object();
    for (AccountType t : {AccountType::main, AccountType::retweet, AccountType::backup, AccountType::sequel,
                          AccountType::none}) {
      Json row = tally_json(tally.tweets.count(t) ? tally.tweets.at(t) : TypeTally{});
      auto users_it = tally.users.find(t);
      row["users"] = users_it == tally.users.end() ? 0 : users_it->second;
      types[std::string(to_string(t))] = std::move(row);
    }
    std::size_t explicit_users = 0;
    for (const auto& l : subset) explicit_users += l.explicit_node ? 1 : 0;
    Json j;
    j["types"] = std::move(types);
    j["national_users"] = tally.national_users;
    j["group_users"] = tally.group_users;
    j["explicit_users"] = explicit_users;
    j["all_tweets"] = tally_json(tally.all_tweets);
    out[std::string(to_string(corpus))] = std::move(j);
  }
  return out;
}

Json classifier_json(const PipelineConfig& config, const IngestedData& data) {
  if (!config.classifier_metrics && !config.classifier_predictions) return nullptr;
  Json out;
  if (config.classifier_metrics) {
    Json raw;
    try {
      raw = Json::parse(read_file(*config.classifier_metrics));
    } catch (const std::exception& e) {
      throw StageError("classifier", config.classifier_metrics->string() + ": " + e.what());
    }
    const Json& phases = raw.contains("phases") ? raw.at("phases") : raw;
    Json metrics = Json::object();
    for (const auto& [phase, m] : phases.items()) {
      if (!m.is_object()) continue;
      Json row;
      for (const char* key : {"accuracy", "precision", "recall", "f1"}) {
        if (!m.contains(key) || !m.at(key).is_number())
          throw StageError("classifier", "phase '" + phase + "' lacks numeric '" + key + "'");
        row[key] = m.at(key).get<double>();
      }
      metrics[phase] = std::move(row);
    }
    out["metrics"] = std::move(metrics);
  }
  if (config.classifier_predictions) {
    std::ifstream in(*config.classifier_predictions, std::ios::binary);
    if (!in) throw StageError("classifier", "cannot open " + config.classifier_predictions->string());
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw StageError("classifier", "predictions file is empty");
    auto col = [&](std::string_view name) {
      auto it = std::find(row.begin(), row.end(), name);
      if (it == row.end()) throw StageError("classifier", "predictions file lacks column '" + std::string(name) + "'");
      return static_cast<std::size_t>(it - row.begin());
    };
    const std::size_t id_col = col("user_id"), prob_col = col("probability"), label_col = col("label");

    std::map<UserId, SuspensionStatus> status;
    for (const auto& [corpus, users] : data.users)
      for (const auto& u : users) status[u.user_id] = u.suspension_status;

    std::map<std::string, std::pair<std::size_t, std::size_t>> by_cohort;  // users, predicted positive
    std::size_t total = 0, positive = 0, unmatched = 0;
    while (reader.next(row)) {
      if (row.size() <= std::max({id_col, prob_col, label_col}))
        throw StageError("classifier", "short row " + std::to_string(reader.record_number()));
      const std::string& label = row[label_col];
      const bool pos = label == "1" || label == "positive" || label == "true";
      ++total;
      positive += pos ? 1 : 0;
      auto it = status.find(row[id_col]);
      if (it == status.end()) {
        ++unmatched;
        continue;
      }
      auto& cohort = by_cohort[std::string(to_string(it->second))];
      ++cohort.first;
      cohort.second += pos ? 1 : 0;
    }
    if (reader.malformed()) throw StageError("classifier", "malformed predictions CSV");
    Json cohorts = Json::object();
    for (const auto& [name, c] : by_cohort)
      cohorts[name] = {{"users", c.first},
                       {"predicted_positive", c.second},
                       {"fraction_positive", c.first ? static_cast<double>(c.second) / static_cast<double>(c.first) : 0.0}};
    out["predictions"] = {{"users", total}, {"predicted_positive", positive}, {"unmatched_users", unmatched},
                          {"by_suspension_status", std::move(cohorts)}};
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return format_timestamp(now) + "Z";
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  PipelineResult result;
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  const StageCache cache(out / "cache");
  const unsigned threads = config.threads;

  // ingest
  result.stages_run.push_back("ingest");
  IngestedData data = run_ingest(config);
  write_file(out / "ingest.json", ingest_json(data, true).dump(2));
  {
    std::size_t rows = 0;
    for (const auto& [_, s] : data.summary) rows += s.rows;
    const double ratio = rows ? static_cast<double>(data.rejections.size()) / static_cast<double>(rows) : 0.0;
    if (ratio > config.max_reject_ratio)
      throw StageError("ingest", std::to_string(data.rejections.size()) + " of " + std::to_string(rows) +
                                     " rows rejected, above the " + format_percent(config.max_reject_ratio * 100) +
                                     "% budget (see ingest.json)");
  }

  // graph
  result.stages_run.push_back("graph");
  const std::vector<UserRecord> graph_users = data.graph_users();
  const UserDirectory directory(graph_users);
  std::vector<InteractionEvent> events;
  InteractionGraph graph;
  Json windows = Json::array();
  try {
    for (Corpus c : {Corpus::takedown, Corpus::live}) {
      auto it = data.tweets.find(c);
      if (it != data.tweets.end()) extract_interactions(it->second, directory, [&](InteractionEvent&& e) {
        events.push_back(std::move(e));
      });
    }
    graph = build_graph(events, directory);
    for (const auto& w : config.windows) {
      BuildOptions opts;
      opts.window = w.window;
      const InteractionGraph g = build_graph(events, directory, opts);
      std::size_t takedown = 0, live = 0;
      for (const auto& n : g.nodes()) {
        takedown += n.corpus == Corpus::takedown ? 1 : 0;
        live += n.corpus == Corpus::live ? 1 : 0;
      }
      std::uint64_t weight = 0, cross = 0;
      for (const auto& e : g.edges()) {
        weight += e.counts.weight();
        if (g.nodes()[e.source].corpus != g.nodes()[e.target].corpus) cross += e.counts.weight();
      }
      windows.push_back({{"name", w.name},
                         {"start", format_timestamp(w.window.start)},
                         {"end", format_timestamp(w.window.end)},
                         {"nodes", g.node_count()},
                         {"edges", g.edge_count()},
                         {"weight", weight},
                         {"cross_corpus_weight", cross},
                         {"takedown_nodes", takedown},
                         {"live_nodes", live}});
    }
  } catch (const std::exception& e) {
    throw StageError("graph", e.what());
  }

  // taxonomy (labels before sequel promotion)
  std::string rules_digest;
  std::vector<AccountLabel> labels;
  try {
    rules_digest = sha256_file(config.rules);
    const std::string key = Sha256().field("taxonomy").field(data.digest).field(rules_digest).hex();
    if (auto cached = cache.load("taxonomy", key)) {
      for (const auto& l : *cached) labels.push_back(label_from_json(l));
      result.stages_cached.push_back("taxonomy");
    } else {
      const Labeler labeler(load_rules(config.rules));
      labels.resize(graph_users.size());
      std::vector<std::span<const TweetRecord>> slices(graph_users.size());
      for (std::size_t i = 0; i < graph_users.size(); ++i)
        slices[i] = tweets_of(data.tweets[graph_users[i].corpus], graph_users[i].user_id);
      parallel_for(graph_users.size(), threads,
                   [&](unsigned, std::size_t i) { labels[i] = labeler.label(graph_users[i], slices[i]); });
      Json j = Json::array();
      for (const auto& l : labels) j.push_back(to_json(l));
      cache.store("taxonomy", key, std::move(j));
      result.stages_run.push_back("taxonomy");
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("taxonomy", e.what());
  }

  // sequels
  const std::string thresholds_key = exact(config.thresholds.username_high) + "," + exact(config.thresholds.username_low) +
                                     "," + exact(config.thresholds.bio_min) + "," + exact(config.thresholds.name_min) +
                                     "," + std::to_string(config.thresholds.common_min);
  SequelResult sequels;
  try {
    const std::string key = Sha256().field("sequels").field(data.digest).field(thresholds_key).hex();
    if (auto cached = cache.load("sequels", key)) {
      for (const auto& c : cached->at("candidates")) sequels.candidates.push_back(sequel_from_json(c));
      sequels.skipped_takedown = cached->at("skipped_takedown").get<std::vector<UserId>>();
      sequels.skipped_live = cached->at("skipped_live").get<std::vector<UserId>>();
      sequels.unindexed_users = cached->at("unindexed_users").get<std::vector<UserId>>();
      result.stages_cached.push_back("sequels");
    } else {
      const InteractionIndex index(events);
      static const std::vector<UserRecord> none;
      auto users_of = [&](Corpus c) -> const std::vector<UserRecord>& {
        auto it = data.users.find(c);
        return it == data.users.end() ? none : it->second;
      };
      sequels = direct_sequels(users_of(Corpus::takedown), users_of(Corpus::live), index,
                               {.thresholds = config.thresholds, .threads = threads});
      Json candidates = Json::array();
      for (const auto& c : sequels.candidates) candidates.push_back(to_json(c));
      cache.store("sequels", key,
                  {{"candidates", std::move(candidates)},
                   {"skipped_takedown", sequels.skipped_takedown},
                   {"skipped_live", sequels.skipped_live},
                   {"unindexed_users", sequels.unindexed_users}});
      result.stages_run.push_back("sequels");
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("sequels", e.what());
  }

  std::set<UserId> sequel_live_ids;
  for (const auto& c : sequels.candidates)
    if (c.verdict) sequel_live_ids.insert(c.live_user_id);
  apply_direct_sequels(labels, sequel_live_ids);

  ExplicitPartition partition;
  try {
    const std::vector<UserId> node_ids = graph.node_ids();
    partition = partition_explicit(node_ids, labels);
  } catch (const std::exception& e) {
    throw StageError("taxonomy", e.what());
  }

  write_stream(out / "labels.csv", [&](std::ostream& s) { write_labels_csv(s, labels); });
  write_stream(out / "sequels.csv", [&](std::ostream& s) { write_sequel_csv(s, sequels.candidates); });
  const InteractionGraph flagged = graph.with_explicit_flags(partition.explicit_nodes);
  write_stream(out / "graph.graphml", [&](std::ostream& s) { write_graphml(s, flagged); });
  write_stream(out / "edges.csv", [&](std::ostream& s) { write_edge_list(s, flagged); });

  // experiments
  ExperimentTable table;
  const ExperimentConfig exp_config{.seed = *config.seed, .trials = config.trials, .metrics = {.threads = threads}};
  try {
    Sha256 h;
    h.field("experiments").field(data.digest).field(std::to_string(*config.seed)).field(std::to_string(config.trials));
    for (const auto& id : partition.explicit_nodes) h.field(id);
    const std::string key = h.hex();
    if (auto cached = cache.load("experiments", key)) {
      table = experiment_table_from_json(*cached);
      result.stages_cached.push_back("experiments");
    } else {
      table = experiment_table(graph, partition, exp_config);
      cache.store("experiments", key, to_json(table));
      result.stages_run.push_back("experiments");
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("experiments", e.what());
  }
  write_file(out / "metrics.json", to_json(table).dump(2));

  // report
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool_version"] = std::string(kToolVersion);
  Json ingest = ingest_json(data, false);
  report["ingest"] = std::move(ingest);

  const BuildStats& st = graph.build_stats();
  report["graph"] = {{"nodes", graph.node_count()},
                     {"edges", graph.edge_count()},
                     {"explicit_nodes", partition.explicit_nodes.size()},
                     {"implicit_nodes", partition.implicit_nodes.size()},
                     {"events_seen", st.events_seen},
                     {"events_retained", st.events_retained},
                     {"self_loops_dropped", st.self_loops_dropped},
                     {"outside_scope", st.outside_scope},
                     {"external_dropped", st.external_dropped}};
  report["graph_statistics"] = to_json(table);
  report["windows"] = std::move(windows);
  report["taxonomy"] = taxonomy_json(labels, data);

  Json pairs = Json::array();
  for (const auto& c : sequels.sequels()) pairs.push_back(to_json(c));
  report["sequels"] = {{"candidates", sequels.candidates.size()},
                       {"pairs", std::move(pairs)},
                       {"skipped_takedown", sequels.skipped_takedown.size()},
                       {"skipped_live", sequels.skipped_live.size()},
                       {"unindexed_users", sequels.unindexed_users.size()}};
  report["classifier"] = classifier_json(config, data);  // null marks the section absent

  Json inputs = Json::array();
  for (const auto& [corpus, files] : config.corpora)
    for (const auto& f : files)
      inputs.push_back({{"role", std::string(to_string(corpus))}, {"path", f.generic_string()}, {"sha256", sha256_file(f)}});
  if (config.suspensions)
    inputs.push_back({{"role", "suspensions"}, {"path", config.suspensions->generic_string()},
                      {"sha256", sha256_file(*config.suspensions)}});
  inputs.push_back({{"role", "rules"}, {"path", config.rules.generic_string()}, {"sha256", rules_digest}});
  if (config.classifier_metrics)
    inputs.push_back({{"role", "classifier_metrics"}, {"path", config.classifier_metrics->generic_string()},
                      {"sha256", sha256_file(*config.classifier_metrics)}});
  if (config.classifier_predictions)
    inputs.push_back({{"role", "classifier_predictions"}, {"path", config.classifier_predictions->generic_string()},
                      {"sha256", sha256_file(*config.classifier_predictions)}});

  Json experiment_seeds = Json::object();
  for (const auto& r : table.rows)
    if (r.seed) experiment_seeds[r.name] = *r.seed;
  Json provenance;
  provenance["inputs"] = std::move(inputs);
  provenance["ingest_digest"] = data.digest;
  provenance["seed"] = *config.seed;
  provenance["trials"] = config.trials;
  provenance["experiment_seeds"] = std::move(experiment_seeds);
  provenance["thresholds"] = {{"username_high", config.thresholds.username_high},
                              {"username_low", config.thresholds.username_low},
                              {"bio_min", config.thresholds.bio_min},
                              {"name_min", config.thresholds.name_min},
                              {"common_min", config.thresholds.common_min}};
  if (config.live_filter)
    provenance["live_filter"] = {{"min_creation_year", config.live_filter->min_creation_year},
                                 {"excluded_user_ids", config.live_filter->excluded_user_ids}};
  Json wdefs = Json::array();
  for (const auto& w : config.windows)
    wdefs.push_back({{"name", w.name}, {"start", format_timestamp(w.window.start)}, {"end", format_timestamp(w.window.end)}});
  provenance["windows"] = std::move(wdefs);
  provenance["max_reject_ratio"] = config.max_reject_ratio;
  provenance["tool_version"] = std::string(kToolVersion);
  provenance["generated_at"] = utc_now();
  report["provenance"] = std::move(provenance);

  result.report_path = out / "report.json";
  write_file(out / "report.txt", render_text_report(report));
  write_file(result.report_path, report.dump(2) + "\n");
  result.report = std::move(report);
  return result;
}

// ---------------------------------------------------------------------------

std::size_t export_classifier_corpus(const IngestedData& data, const fs::path& out_path) {
  std::ostringstream out;
  std::size_t written = 0;
  for (const auto& [corpus, users] : data.users) {
    static const std::vector<TweetRecord> none;
    auto tw = data.tweets.find(corpus);
    const std::vector<TweetRecord>& tweets = tw == data.tweets.end() ? none : tw->second;
    for (const auto& u : users) {
      nlohmann::ordered_json j;
      j["user_id"] = u.user_id;
      j["label"] = corpus == Corpus::negative ? "negative" : "positive";
      j["corpus"] = std::string(to_string(corpus));
      j["suspension_status"] = std::string(to_string(u.suspension_status));
      Json texts = Json::array();
      for (const auto& t : tweets_of(tweets, u.user_id)) texts.push_back(t.text);
      j["tweets"] = std::move(texts);
      out << j.dump() << '\n';
      ++written;
    }
  }
  write_file(out_path, out.str());
  return written;
}

Json strip_volatile(Json report) {
  if (report.contains("provenance")) report["provenance"].erase("generated_at");
  return report;
}

}  // namespace iof
