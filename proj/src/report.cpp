#include "ioforensics/report.hpp"

#include <cstdio>
#include <sstream>

namespace iof {

MetricValues ExperimentRow::values() const {
  if (metrics) return values_of(*metrics);
  if (mean) return values_of(*mean);
  return {};
}

const ExperimentRow* ExperimentTable::find(std::string_view name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

ExperimentTable experiment_table(const InteractionGraph& graph, const ExplicitPartition& partition,
                                 const ExperimentConfig& config) {
  std::set<UserId> explicit_nodes, implicit_nodes;
  for (const auto& n : graph.nodes()) {
    if (partition.explicit_nodes.count(n.user_id)) explicit_nodes.insert(n.user_id);
    else if (partition.implicit_nodes.count(n.user_id)) implicit_nodes.insert(n.user_id);
    else throw std::invalid_argument("node '" + n.user_id + "' is missing from the explicit/implicit partition");
  }

  ExperimentTable table;
  ExperimentRow full{.name = "full"};
  full.metrics = metrics(graph, config.metrics);
  table.rows.push_back(full);

  auto targeted = [&](std::string name, const std::set<UserId>& removed, const std::set<UserId>& kept,
                      const char* empty_reason) {
    ExperimentRow row{.name = std::move(name)};
    if (kept.empty()) row.absent_reason = empty_reason;
    else row.metrics = metrics(remove_nodes(graph, removed), config.metrics);
    table.rows.push_back(std::move(row));
  };
  targeted("implicit_only", explicit_nodes, implicit_nodes, "no implicit nodes in the graph");
  targeted("explicit_only", implicit_nodes, explicit_nodes, "no explicit nodes in the graph");

  auto random_row = [&](std::string name, const std::set<UserId>& target, std::uint64_t seed,
                        const char* empty_reason) {
    ExperimentRow row{.name = std::move(name)};
    if (target.empty()) {
      row.absent_reason = empty_reason;
    } else {
      RemovalExperiment exp{.target_set = target, .trials = config.trials, .seed = seed};
      RandomBaseline baseline = random_removal_baseline(graph, exp, config.metrics);
      row.trials = std::move(baseline.trials);
      row.mean = baseline.mean;
      row.quotas = std::move(baseline.quotas);
      row.seed = seed;
    }
    table.rows.push_back(std::move(row));
  };
  random_row("random_implicit", implicit_nodes, config.seed, "no implicit nodes to size the sample");
  random_row("random_explicit", explicit_nodes, config.seed ^ (std::uint64_t{1} << 32),
             "no explicit nodes to size the sample");

  const MetricValues base = display_values(table.rows.front().values());
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    if (row.absent_reason) continue;
    row.delta_vs_full = delta_report(base, display_values(row.values()));
  }
  return table;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

Json to_json(const GraphMetrics& m) {
  Json j;
  j["node_count"] = m.node_count;
  j["edge_count"] = m.edge_count;
  j["density"] = m.density;
  j["diameter"] = opt(m.diameter);
  j["avg_path_length"] = opt(m.avg_path_length);
  j["component_size"] = m.component_size;
  j["estimated"] = m.estimated;
  return j;
}

GraphMetrics metrics_from_json(const Json& j) {
  GraphMetrics m;
  m.node_count = j.at("node_count").get<std::size_t>();
  m.edge_count = j.at("edge_count").get<std::size_t>();
  m.density = j.at("density").get<double>();
  m.diameter = get_opt<std::uint32_t>(j, "diameter");
  m.avg_path_length = get_opt<double>(j, "avg_path_length");
  m.component_size = j.at("component_size").get<std::size_t>();
  m.estimated = j.at("estimated").get<bool>();
  return m;
}

Json to_json(const MeanMetrics& m) {
  Json j;
  j["node_count"] = m.node_count;
  j["edge_count"] = m.edge_count;
  j["density"] = m.density;
  j["diameter"] = opt(m.diameter);
  j["avg_path_length"] = opt(m.avg_path_length);
  return j;
}

namespace {

MeanMetrics mean_from_json(const Json& j) {
  MeanMetrics m;
  m.node_count = j.at("node_count").get<double>();
  m.edge_count = j.at("edge_count").get<double>();
  m.density = j.at("density").get<double>();
  m.diameter = get_opt<double>(j, "diameter");
  m.avg_path_length = get_opt<double>(j, "avg_path_length");
  return m;
}

}  // namespace

Json to_json(const MetricDeltas& d) {
  auto pct = [](const std::optional<double>& v) { return v ? Json(round_half_up(*v, 1)) : Json(nullptr); };
  Json j;
  j["density_pct"] = pct(d.density_pct);
  j["diameter_pct"] = pct(d.diameter_pct);
  j["avg_path_length_pct"] = pct(d.avg_path_length_pct);
  j["undefined"] = d.undefined;
  return j;
}

Json to_json(const ExperimentTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json j;
    j["name"] = r.name;
    if (r.absent_reason) {
      j["absent_reason"] = *r.absent_reason;
      rows.push_back(std::move(j));
      continue;
    }
    if (r.metrics) j["metrics"] = to_json(*r.metrics);
    if (r.mean) {
      j["seed"] = *r.seed;
      j["mean"] = to_json(*r.mean);
      Json trials = Json::array();
      for (const auto& t : r.trials) trials.push_back(to_json(t));
      j["trials"] = std::move(trials);
      Json quotas = Json::array();
      for (const auto& q : r.quotas)
        quotas.push_back({{"stratum", q.stratum}, {"weight", q.weight}, {"available", q.available}, {"quota", q.quota}});
      j["quotas"] = std::move(quotas);
    }
    if (r.delta_vs_full) j["delta_vs_full"] = to_json(*r.delta_vs_full);
    rows.push_back(std::move(j));
  }
  return rows;
}

ExperimentTable experiment_table_from_json(const Json& rows) {
  ExperimentTable table;
  for (const auto& j : rows) {
    ExperimentRow r;
    r.name = j.at("name").get<std::string>();
    if (j.contains("absent_reason")) {
      r.absent_reason = j.at("absent_reason").get<std::string>();
      table.rows.push_back(std::move(r));
      continue;
    }
    if (j.contains("metrics")) r.metrics = metrics_from_json(j.at("metrics"));
    if (j.contains("mean")) {
      r.seed = j.at("seed").get<std::uint64_t>();
      r.mean = mean_from_json(j.at("mean"));
      for (const auto& t : j.at("trials")) r.trials.push_back(metrics_from_json(t));
      for (const auto& q : j.at("quotas"))
        r.quotas.push_back({q.at("stratum").get<std::string>(), q.at("weight").get<std::size_t>(),
                            q.at("available").get<std::size_t>(), q.at("quota").get<std::size_t>()});
    }
    table.rows.push_back(std::move(r));
  }
  // Deltas are derived data; recompute rather than trust the stored rounding.
  if (!table.rows.empty()) {
    const MetricValues base = display_values(table.rows.front().values());
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      if (!table.rows[i].absent_reason) table.rows[i].delta_vs_full = delta_report(base, display_values(table.rows[i].values()));
  }
  return table;
}

Json to_json(const AccountLabel& l) {
  Json j;
  j["user_id"] = l.user_id;
  j["account_type"] = std::string(to_string(l.account_type));
  j["national"] = l.memberships.national;
  j["groups"] = l.memberships.groups;
  j["explicit"] = l.explicit_node;
  j["matched_rules"] = l.matched_rules;
  return j;
}

AccountLabel label_from_json(const Json& j) {
  AccountLabel l;
  l.user_id = j.at("user_id").get<std::string>();
  l.account_type = parse_account_type(j.at("account_type").get<std::string>()).value_or(AccountType::none);
  l.memberships.national = j.at("national").get<bool>();
  l.memberships.groups = j.at("groups").get<std::set<std::string>>();
  l.explicit_node = j.at("explicit").get<bool>();
  l.matched_rules = j.at("matched_rules").get<std::vector<std::string>>();
  return l;
}

Json to_json(const SequelCandidate& c) {
  Json j;
  j["takedown_user_id"] = c.takedown_user_id;
  j["live_user_id"] = c.live_user_id;
  j["takedown_username"] = c.takedown_label;
  j["live_username"] = c.live_label;
  j["username_similarity"] = c.scores.username_ratio;
  j["bio_similarity"] = opt(c.scores.bio_ratio);
  j["name_similarity"] = opt(c.scores.name_ratio);
  j["common_interactions"] = c.scores.common_interactions;
  j["verdict"] = c.verdict;
  j["rule_fired"] = std::string(to_string(c.rule_fired));
  return j;
}

SequelCandidate sequel_from_json(const Json& j) {
  SequelCandidate c;
  c.takedown_user_id = j.at("takedown_user_id").get<std::string>();
  c.live_user_id = j.at("live_user_id").get<std::string>();
  c.takedown_label = j.at("takedown_username").get<std::string>();
  c.live_label = j.at("live_username").get<std::string>();
  c.scores.username_ratio = j.at("username_similarity").get<double>();
  c.scores.bio_ratio = get_opt<double>(j, "bio_similarity");
  c.scores.name_ratio = get_opt<double>(j, "name_similarity");
  c.scores.common_interactions = j.at("common_interactions").get<std::size_t>();
  c.verdict = j.at("verdict").get<bool>();
  const auto rule = j.at("rule_fired").get<std::string>();
  c.rule_fired = rule == "high_username"                ? SequelRule::high_username
                 : rule == "low_username_plus_evidence" ? SequelRule::low_username_plus_evidence
                                                        : SequelRule::none;
  return c;
}

// ---------------------------------------------------------------------------

std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", round_half_up(v, 3));
  return buf;
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", round_half_up(v, 1));
  return buf;
}

namespace {

std::string cell(const Json& v, bool ratio) {
  if (v.is_null()) return "-";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<std::int64_t>());
  const double d = v.get<double>();
  return ratio ? format_ratio(d) : format_percent(d);
}

std::string pad(std::string s, std::size_t width) {
  // Byte length; close enough for the ASCII tables below.
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void render_table(std::ostringstream& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    widths[c] = header[c].size();
    for (const auto& r : rows) widths[c] = std::max(widths[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? " | " : "") << pad(r[c], widths[c]);
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : widths) total += w + 3;
  out << std::string(total > 3 ? total - 3 : 0, '-') << '\n';
  for (const auto& r : rows) line(r);
  out << '\n';
}

}  // namespace

std::string render_text_report(const Json& report) {
  std::ostringstream out;
  out << "Information-operation forensics report (schema " << report.value("schema_version", 0) << ")\n\n";

  if (report.contains("ingest")) {
    out << "Corpora\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, s] : report["ingest"]["corpora"].items())
      rows.push_back({name, std::to_string(s["users"].get<std::size_t>()), std::to_string(s["tweets"].get<std::size_t>()),
                      std::to_string(s["retweets"].get<std::size_t>()),
                      std::to_string(s["follow_trains"].get<std::size_t>()),
                      std::to_string(s["rejections"].get<std::size_t>())});
    render_table(out, {"corpus", "users", "tweets", "retweets", "follow trains", "rejected rows"}, rows);
  }

  if (report.contains("graph_statistics")) {
    out << "Graph statistics\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["graph_statistics"]) {
      if (r.contains("absent_reason")) {
        rows.push_back({r["name"].get<std::string>(), "-", "-", "-", "-", "-", r["absent_reason"].get<std::string>()});
        continue;
      }
      const Json& m = r.contains("metrics") ? r["metrics"] : r["mean"];
      std::string delta;
      if (r.contains("delta_vs_full")) {
        const Json& d = r["delta_vs_full"];
        auto pct = [](const Json& v) { return v.is_null() ? std::string("n/a") : format_percent(v.get<double>()) + "%"; };
        delta = "density " + pct(d["density_pct"]) + ", diameter " + pct(d["diameter_pct"]) + ", path " +
                pct(d["avg_path_length_pct"]);
      }
      const bool random = r.contains("mean");
      rows.push_back({r["name"].get<std::string>(),
                      random ? format_percent(m["node_count"].get<double>()) : cell(m["node_count"], true),
                      random ? format_percent(m["edge_count"].get<double>()) : cell(m["edge_count"], true),
                      cell(m["density"], true),
                      random ? cell(m["diameter"], false) : cell(m["diameter"], true), cell(m["avg_path_length"], true),
                      delta});
    }
    render_table(out, {"subnetwork", "nodes", "edges", "density", "diameter", "path length", "change vs full"}, rows);
  }

  if (report.contains("windows") && !report["windows"].empty()) {
    out << "Time windows\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& w : report["windows"])
      rows.push_back({w["name"].get<std::string>(), std::to_string(w["nodes"].get<std::size_t>()),
                      std::to_string(w["edges"].get<std::size_t>()), std::to_string(w["weight"].get<std::uint64_t>()),
                      std::to_string(w["takedown_nodes"].get<std::size_t>()),
                      std::to_string(w["live_nodes"].get<std::size_t>())});
    render_table(out, {"window", "nodes", "edges", "total weight", "takedown nodes", "live nodes"}, rows);
  }

  if (report.contains("taxonomy")) {
    out << "Account types\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [corpus, t] : report["taxonomy"].items()) {
      for (const auto& [type, tally] : t["types"].items()) {
        rows.push_back({corpus, type, std::to_string(tally["users"].get<std::size_t>()),
                        std::to_string(tally["tweets"].get<std::uint64_t>()),
                        std::to_string(tally["retweets"].get<std::uint64_t>()),
                        std::to_string(tally["originals"].get<std::uint64_t>()), cell(tally["percent_retweets"], false)});
      }
    }
    render_table(out, {"corpus", "type", "users", "tweets", "retweets", "original", "% retweets"}, rows);
  }

  if (report.contains("sequels")) {
    out << "Direct sequel pairs\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : report["sequels"]["pairs"])
      rows.push_back({c["takedown_username"].get<std::string>(), c["live_username"].get<std::string>(),
                      cell(c["username_similarity"], true), cell(c["bio_similarity"], true),
                      cell(c["name_similarity"], true), std::to_string(c["common_interactions"].get<std::size_t>()),
                      c["rule_fired"].get<std::string>()});
    render_table(out, {"takedown", "live", "username", "bio", "name", "common", "rule"}, rows);
  }

  out << "Classifier: ";
  if (report.contains("classifier") && !report["classifier"].is_null()) {
    out << "\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [phase, m] : report["classifier"]["metrics"].items())
      rows.push_back({phase, cell(m["accuracy"], true), cell(m["precision"], true), cell(m["recall"], true),
                      cell(m["f1"], true)});
    render_table(out, {"phase", "accuracy", "precision", "recall", "f1"}, rows);
  } else {
    out << "absent (no classifier outputs supplied)\n";
  }
  return out.str();
}

}  // namespace iof
