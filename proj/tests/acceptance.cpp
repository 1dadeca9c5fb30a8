// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ioforensics/archive.hpp"
#include "ioforensics/pipeline.hpp"
#include "ioforensics/removal.hpp"
#include "ioforensics/sequel.hpp"
#include "ioforensics/similarity.hpp"
#include "ioforensics/taxonomy.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

using namespace iof;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::string detail;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Check similarity_exactness() {
  Check c;
  const auto start = Clock::now();
  c.require(username_ratio("hocaketum", "hocaket") == 0.875, "hocaketum/hocaket != 0.875");
  c.require(username_ratio("ihsantopbas", "ihsan_topbas42") == 0.88, "ihsantopbas/ihsan_topbas42 != 0.880");
  c.require(username_ratio("avhasanteke", "av_hasanteke27") == 0.88, "avhasanteke/av_hasanteke27 != 0.880");
  std::mt19937_64 rng(1001);
  const std::u32string alphabet = U"abcde_1ıİş";
  for (int i = 0; i < 10000 && c.ok; ++i) {
    std::u32string a, b;
    for (std::size_t k = 0, n = rng() % 13; k < n; ++k) a.push_back(alphabet[rng() % alphabet.size()]);
    for (std::size_t k = 0, n = rng() % 13; k < n; ++k) b.push_back(alphabet[rng() % alphabet.size()]);
    const std::size_t total = a.size() + b.size();
    const double expected = total ? 2.0 * static_cast<double>(oracle::lcs(a, b)) / static_cast<double>(total) : 1.0;
    c.require(username_ratio(a, b) == expected, "mismatch with the LCS oracle on pair " + std::to_string(i));
  }
  const double t = seconds_since(start);
  c.require(t < 10.0, "took " + fmt("%.2f", t) + " s");
  if (c.ok) c.detail = "3 reference pairs, 10000 random pairs, " + fmt("%.2f", t) + " s";
  return c;
}

Check density_self_consistency() {
  Check c;
  const std::size_t n = 11551, m = 609459;
  std::vector<bool> present(n * n, false);
  std::mt19937_64 rng(1002);
  std::size_t placed = 0;
  while (placed < m) {
    const std::size_t s = rng() % n, t = rng() % n;
    if (s == t || present[s * n + t]) continue;
    present[s * n + t] = true;
    ++placed;
  }
  std::vector<NodeInfo> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%05zu", i);
    nodes[i].user_id = buf;
    nodes[i].corpus = Corpus::takedown;
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  std::size_t pairs = 0, hits = 0;
  for (std::uint32_t s = 0; s < n; ++s)
    for (std::uint32_t t = 0; t < n; ++t) {
      if (s == t) continue;
      ++pairs;
      if (present[static_cast<std::size_t>(s) * n + t]) {
        ++hits;
        edges.push_back({s, t, {1}});
      }
    }
  InteractionGraph g(std::move(nodes), std::move(edges));
  // Path metrics are not under test here; a few BFS sources keep this quick.
  const auto metrics_out = metrics(g, {.sample_sources = 4, .sample_seed = 1});
  const double combinatorial = static_cast<double>(hits) / static_cast<double>(pairs);
  c.require(pairs == 133414050, "ordered pair count " + std::to_string(pairs));
  c.require(metrics_out.density == 609459.0 / 133414050.0, "density differs from 609459/133414050");
  c.require(metrics_out.density == combinatorial, "density differs from the combinatorial count");
  c.require(format_ratio(metrics_out.density) == "0.005", "rounds to " + format_ratio(metrics_out.density));
  if (c.ok) c.detail = "density " + fmt("%.9f", metrics_out.density) + " -> " + format_ratio(metrics_out.density);
  return c;
}

Check graph_oracle_equivalence() {
  Check c;
  const auto start = Clock::now();
  std::mt19937_64 rng(1003);
  for (int i = 0; i < 200 && c.ok; ++i) {
    const std::size_t n = 1 + rng() % 50;
    const double p = 0.01 + static_cast<double>(rng() % 100) / 700.0;
    auto g = oracle::random_graph(rng, n, p);
    const auto m = metrics(g);
    const auto o = oracle::apsp(n, oracle::edge_pairs(g));
    c.require(m.density == oracle::density(g), "density, graph " + std::to_string(i));
    c.require(m.diameter == o.diameter, "diameter, graph " + std::to_string(i));
    c.require(m.avg_path_length == o.avg_path_length, "average path length, graph " + std::to_string(i));
  }
  const double t = seconds_since(start);
  c.require(t < 30.0, "took " + fmt("%.2f", t) + " s");
  if (c.ok) c.detail = "200 graphs, " + fmt("%.2f", t) + " s";
  return c;
}

Check sequel_rules() {
  Check c;
  std::ifstream in(std::string(IOF_FIXTURES) + "/sequel_table.json");
  const auto rows = nlohmann::json::parse(in);
  for (const auto& r : rows) {
    SimilarityScores s;
    s.username_ratio = r["username"].get<double>();
    s.bio_ratio = r["bio"].get<double>();
    s.name_ratio = r["name"].get<double>();
    s.common_interactions = r["common"].get<std::size_t>();
    const auto v = classify_sequel(s);
    c.require(v.verdict && std::string(to_string(v.rule)) == r["rule"].get<std::string>(),
              "table row with username " + fmt("%.3f", s.username_ratio));
  }
  std::mt19937_64 rng(1004);
  auto corpus = oracle::planted_sequels(rng, 50);
  const InteractionIndex index;
  std::set<std::pair<UserId, UserId>> found;
  for (const auto& s : direct_sequels(corpus.takedown, corpus.live, index).sequels())
    found.emplace(s.takedown_user_id, s.live_user_id);
  const auto truth = oracle::brute_force_sequels(corpus, {});
  std::size_t tp = 0;
  for (const auto& p : found) tp += truth.count(p);
  const double precision = found.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(found.size());
  const double recall = truth.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(truth.size());
  c.require(precision == 1.0 && recall == 1.0,
            "planted corpus precision " + fmt("%.3f", precision) + " recall " + fmt("%.3f", recall));
  c.require(truth == corpus.planted, "oracle disagrees with the planted pairs");
  if (c.ok) c.detail = std::to_string(rows.size()) + " table rows, " + std::to_string(found.size()) + " planted pairs, P = R = 1";
  return c;
}

Check follow_train_filter() {
  Check c;
  std::ifstream in(std::string(IOF_FIXTURES) + "/follow_train_cases.json");
  const auto cases = nlohmann::json::parse(in);
  for (const auto& k : cases)
    c.require(detect_follow_train(k["text"].get<std::string>()) == k["follow_train"].get<bool>(),
              "case " + k["name"].get<std::string>());
  if (c.ok) c.detail = std::to_string(cases.size()) + " cases";
  return c;
}

Check removal_properties() {
  Check c;
  std::mt19937_64 rng(1005);
  for (int i = 0; i < 100 && c.ok; ++i) {
    auto g = oracle::random_graph(rng, 35, 0.08);
    std::set<UserId> a, b;
    for (const auto& node : g.nodes()) {
      if (rng() % 4 == 0) a.insert(node.user_id);
      if (rng() % 4 == 0) b.insert(node.user_id);
    }
    std::set<UserId> both = a;
    both.insert(b.begin(), b.end());
    c.require(remove_nodes(remove_nodes(g, a), b) == remove_nodes(g, both), "composition, graph " + std::to_string(i));

    RemovalExperiment exp;
    exp.target_set = a;
    exp.seed = rng();
    exp.trials = 3;
    if (a.empty()) continue;
    const auto x = random_removal_baseline(g, exp, {.threads = 1});
    const auto y = random_removal_baseline(g, exp, {.threads = 4});
    c.require(x.samples == y.samples, "baseline not deterministic, graph " + std::to_string(i));
    for (const auto& sample : x.samples) {
      std::map<std::string, std::size_t> per;
      for (const auto& id : sample) ++per[stratum_of(g.nodes()[*g.index_of(id)], exp.stratify_by)];
      for (const auto& q : x.quotas) c.require(per[q.stratum] == q.quota, "quota broken, graph " + std::to_string(i));
    }
  }
  const auto down = delta_report(display_values({0.005, 15.0, 3.525}), display_values({0.004, 16.0, 3.627}));
  const auto up = delta_report(display_values({0.005, 15.0, 3.525}), display_values({0.012, 8.0, 3.339}));
  c.require(round_half_up(*down.density_pct, 1) == -20.0, "0.005 -> 0.004 gives " + fmt("%.1f", *down.density_pct));
  c.require(round_half_up(*up.density_pct, 1) == 140.0, "0.005 -> 0.012 gives " + fmt("%.1f", *up.density_pct));
  if (c.ok) c.detail = "100 graphs; -20.0% and +140.0%";
  return c;
}

Check taxonomy_exclusivity() {
  Check c;
  const RuleSet rules = load_rules(IOF_RULES);
  const Labeler labeler(rules);
  std::map<std::string, RuleYield> yields;
  for (const auto& r : rules.rules) yields[r.id] = r.yields;
  const std::vector<std::string> triggers{"new account", "old one is suspended", "backup account", "#YedekHesap",
                                          "RT account", "retweet hesabı", "main account", "ana hesabım",
                                          "#MilliTakipMerkezi", "yeni hesap", "YEDEK HESAP", "Asıl Hesap"};
  const std::vector<std::string> filler{"gazeteci", "İstanbul", "vatan", "🇹🇷", "@someone", "|", "sevdalısı"};
  std::mt19937_64 rng(1006);
  for (int i = 0; i < 1000 && c.ok; ++i) {
    std::string bio;
    for (std::size_t k = 0, n = rng() % 5; k < n; ++k)
      bio += filler[rng() % filler.size()] + " " + triggers[rng() % triggers.size()] + (rng() % 2 ? ". " : " ");
    UserRecord u;
    u.user_id = "u" + std::to_string(i);
    u.profile_description = bio;
    const auto label = labeler.label(u);
    AccountType best = AccountType::none;
    for (const auto& id : label.matched_rules) {
      const auto& y = yields.at(id);
      if (y.kind == RuleYield::Kind::account_type && type_priority(y.account_type) < type_priority(best))
        best = y.account_type;
    }
    c.require(label.account_type == best, "description '" + bio + "'");
    c.require(labeler.label(u) == label, "nondeterministic on '" + bio + "'");
  }
  auto label_of = [&](const std::string& bio) {
    UserRecord u;
    u.user_id = "x";
    u.profile_description = bio;
    return labeler.label(u);
  };
  c.require(label_of("My main account. RT Account: @ibrahimergin98").account_type == AccountType::main, "main example");
  c.require(label_of("BACKUP ACCOUNT. MAIN ACCOUNT: @X").account_type == AccountType::backup, "backup example");
  c.require(label_of("New account, old one is suspended!").account_type == AccountType::sequel, "sequel example");
  c.require(label_of("#MilliTakipMerkezi").memberships.national, "national example");
  if (c.ok) c.detail = "1000 descriptions, 4 examples";
  return c;
}

Check end_to_end_determinism() {
  Check c;
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / ("iof-acceptance-" + std::to_string(rd()));
  auto run = [&](const std::string& sub) {
    auto config = load_config(fs::path(IOF_FIXTURES) / "pipeline" / "config.json");
    config.output_dir = root / sub;
    run_pipeline(config);
    std::ifstream in(root / sub / "report.json", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  try {
    const std::string a = run("a"), b = run("b");
    const auto ja = Json::parse(a), jb = Json::parse(b);
    c.require(ja["classifier"].is_null(), "classifier section present");
    c.require(strip_volatile(ja).dump(2) == strip_volatile(jb).dump(2), "reports differ");
    // Only the timestamp line may differ in the raw bytes.
    auto without_stamp = [](const std::string& text) {
      std::istringstream in(text);
      std::string line, out;
      while (std::getline(in, line))
        if (line.find("\"generated_at\"") == std::string::npos) out += line + "\n";
      return out;
    };
    c.require(without_stamp(a) == without_stamp(b), "report bytes differ");
    if (c.ok) c.detail = std::to_string(a.size()) + "-byte reports identical";
  } catch (const std::exception& e) {
    c.require(false, e.what());
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"similarity kernel exactness", similarity_exactness},
      {"density self-consistency", density_self_consistency},
      {"graph metric oracle equivalence", graph_oracle_equivalence},
      {"sequel rule fidelity", sequel_rules},
      {"follow-train filter", follow_train_filter},
      {"removal experiment properties", removal_properties},
      {"taxonomy determinism and exclusivity", taxonomy_exclusivity},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s: %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.c_str());
    failed += c.ok ? 0 : 1;
  }
  return failed ? 1 : 0;
}
