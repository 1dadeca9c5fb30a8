#include "ioforensics/removal.hpp"
#include "ioforensics/sequel.hpp"
#include "ioforensics/similarity.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace iof;

namespace {

SequelRule rule_named(const std::string& s) {
  if (s == "high_username") return SequelRule::high_username;
  if (s == "low_username_plus_evidence") return SequelRule::low_username_plus_evidence;
  return SequelRule::none;
}

UserRecord user(std::string id, std::optional<std::string> handle, Corpus c,
                std::optional<std::string> display = std::nullopt, std::optional<std::string> bio = std::nullopt) {
  UserRecord u;
  u.user_id = std::move(id);
  u.screen_name = std::move(handle);
  u.display_name = std::move(display);
  u.profile_description = std::move(bio);
  u.corpus = c;
  return u;
}

InteractionEvent ev(std::string s, std::string t) {
  InteractionEvent e;
  e.source = std::move(s);
  e.target = std::move(t);
  e.kind = InteractionKind::mention;
  return e;
}

}  // namespace

TEST_CASE("direct sequel table rows reproduce verdict and rule") {
  std::ifstream in(std::string(IOF_FIXTURES) + "/sequel_table.json");
  const auto rows = nlohmann::json::parse(in);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    SimilarityScores s;
    s.username_ratio = r["username"].get<double>();
    s.bio_ratio = r["bio"].get<double>();
    s.name_ratio = r["name"].get<double>();
    s.common_interactions = r["common"].get<std::size_t>();
    auto v = classify_sequel(s);
    CAPTURE(s.username_ratio);
    CHECK(v.verdict);
    CHECK(v.rule == rule_named(r["rule"].get<std::string>()));
    if (!r["takedown"].is_null()) {
      const double u = username_ratio(r["takedown"].get<std::string>(), r["live"].get<std::string>());
      CHECK(round_half_up(u, 3) == doctest::Approx(s.username_ratio));
    }
  }
}

TEST_CASE("thresholds are strict") {
  SimilarityScores s;
  s.username_ratio = 0.9;
  CHECK_FALSE(classify_sequel(s).verdict);
  s.username_ratio = 0.9000001;
  CHECK(classify_sequel(s).rule == SequelRule::high_username);

  s.username_ratio = 0.75;
  s.bio_ratio = 0.5;
  s.name_ratio = 0.8;
  s.common_interactions = 1;
  CHECK_FALSE(classify_sequel(s).verdict);
  s.common_interactions = 2;
  CHECK(classify_sequel(s).rule == SequelRule::low_username_plus_evidence);
  s.common_interactions = 0;
  s.bio_ratio = 0.51;
  CHECK(classify_sequel(s).verdict);
  s.bio_ratio.reset();
  s.name_ratio = 0.81;
  CHECK(classify_sequel(s).verdict);

  s.username_ratio = 0.6;
  s.name_ratio = 1.0;
  s.common_interactions = 50;
  CHECK_FALSE(classify_sequel(s).verdict);
  CHECK(classify_sequel(s).rule == SequelRule::none);
}

TEST_CASE("threshold validation") {
  SequelThresholds t;
  CHECK_NOTHROW(t.validate());
  t.username_low = 0.95;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {};
  t.bio_min = 0.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {};
  t.name_min = 1.2;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {};
  t.common_min = 0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("common interactions count distinct third parties") {
  std::vector<InteractionEvent> events{ev("u", "x"), ev("u", "x"), ev("u", "y"), ev("u", "v"), ev("u", "u"),
                                       ev("v", "x"), ev("v", "y"), ev("v", "u"), ev("v", "z")};
  InteractionIndex idx(events);
  CHECK(common_interactions("u", "v", idx) == 2);
  CHECK(common_interactions("v", "u", idx) == 2);
  std::vector<UserId> unknown;
  CHECK(common_interactions("u", "w", idx, &unknown) == 0);
  CHECK(unknown == std::vector<UserId>{"w"});
  CHECK(idx.targets("u")->size() == 3);

  std::mt19937_64 rng(41);
  for (int round = 0; round < 100; ++round) {
    std::vector<InteractionEvent> es;
    for (int i = 0; i < 60; ++i) es.push_back(ev(std::to_string(rng() % 6), std::to_string(rng() % 10)));
    InteractionIndex ix(es);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const std::string u = std::to_string(a), v = std::to_string(b);
        std::set<std::string> tu, tv, both;
        for (const auto& e : es) {
          if (e.source == u && e.target != u) tu.insert(e.target);
          if (e.source == v && e.target != v) tv.insert(e.target);
        }
        for (const auto& t : tu)
          if (tv.count(t) && t != u && t != v) both.insert(t);
        CHECK(common_interactions(u, v, ix) == both.size());
      }
  }
}

TEST_CASE("best match ties go to the smallest folded username, then user_id") {
  std::vector<UserRecord> live{user("9", "abcx", Corpus::live), user("2", "ABCY", Corpus::live),
                               user("1", "abcy", Corpus::live), user("5", std::nullopt, Corpus::live)};
  LiveCorpus corpus(live);
  CHECK(corpus.skipped() == std::vector<UserId>{"5"});
  auto m = best_match("abc", corpus);
  REQUIRE(m);
  CHECK(m->live_user->user_id == "9");
  CHECK(m->username_ratio == doctest::Approx(6.0 / 7.0));
  m = best_match("abcy", corpus);
  CHECK(m->live_user->user_id == "1");
  CHECK(m->username_ratio == 1.0);
  CHECK_FALSE(best_match("abc", LiveCorpus(std::span<const UserRecord>{})));
}

TEST_CASE("best match agrees with an exhaustive scan") {
  std::mt19937_64 rng(42);
  auto word = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + rng() % 4));
    return s;
  };
  for (int round = 0; round < 100; ++round) {
    std::vector<UserRecord> live;
    for (int i = 0; i < 30; ++i) live.push_back(user(std::to_string(rng() % 1000), word(1 + rng() % 8), Corpus::live));
    LiveCorpus corpus(live);
    const std::string q = word(1 + rng() % 8);
    const UserRecord* best = nullptr;
    double best_ratio = -1;
    for (const auto& l : live) {
      const auto a = text::to_u32(q), b = text::to_u32(*l.screen_name);
      const double r = 2.0 * static_cast<double>(oracle::lcs(a, b)) / static_cast<double>(a.size() + b.size());
      if (r > best_ratio || (r == best_ratio && std::pair(*l.screen_name, l.user_id) <
                                                   std::pair(*best->screen_name, best->user_id)))
        best = &l, best_ratio = r;
    }
    auto m = best_match(q, corpus);
    REQUIRE(m);
    CHECK(m->username_ratio == best_ratio);
    CHECK(*m->live_user->screen_name == *best->screen_name);
    CHECK(m->live_user->user_id == best->user_id);
  }
}

TEST_CASE("direct sequels on the worked pairs") {
  std::vector<UserRecord> takedown{
      user("t1", "ihsantopbas", Corpus::takedown, "İhsan Topbaş", "Gazeteci"),
      user("t2", "avhasanteke", Corpus::takedown, "Av. Hasan Teke", "Avukat"),
      user("t3", "hocaketum", Corpus::takedown, "Hoca Ketum"),
      user("t4", std::nullopt, Corpus::takedown),
  };
  std::vector<UserRecord> live{
      user("l1", "ihsan_topbas42", Corpus::live, "ihsan topbaş", "Gazeteci yazar"),
      user("l2", "av_hasanteke27", Corpus::live, "Av. Hasan Teke"),
      user("l3", "hocaket", Corpus::live, "Hoca Ketum"),
      user("l4", "unrelated", Corpus::live),
  };
  std::vector<InteractionEvent> events{ev("t1", "a"), ev("t1", "b"), ev("l1", "a"), ev("l1", "b"), ev("l1", "c")};
  InteractionIndex idx(events);
  auto r = direct_sequels(takedown, live, idx, {.threads = 2});
  CHECK(r.skipped_takedown == std::vector<UserId>{"t4"});
  REQUIRE(r.candidates.size() == 3);
  CHECK(r.candidates[0].scores.username_ratio == 0.88);
  CHECK(r.candidates[2].takedown_user_id == "t3");
  CHECK(r.candidates[2].scores.username_ratio == 0.875);
  for (const auto& c : r.candidates) {
    CHECK(c.verdict);
    CHECK(c.rule_fired == SequelRule::low_username_plus_evidence);
    CHECK(c.live_user_id == "l" + c.takedown_user_id.substr(1));
  }
  const auto& t1 = *std::find_if(r.candidates.begin(), r.candidates.end(),
                                 [](const auto& c) { return c.takedown_user_id == "t1"; });
  CHECK(t1.scores.common_interactions == 2);
  CHECK(t1.scores.name_ratio == 1.0);  // dotted/dotless folding
  CHECK(r.sequels().size() == 3);
  CHECK(std::find(r.unindexed_users.begin(), r.unindexed_users.end(), "t2") != r.unindexed_users.end());

  SequelOptions bad;
  bad.thresholds.common_min = 0;
  CHECK_THROWS_AS(direct_sequels(takedown, live, idx, bad), std::invalid_argument);
}

TEST_CASE("planted sequels are recovered exactly") {
  std::mt19937_64 rng(43);
  for (int round = 0; round < 5; ++round) {
    auto c = oracle::planted_sequels(rng, 50);
    InteractionIndex empty;
    auto r = direct_sequels(c.takedown, c.live, empty);
    std::set<std::pair<UserId, UserId>> found;
    for (const auto& s : r.sequels()) found.emplace(s.takedown_user_id, s.live_user_id);
    CHECK(found == oracle::brute_force_sequels(c, {}));
    CHECK(found == c.planted);
  }
}

TEST_CASE("sequel csv") {
  SequelCandidate c;
  c.takedown_label = "hocaketum";
  c.live_label = "hocaket";
  c.scores.username_ratio = 0.875;
  c.scores.name_ratio = 0.93;
  c.scores.common_interactions = 11;
  c.verdict = true;
  c.rule_fired = SequelRule::low_username_plus_evidence;
  std::ostringstream out;
  write_sequel_csv(out, std::span(&c, 1));
  CHECK(out.str() ==
        "takedown_username,live_username,username_similarity,bio_similarity,name_similarity,common_interactions,"
        "verdict,rule_fired\nhocaketum,hocaket,0.875,,0.930,11,true,low_username_plus_evidence\n");
}
