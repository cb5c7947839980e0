#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "slotsim/json_io.hpp"
#include "slotsim/retrieval.hpp"

using namespace slotsim;
using fixtures::fx;

namespace {

std::vector<std::string> tokens_of(const std::vector<std::string>& tags) {
  std::vector<std::string> out;
  for (const auto& t : tags)
    for (auto& tok : tag_tokens(t)) out.push_back(std::move(tok));
  return out;
}

// Straight transcription of the scoring rule: exact tag matches, plus one half
// for each other node tag sharing at least one token with any query tag.
double brute_score(const KnowledgeNode& n, const std::vector<std::string>& query) {
  const auto qtok = tokens_of(query);
  double s = 0;
  for (const auto& tag : n.topic_tags) {
    if (std::find(query.begin(), query.end(), tag) != query.end()) {
      s += 1.0;
      continue;
    }
    for (const auto& tok : tag_tokens(tag))
      if (std::find(qtok.begin(), qtok.end(), tok) != qtok.end()) {
        s += 0.5;
        break;
      }
  }
  return s;
}

std::vector<std::pair<double, std::string>> brute_rank(const StudentProfile& p, const std::vector<std::string>& q) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& n : p.cognitive) {
    const double s = brute_score(n, q);
    if (s > 0) all.emplace_back(s, n.node_id);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  return all;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("slotsim_" + name);
  std::ofstream(path) << content;
  return path;
}

ErrorCode load_error(const std::filesystem::path& path) {
  try {
    load_roster(path);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load unexpectedly succeeded");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("the topic node ranks first for the worked-example context") {
  const auto hits = query_nodes(fixtures::devin(), {"4x", "multiplication", "tables"}, 3);
  REQUIRE(hits.size() >= 2);
  CHECK(hits[0].node_id == "mult_4x");
  CHECK(hits[0].score == 3.0);
  CHECK(hits[1].node_id == "mult_7x");
  CHECK(hits[1].score == 2.0);
}

TEST_CASE("disjoint context falls back to the general node") {
  const auto hits = query_nodes(fixtures::devin(), {"photosynthesis"}, 3);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].node_id == "general");
  CHECK(hits[0].score == 0.0);
}

TEST_CASE("no fallback node gives NO_FALLBACK") {
  auto p = fixtures::simple_student("x");
  p.cognitive.erase(p.cognitive.begin());
  try {
    query_nodes(p, {"unrelated"}, 2);
    FAIL("expected NO_FALLBACK");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoFallback);
  }
  CHECK_THROWS_AS(query_nodes(p, {"topic"}, 0), Error);
}

TEST_CASE("equal scores are ordered by node id") {
  auto p = fixtures::simple_student("x");
  p.cognitive = {fixtures::node("zeta", {"fractions"}, 0.5), fixtures::node("alpha", {"fractions"}, 0.5),
                 fixtures::node("general", {"general"}, 0.5)};
  const auto hits = query_nodes(p, {"fractions"}, 3);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].node_id == "alpha");
  CHECK(hits[1].node_id == "zeta");
}

TEST_CASE("partial token overlap scores one half") {
  auto p = fixtures::simple_student("x");
  p.cognitive = {fixtures::node("n", {"times-tables", "division"}, 0.5), fixtures::node("general", {"general"}, 0.5)};
  const auto hits = query_nodes(p, {"tables"}, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].node_id == "n");
  CHECK(hits[0].score == 0.5);
}

TEST_CASE("ranking agrees with a brute-force scorer on random graphs") {
  const std::vector<std::string> vocab = {"add", "sub", "mul", "div", "frac", "dec", "geo", "alg", "4x", "7x",
                                          "tables", "area", "add-frac", "mul_tables", "geo/area"};
  std::mt19937_64 rng(99);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (int trial = 0; trial < 300; ++trial) {
    StudentProfile p = fixtures::simple_student("p");
    p.cognitive.clear();
    const std::size_t nodes = 1 + pick(40);
    for (std::size_t i = 0; i < nodes; ++i) {
      std::set<std::string> tags;
      const std::size_t ntags = 1 + pick(3);
      while (tags.size() < ntags) tags.insert(vocab[pick(vocab.size())]);
      p.cognitive.push_back(fixtures::node("n" + std::to_string(pick(1000)) + "_" + std::to_string(i),
                                           {tags.begin(), tags.end()}, 0.5));
    }
    p.cognitive.push_back(fixtures::node("general", {"general"}, 0.5));
    std::vector<std::string> query;
    for (std::size_t i = 0, n = 1 + pick(3); i < n; ++i) query.push_back(vocab[pick(vocab.size())]);
    const int k = 1 + static_cast<int>(pick(6));

    const auto before = p;
    const auto hits = query_nodes(p, query, k);
    CHECK(p == before);
    const auto expected = brute_rank(p, query);
    if (expected.empty()) {
      REQUIRE(hits.size() == 1);
      CHECK(hits[0].node_id == "general");
      continue;
    }
    REQUIRE(hits.size() == std::min<std::size_t>(k, expected.size()));
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].node_id == expected[i].second);
      CHECK(hits[i].score == expected[i].first);
    }
    CHECK(query_nodes(p, query, k) == hits);
  }
}

TEST_CASE("roster text round trip is identity") {
  const auto roster = fixtures::demo_roster();
  CHECK(roster_from_text(roster_to_text(roster)) == roster);
  const auto path = std::filesystem::temp_directory_path() / "slotsim_roundtrip.json";
  save_roster(roster, path);
  CHECK(load_roster(path) == roster);
}

TEST_CASE("roster loading errors") {
  CHECK(load_error("/nonexistent/roster.json") == ErrorCode::Io);
  CHECK(load_error(temp_file("empty.json", "")) == ErrorCode::SchemaMismatch);
  CHECK(load_error(temp_file("v2.json", R"({"schema_version": 2, "roster_id": "r", "students": []})")) ==
        ErrorCode::SchemaMismatch);

  auto j = json_io::roster_to_json(fixtures::demo_roster());
  j["students"][0]["favourite_colour"] = "blue";
  CHECK(load_error(temp_file("extra.json", j.dump())) == ErrorCode::SchemaMismatch);

  j = json_io::roster_to_json(fixtures::demo_roster());
  j["students"][1]["student_id"] = "devin";
  const auto dup = temp_file("dup.json", j.dump());
  CHECK(load_error(dup) == ErrorCode::Validation);
  try {
    load_roster(dup);
  } catch (const Error& e) {
    REQUIRE(e.report().has_value());
    CHECK(e.report()->has("DUPLICATE_ID"));
  }

  j = json_io::roster_to_json(fixtures::demo_roster());
  j["students"][0]["cognitive"][1]["mastery"] = 1.5;
  CHECK(load_error(temp_file("range.json", j.dump())) == ErrorCode::Validation);
}
