#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "slotsim/profile.hpp"

using namespace slotsim;
using fixtures::fx;

TEST_CASE("fixed-point arithmetic") {
  CHECK(to_string(fx(0.075)) == "0.075");
  CHECK(to_string(fx(-0.05)) == "-0.05");
  CHECK(to_string(Fixed4::one()) == "1");
  CHECK(fx(0.1).scaled_round(3, 4) == fx(0.075));
  CHECK(fx(-0.05).scaled_round(3, 4).units() == -375);
  CHECK(fx(0.1).scaled_round(1, 3).units() == 333);
  CHECK(fx(-0.1).scaled_trunc(2, 3).units() == -666);
  CHECK((fx(0.9) * fx(0.5)) == fx(0.45));
  CHECK(fx(1.3).clamp01() == Fixed4::one());
  CHECK(fx(-0.2).clamp01() == Fixed4::zero());
}

TEST_CASE("parameter paths parse and print") {
  for (const std::string text : {"affective.joy", "affective.anxiety_shyness", "behavioral.openness_to_feedback",
                                 "cognitive.mult_4x.mastery", "cognitive.a.b.mastery"}) {
    const auto p = ParameterPath::parse(text);
    REQUIRE(p.has_value());
    CHECK(p->str() == text);
  }
  for (const std::string text : {"affective.happiness", "behavioral.grit", "cognitive..mastery", "cognitive.x",
                                 "affective", ""})
    CHECK_FALSE(ParameterPath::parse(text).has_value());
}

TEST_CASE("the demo roster validates and carries the documented values") {
  const auto d = fixtures::devin();
  CHECK(validate_profile(d).ok);
  REQUIRE(d.find_node("mult_4x") != nullptr);
  CHECK(d.find_node("mult_4x")->mastery == fx(0.9));
  CHECK(d.find_node("mult_7x")->mastery == fx(0.6));
  CHECK(d.affective[EmotionId::Joy] == fx(0.95));
  CHECK(d.affective[EmotionId::Engagement] == fx(0.85));
  CHECK(d.wildcard_probability == fx(0.02));
}

TEST_CASE("validation reports every violation with a stable code") {
  auto p = fixtures::simple_student("ana");
  p.cognitive.push_back(fixtures::node("topic", {"Topic"}, 1.5));
  p.cognitive.push_back(fixtures::node("empty", {}, 0.5));
  p.behavioral.social_links.push_back({"ana", fx(0.3)});
  p.behavioral.interests.push_back("Chess");
  p.affective[EmotionId::Joy] = fx(1.2);
  p.wildcard_probability = fx(0.2);
  p.modifiers.push_back({"r", {TeacherEventKind::Compliment}, {{ParameterPath::mastery("nope"), fx(0.1)}}, 0});
  p.modifiers.push_back({"r", {TeacherEventKind::Compliment}, {}, 2});

  const auto report = validate_profile(p);
  CHECK_FALSE(report.ok);
  for (const char* code : {"DUPLICATE_NODE", "OUT_OF_RANGE", "NOT_LOWERCASE", "EMPTY_TAGS", "SELF_LINK",
                           "UNKNOWN_PATH", "INVALID_TTL", "DUPLICATE_RULE", "EMPTY_EFFECTS"})
    CHECK_MESSAGE(report.has(code), code);
}

TEST_CASE("prerequisite cycles are rejected") {
  auto p = fixtures::simple_student("ana");
  p.cognitive.push_back(fixtures::node("a", {"a"}, 0.5));
  p.cognitive.push_back(fixtures::node("b", {"b"}, 0.5));
  p.cognitive[2].prerequisites = {"b"};
  p.cognitive[3].prerequisites = {"a"};
  CHECK(validate_profile(p).has("CYCLIC_GRAPH"));

  p.cognitive[3].prerequisites = {"topic"};
  CHECK(validate_profile(p).ok);
  p.cognitive[3].prerequisites = {"missing"};
  CHECK(validate_profile(p).has("UNKNOWN_PREREQUISITE"));
}

TEST_CASE("effective parameters equal baseline without instances and clamp with them") {
  const auto d = fixtures::devin();
  for (const auto e : kAllEmotions)
    CHECK(effective_parameter(d, {}, ParameterPath::affect(e)) == d.affective[e]);
  for (const auto& n : d.cognitive)
    CHECK(effective_parameter(d, {}, ParameterPath::mastery(n.node_id)) == n.mastery);
  CHECK(effective_parameter(d, {}, ParameterPath::openness()) == d.behavioral.openness_to_feedback);

  ModifierInstance up{"x", "r", 0, 1, 1, {}, {{ParameterPath::affect(EmotionId::Joy), fx(0.3)}}};
  ModifierInstance down{"y", "r", 0, 1, 1, {}, {{ParameterPath::affect(EmotionId::Resentment), fx(-0.4)}}};
  CHECK(effective_parameter(d, {up}, ParameterPath::affect(EmotionId::Joy)) == Fixed4::one());
  CHECK(effective_parameter(d, {down}, ParameterPath::affect(EmotionId::Resentment)) == Fixed4::zero());
  CHECK_THROWS_AS(effective_parameter(d, {}, ParameterPath::mastery("ghost")), Error);
}

TEST_CASE("volatility counts modifier magnitudes and ten times the wildcard") {
  const auto d = fixtures::devin();
  // 0.10 + 0.05 + 10 x 0.02
  CHECK(volatility_units(d) == 3500);
  CHECK(volatility_score(d) == doctest::Approx(0.35));
}

TEST_CASE("volatility is monotone in each delta and in the wildcard") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> units(0, 5000);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = fixtures::simple_student("v", 0.5, units(rng) / 100000.0);
    p.modifiers.push_back({"r",
                           {TeacherEventKind::Compliment},
                           {{ParameterPath::affect(EmotionId::Joy), Fixed4::from_units(units(rng) - 2500)},
                            {ParameterPath::affect(EmotionId::Boredom), Fixed4::from_units(units(rng) - 2500)}},
                           3});
    const auto before = volatility_units(p);
    auto bigger = p;
    auto& d = bigger.modifiers[0].effects[trial % 2].delta;
    d = d.units() >= 0 ? d + Fixed4::from_units(7) : d - Fixed4::from_units(7);
    CHECK(volatility_units(bigger) >= before);
    auto wilder = p;
    wilder.wildcard_probability += Fixed4::from_units(3);
    CHECK(volatility_units(wilder) >= before);
  }
}

TEST_CASE("tag tokens split on separators") {
  CHECK(tag_tokens("4x multiplication") == std::vector<std::string>{"4x", "multiplication"});
  CHECK(tag_tokens("times-tables_7/8") == std::vector<std::string>{"times", "tables", "7", "8"});
}
