#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "slotsim/modifiers.hpp"

using namespace slotsim;
using fixtures::fx;

namespace {

const auto kPride = ParameterPath::affect(EmotionId::PrideAccomplishment);
const auto kAnxiety = ParameterPath::affect(EmotionId::AnxietyShyness);
const auto kEngagement = ParameterPath::affect(EmotionId::Engagement);

Fixed4 effective(const ClassroomState& s, std::string_view id, const ParameterPath& path) {
  const auto* slot = s.find(id);
  REQUIRE(slot != nullptr);
  return effective_parameter(slot->profile, slot->instances, path);
}

bool all_in_unit_range(const ClassroomState& s) {
  for (const auto& slot : s.students) {
    for (const auto e : kAllEmotions) {
      const auto v = effective_parameter(slot.profile, slot.instances, ParameterPath::affect(e));
      if (v < Fixed4::zero() || v > Fixed4::one()) return false;
    }
    for (const auto& n : slot.profile.cognitive) {
      const auto v = effective_parameter(slot.profile, slot.instances, ParameterPath::mastery(n.node_id));
      if (v < Fixed4::zero() || v > Fixed4::one()) return false;
    }
  }
  return true;
}

TeacherEvent at_turn(TeacherEvent e, int turn) {
  e.turn = turn;
  return e;
}

}  // namespace

TEST_CASE("compliment applies the rule deltas exactly") {
  auto state = make_classroom(fixtures::demo_roster().students);
  const auto pride0 = effective(state, "devin", kPride);
  const auto anxiety0 = effective(state, "devin", kAnxiety);
  const auto ids = apply_event(state, TeacherEvent::compliment("devin"));
  REQUIRE(ids.size() == 1);
  CHECK(effective(state, "devin", kPride) - pride0 == fx(0.10));
  CHECK(effective(state, "devin", kAnxiety) - anxiety0 == fx(-0.05));
  CHECK(effective(state, "maya", kPride) == state.find("maya")->profile.affective[EmotionId::PrideAccomplishment]);
}

TEST_CASE("built-in defaults apply when a profile lacks a rule for the kind") {
  auto state = make_classroom({fixtures::simple_student("ana")});
  apply_event(state, TeacherEvent::compliment("ana"));
  CHECK(effective(state, "ana", kPride) == fx(0.6));
  CHECK(effective(state, "ana", kAnxiety) == fx(0.45));
  apply_event(state, at_turn(TeacherEvent::critique("ana"), 1));
  CHECK(effective(state, "ana", kEngagement) == fx(0.4));
  CHECK(effective(state, "ana", ParameterPath::affect(EmotionId::Resentment)) == fx(0.6));
}

TEST_CASE("linear decay and return to baseline") {
  auto state = make_classroom({fixtures::simple_student("ana")});
  apply_event(state, TeacherEvent::compliment("ana"));
  const auto& inst = state.find("ana")->instances;
  REQUIRE(inst.size() == 1);
  tick_decay(state);
  CHECK(inst[0].current[0].delta == fx(0.075));
  CHECK(inst[0].current[1].delta.units() == -375);
  CHECK(inst[0].remaining_turns == 3);
  tick_decay(state);
  tick_decay(state);
  CHECK(inst[0].current[0].delta == fx(0.025));
  tick_decay(state);
  CHECK(inst.empty());
  CHECK(effective(state, "ana", kPride) == fx(0.5));
  CHECK(effective(state, "ana", kAnxiety) == fx(0.5));
}

TEST_CASE("return to baseline is exact for arbitrary single events") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = fixtures::simple_student("ana");
    const int ttl = 1 + static_cast<int>(rng() % 9);
    p.modifiers.push_back({"r",
                           {TeacherEventKind::HarshCritique},
                           {{kEngagement, Fixed4::from_units(static_cast<std::int64_t>(rng() % 20001) - 10000)},
                            {ParameterPath::mastery("topic"), Fixed4::from_units(static_cast<std::int64_t>(rng() % 7777))}},
                           ttl});
    auto state = make_classroom({p});
    const auto before = state;
    apply_event(state, TeacherEvent::critique("ana"));
    for (int i = 0; i < ttl; ++i) {
      CHECK(all_in_unit_range(state));
      tick_decay(state);
    }
    CHECK(state == before);
  }
}

TEST_CASE("clamping holds at both bounds") {
  auto p = fixtures::simple_student("ana");
  p.affective[EmotionId::PrideAccomplishment] = fx(0.95);
  p.affective[EmotionId::AnxietyShyness] = fx(0.02);
  auto state = make_classroom({p});
  apply_event(state, TeacherEvent::compliment("ana"));
  CHECK(effective(state, "ana", kPride) == Fixed4::one());
  CHECK(effective(state, "ana", kAnxiety) == Fixed4::zero());
}

TEST_CASE("tick on an empty classroom is the identity") {
  auto state = make_classroom(fixtures::demo_roster().students);
  const auto before = state;
  tick_decay(state);
  CHECK(state == before);
}

TEST_CASE("events with no matching rule leave state bit-identical") {
  auto state = make_classroom(fixtures::demo_roster().students);
  const auto before = state;
  CHECK(apply_event(state, TeacherEvent::wait()).empty());
  CHECK(apply_event(state, TeacherEvent::instruction("Open your books")).empty());
  CHECK(apply_event(state, TeacherEvent::ask("devin", {"4x"})).empty());
  CHECK(state == before);
}

TEST_CASE("unknown target leaves state untouched") {
  auto state = make_classroom(fixtures::demo_roster().students);
  const auto before = state;
  try {
    apply_event(state, TeacherEvent::compliment("nobody"));
    FAIL("expected UNKNOWN_TARGET");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownTarget);
  }
  CHECK(state == before);
  CHECK_THROWS_AS(apply_event(state, TeacherEvent{TeacherEventKind::Compliment}), Error);
}

TEST_CASE("events on different students commute") {
  const auto roster = fixtures::demo_roster();
  const std::vector<TeacherEvent> kinds = {TeacherEvent::compliment("devin"), TeacherEvent::critique("maya"),
                                           TeacherEvent::critique("sam"), TeacherEvent::compliment("sam"),
                                           TeacherEvent::proximity("maya", true)};
  for (const auto& a : kinds)
    for (const auto& b : kinds) {
      if (a.target == b.target) continue;
      auto s1 = make_classroom(roster.students);
      auto s2 = s1;
      apply_event(s1, a);
      apply_event(s1, b);
      apply_event(s2, b);
      apply_event(s2, a);
      CHECK(s1 == s2);
    }
}

TEST_CASE("repeated events get distinct instance ids") {
  auto state = make_classroom(fixtures::demo_roster().students);
  const auto a = apply_event(state, TeacherEvent::compliment("devin"));
  const auto b = apply_event(state, TeacherEvent::compliment("devin"));
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0] != b[0]);
  CHECK(state.find("devin")->instances.size() == 2);
  CHECK(effective(state, "devin", kPride) == fx(0.7));
}

TEST_CASE("rule trigger predicates") {
  auto p = fixtures::simple_student("ana");
  p.modifiers.push_back({"envy", {TeacherEventKind::Compliment, TargetPredicate::Others},
                         {{ParameterPath::affect(EmotionId::Resentment), fx(0.05)}}, 2});
  p.modifiers.push_back({"near", {TeacherEventKind::Proximity, TargetPredicate::Self, true}, {{kEngagement, fx(0.1)}}, 2});
  auto state = make_classroom({p, fixtures::simple_student("ben")});
  apply_event(state, TeacherEvent::compliment("ben"));
  CHECK(effective(state, "ana", ParameterPath::affect(EmotionId::Resentment)) == fx(0.55));
  // ana has a compliment rule (for others), so no built-in compliment for her own praise.
  apply_event(state, TeacherEvent::compliment("ana"));
  CHECK(effective(state, "ana", kPride) == fx(0.5));
  apply_event(state, TeacherEvent::proximity("ana", false));
  CHECK(effective(state, "ana", kEngagement) == fx(0.5));
  apply_event(state, TeacherEvent::proximity("ana", true));
  CHECK(effective(state, "ana", kEngagement) == fx(0.6));
}

TEST_CASE("peer influence from a disengaged student") {
  auto s = fixtures::simple_student("s");
  s.affective[EmotionId::Engagement] = fx(0.20);
  s.behavioral.social_links = {{"p", fx(0.8)}, {"q", fx(-0.5)}, {"z", fx(0.0)}};
  auto p = fixtures::simple_student("p");
  auto q = fixtures::simple_student("q");
  auto z = fixtures::simple_student("z");
  auto state = make_classroom({s, p, q, z});
  const auto ids = propagate_peer_influence(state);
  CHECK(ids.size() == 2);
  const auto& pi = state.find("p")->instances;
  REQUIRE(pi.size() == 1);
  CHECK(pi[0].current[0].delta == fx(-0.04));
  CHECK(pi[0].ttl_turns == 1);
  CHECK(effective(state, "q", kEngagement) == fx(0.525));
  CHECK(state.find("z")->instances.empty());
  tick_decay(state);
  CHECK(state.find("p")->instances.empty());
}

TEST_CASE("peer influence clamps at zero and ignores engaged students") {
  auto s = fixtures::simple_student("s");
  s.affective[EmotionId::Engagement] = fx(0.20);
  s.behavioral.social_links = {{"p", fx(0.8)}};
  auto p = fixtures::simple_student("p");
  p.affective[EmotionId::Engagement] = fx(0.02);
  auto state = make_classroom({s, p});
  propagate_peer_influence(state);
  CHECK(effective(state, "p", kEngagement) == Fixed4::zero());

  s.affective[EmotionId::Engagement] = fx(0.30);
  auto calm = make_classroom({s, p});
  CHECK(propagate_peer_influence(calm).empty());
}

TEST_CASE("peer influence does not depend on roster order") {
  auto a = fixtures::simple_student("a");
  auto b = fixtures::simple_student("b");
  a.affective[EmotionId::Engagement] = fx(0.31);
  b.affective[EmotionId::Engagement] = fx(0.1);
  a.behavioral.social_links = {{"b", fx(1.0)}};
  b.behavioral.social_links = {{"a", fx(1.0)}};
  auto s1 = make_classroom({a, b});
  auto s2 = make_classroom({b, a});
  propagate_peer_influence(s1);
  propagate_peer_influence(s2);
  CHECK(effective(s1, "a", kEngagement) == effective(s2, "a", kEngagement));
  CHECK(effective(s1, "b", kEngagement) == effective(s2, "b", kEngagement));
  CHECK(s1.find("b")->instances.empty());
}

TEST_CASE("random event sequences keep every parameter in range") {
  std::mt19937_64 rng(8);
  const auto roster = fixtures::demo_roster();
  auto state = make_classroom(roster.students);
  const std::vector<std::string> ids = {"devin", "maya", "sam"};
  for (int turn = 0; turn < 400; ++turn) {
    const auto& who = ids[rng() % ids.size()];
    TeacherEvent e;
    switch (rng() % 4) {
      case 0: e = TeacherEvent::compliment(who); break;
      case 1: e = TeacherEvent::critique(who); break;
      case 2: e = TeacherEvent::proximity(who, rng() % 2 == 0); break;
      default: e = TeacherEvent::wait(); break;
    }
    e.turn = turn;
    state.turn = turn;
    apply_event(state, e);
    propagate_peer_influence(state);
    REQUIRE(all_in_unit_range(state));
    for (const auto& slot : state.students) CHECK(slot.instances.size() <= 12);
    tick_decay(state);
  }
}
