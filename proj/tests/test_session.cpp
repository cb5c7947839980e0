#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "slotsim/benchmark.hpp"
#include "slotsim/json_io.hpp"
#include "slotsim/session.hpp"

using namespace slotsim;
using fixtures::fx;

namespace {

SessionConfig demo_config(std::uint64_t seed, RealismStage stage = RealismStage::Stage1) {
  SessionConfig c;
  c.roster_path = fixtures::data_path("demo_roster.json");
  c.seed = seed;
  c.stage = stage;
  return c;
}

TeacherEvent ask_devin() {
  return TeacherEvent::ask("devin", {"4x", "multiplication", "tables"},
                           "Devin, what is 4 times 3? Think of it like collecting Fortnite loot.");
}

std::uint64_t pinned_seed() {
  std::ifstream in(fixtures::data_path("demo_pins.json"));
  return nlohmann::json::parse(in).at("seed").get<std::uint64_t>();
}

ErrorCode submit_error(Session& s, TeacherEvent e) {
  try {
    s.submit(std::move(e));
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("submit unexpectedly succeeded");
  return ErrorCode::Io;
}

class FailingPerformer final : public Performer {
public:
  Utterance perform(const PerformerRequest&) override { throw Error(ErrorCode::Timeout, "slow"); }
  [[nodiscard]] std::string_view backend_id() const override { return "failing"; }
};

}  // namespace

TEST_CASE("creating a session clamps the roster to the stage") {
  Session s(demo_config(42));
  const auto& st = s.state();
  CHECK(st.turn() == 0);
  CHECK(st.transcript.empty());
  CHECK(st.stage == RealismStage::Stage1);
  const auto expected = clamp_to_stage(fixtures::devin(), RealismStage::Stage1).profile;
  CHECK(st.classroom.find("devin")->profile == expected);
  CHECK(st.source_roster.find("devin")->modifiers == fixtures::devin().modifiers);
}

TEST_CASE("stage defaults to Stage1") {
  SessionConfig c;
  c.roster = fixtures::demo_roster();
  CHECK(Session(c).state().stage == RealismStage::Stage1);
}

TEST_CASE("missing roster file is an IO error") {
  auto c = demo_config(1);
  c.roster_path = "/nonexistent/roster.json";
  try {
    Session s(c);
    FAIL("expected IO");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("pinned seed reproduces the worked example") {
  Session s(demo_config(pinned_seed()));
  const auto responses = s.submit(ask_devin());
  REQUIRE(responses.size() == 1);
  CHECK(serialize_instruction(responses[0].instruction) ==
        "[Action: Answer Correctly; Confidence: 85%; Emotion: Joy; Tone: Eager; "
        "Contextual_Note: Use fortnite analogy if applicable]");
  CHECK(responses[0].utterance.text == "It's 12! I got this!");
}

TEST_CASE("a session turn equals the manual composition of the unit operations") {
  for (const auto stage : kAllStages) {
    Session s(demo_config(42, stage));
    const auto responses = s.submit(ask_devin());
    REQUIRE(responses.size() == 1);

    const auto caps = stage_caps(stage);
    std::vector<StudentProfile> staged;
    for (const auto& p : fixtures::demo_roster().students) staged.push_back(clamp_to_stage(p, caps).profile);
    auto classroom = make_classroom(staged);
    auto event = ask_devin();
    apply_event(classroom, event);
    propagate_peer_influence(classroom);
    const auto* devin = classroom.find("devin");
    SeededRandom rng(derive_spin_seed(42, 0, "devin"));
    const auto outcome = spin(devin->profile, devin->instances, {event.topic_tags, event.text, "devin", 0, caps}, rng);
    CHECK(responses[0].instruction == outcome.instruction);
    CHECK(s.state().spins.at(0).outcome.trace.draws == outcome.trace.draws);
  }
}

TEST_CASE("wait produces no utterances but decay ticks") {
  Session s(demo_config(3, RealismStage::Stage3));
  s.submit(TeacherEvent::compliment("devin"));
  const auto& inst = s.state().classroom.find("devin")->instances;
  REQUIRE(inst.size() == 1);
  CHECK(inst[0].remaining_turns == 3);
  CHECK(s.submit(TeacherEvent::wait()).empty());
  CHECK(inst[0].remaining_turns == 2);
  CHECK(s.state().turn() == 2);
  CHECK(s.state().transcript.back().stage_direction == "[waits]");
}

TEST_CASE("unknown target leaves the session unchanged") {
  Session s(demo_config(3));
  s.submit(ask_devin());
  const auto before_classroom = s.state().classroom;
  const auto before_transcript = s.state().transcript;
  CHECK(submit_error(s, TeacherEvent::compliment("ghost")) == ErrorCode::UnknownTarget);
  CHECK(submit_error(s, TeacherEvent::ask("ghost", {"4x"})) == ErrorCode::UnknownTarget);
  CHECK(submit_error(s, TeacherEvent{TeacherEventKind::Compliment}) == ErrorCode::Malformed);
  CHECK(s.state().classroom == before_classroom);
  CHECK(s.state().transcript == before_transcript);
  CHECK(s.state().events.size() == 1);
}

TEST_CASE("ungroundable questions are EMPTY_CONTEXT before any mutation") {
  auto roster = fixtures::demo_roster();
  auto& devin = roster.students[0];
  std::erase_if(devin.cognitive, [](const KnowledgeNode& n) { return n.node_id == "general"; });
  SessionConfig c;
  c.roster = roster;
  Session s(c);
  const auto before = s.state().classroom;
  CHECK(submit_error(s, TeacherEvent::ask("devin", {"photosynthesis"})) == ErrorCode::EmptyContext);
  CHECK(s.state().classroom == before);
  CHECK(s.state().turn() == 0);
}

TEST_CASE("exactly one performer call per responding student per turn") {
  for (const bool wildcard : {false, true}) {
    auto counting = std::make_shared<CountingPerformer>();
    auto c = demo_config(11, RealismStage::Stage3);
    c.performer = counting;
    c.simulation.session.unaddressed_wildcard = wildcard;
    Session s(c);
    long expected = 0;
    for (int turn = 0; turn < 60; ++turn) {
      const auto before = counting->calls();
      TeacherEvent e = turn % 3 == 0 ? ask_devin()
                       : turn % 3 == 1 ? TeacherEvent::ask("sam", {"4x"}, "Sam?")
                                       : TeacherEvent::wait();
      const auto responses = s.submit(e);
      expected += static_cast<long>(responses.size());
      CHECK(counting->calls() - before == static_cast<long>(responses.size()));
      if (!wildcard) CHECK(responses.size() == (e.kind == TeacherEventKind::AskQuestion ? 1U : 0U));
    }
    CHECK(counting->calls() == expected);
  }
}

TEST_CASE("active roster is truncated to the stage limit") {
  auto roster = fixtures::demo_roster();
  for (int i = 0; i < 7; ++i) {
    auto extra = fixtures::simple_student("extra" + std::to_string(i));
    roster.students.push_back(extra);
  }
  SessionConfig c;
  c.roster = roster;
  Session s(c);
  CHECK(s.state().classroom.students.size() == 5);
  CHECK(s.state().inactive_students == std::vector<std::string>{"extra2", "extra3", "extra4", "extra5", "extra6"});
  CHECK(submit_error(s, TeacherEvent::compliment("extra6")) == ErrorCode::UnknownTarget);
}

TEST_CASE("performer failures become stage directions") {
  auto c = demo_config(5);
  c.performer = std::make_shared<FailingPerformer>();
  Session s(c);
  const auto r = s.submit(ask_devin());
  REQUIRE(r.size() == 1);
  CHECK(r[0].utterance.text.empty());
  CHECK(r[0].utterance.stage_direction == "[no response: TIMEOUT]");
  CHECK(s.state().transcript.back().instruction.has_value());
}

TEST_CASE("answer text comes from the node description") {
  CHECK(answer_from_description({"n", {"t"}, "4 x 3 = 12", fx(0.5), {}}) == "12");
  CHECK(answer_from_description({"n", {"t"}, "1/2 + 1/4 = 3/4", fx(0.5), {}}) == "3/4");
  CHECK(answer_from_description({"n", {"t"}, "photosynthesis", fx(0.5), {}}) == "photosynthesis");
  CHECK(answer_from_description({"n", {"t"}, "", fx(0.5), {}}) == "n");
}

TEST_CASE("disruption metrics") {
  auto c = demo_config(1, RealismStage::Stage3);
  c.simulation.spin.failure_weights = {0, 0, 0, 1, 0, 0};
  auto roster = fixtures::demo_roster();
  for (auto& n : roster.students[2].cognitive) n.mastery = Fixed4::zero();
  roster.students[2].wildcard_probability = Fixed4::zero();
  c.roster_path.reset();
  c.roster = roster;
  Session s(c);
  auto ask_sam = [] { return TeacherEvent::ask("sam", {"4x"}, "Sam?"); };

  REQUIRE(s.submit(ask_sam())[0].instruction.action == ActionKind::RefuseToAnswer);
  s.submit(TeacherEvent::compliment("sam"));
  CHECK(s.state().metrics.snapshot(0).disruption_resolution_rate == 1.0);

  s.submit(ask_sam());  // refuses again, then goes unaddressed
  s.submit(TeacherEvent::wait());
  s.submit(TeacherEvent::wait());
  const auto m = s.state().metrics.snapshot(2);
  CHECK(s.state().metrics.disruptions == 2);
  CHECK(m.sessions_completed == 2);
  CHECK(m.constructive_fraction == doctest::Approx(3.0 / 5.0));
  CHECK(m.disruption_resolution_rate == doctest::Approx(0.5));
}

TEST_CASE("snapshot shape") {
  Session s(demo_config(pinned_seed()));
  s.submit(ask_devin());
  s.submit(TeacherEvent::compliment("devin"));
  const auto j = session_snapshot_json(s.state(), 2.0);
  CHECK(j["stage"] == "stage1");
  CHECK(j["turn"] == 2);
  CHECK(j["students"].size() == 3);
  const auto& devin = j["students"][0];
  CHECK(devin["student_id"] == "devin");
  // Stage1 scales the +0.10 rule to +0.0571; the turn's own tick leaves 3/4 of it.
  CHECK(devin["affect"]["pride_accomplishment"].get<double>() == doctest::Approx(0.5428));
  CHECK(devin["active_instances"].size() == 1);
  CHECK(devin["last_utterance"]["text"] == "It's 12! I got this!");
  CHECK(j["transcript"].size() == 3);
  CHECK(j["metrics"].contains("spin_path_median_ms"));
}
