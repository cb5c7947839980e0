#include "slotsim/benchmark.hpp"

#include <algorithm>
#include <thread>

#include "slotsim/random.hpp"
#include "slotsim/retrieval.hpp"
#include "slotsim/spin.hpp"
#include "slotsim/stage.hpp"

namespace slotsim {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5)];
}

PipelineStats summarize(const std::vector<double>& turn_ms, long calls, int turns) {
  PipelineStats s;
  s.total_calls = calls;
  s.calls_per_turn = calls / turns;
  for (const double t : turn_ms) s.total_wall_ms += t;
  s.wall_ms_per_turn = s.total_wall_ms / turns;
  s.median_turn_ms = percentile(turn_ms, 0.5);
  s.p95_turn_ms = percentile(turn_ms, 0.95);
  return s;
}

const std::vector<std::string> kQuestionTags = {"4x", "multiplication", "tables"};

}  // namespace

Utterance CountingPerformer::perform(const PerformerRequest& req) {
  calls_.fetch_add(1);
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  auto u = voice_.perform(req);
  u.backend_id = std::string(backend_id());
  return u;
}

StudentProfile benchmark_profile() {
  StudentProfile p;
  p.student_id = "bench";
  p.display_name = "Bench";
  p.persona_blurb = "A fourth grader who loves video games.";
  p.cognitive = {
      {"mult_4x", {"4x", "multiplication", "tables"}, "4 x 3 = 12", Fixed4::from_units(9000), {}},
      {"mult_7x", {"7x", "multiplication", "tables"}, "7 x 8 = 56", Fixed4::from_units(6000), {"mult_4x"}},
      {"general", {"general"}, "I'm not sure", Fixed4::from_units(5000), {}},
  };
  p.affective[EmotionId::Joy] = Fixed4::from_units(9500);
  p.affective[EmotionId::Engagement] = Fixed4::from_units(8500);
  p.affective[EmotionId::Confusion] = Fixed4::from_units(1500);
  p.behavioral.openness_to_feedback = Fixed4::from_units(7000);
  p.behavioral.interests = {"fortnite"};
  return p;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (!(config.latency_ms >= 0.0) || config.stages < 1 || config.beam < 1 || config.turns < 1)
    throw Error(ErrorCode::InvalidArgument, "benchmark needs latency >= 0 and stages, beam, turns >= 1");

  const StudentProfile profile = benchmark_profile();
  const StageCaps caps = stage_caps(RealismStage::Stage3);
  const std::vector<ModifierInstance> none;
  CountingPerformer performer(
      std::chrono::microseconds(static_cast<std::int64_t>(config.latency_ms * 1000.0 + 0.5)));

  BenchmarkReport report;
  report.config = config;

  // Single call: one spin produces the instruction, one performer call voices it.
  std::vector<double> single_ms;
  for (int t = 0; t < config.turns; ++t) {
    const auto start = Clock::now();
    SeededRandom rng(derive_spin_seed(config.seed, t, profile.student_id));
    const SpinContext ctx{kQuestionTags, "What is 4 times 3?", profile.student_id, t, caps};
    const auto outcome = spin(profile, none, ctx, rng);
    PerformerRequest req{outcome.instruction, profile.persona_blurb, {}, std::nullopt};
    const auto a = outcome.instruction.action;
    if (a == ActionKind::AnswerCorrectly || a == ActionKind::AnswerIncorrectly) req.answer = "12";
    (void)performer.perform(req);
    single_ms.push_back(ms_since(start));
  }
  report.single_call = summarize(single_ms, performer.calls(), config.turns);
  performer.reset();

  // Multi-stage: each of k refinement stages generates b candidates (one call
  // each) conditioned on the previous stage's survivor, then keeps one.
  std::vector<double> multi_ms;
  for (int t = 0; t < config.turns; ++t) {
    const auto start = Clock::now();
    const auto hits = query_nodes(profile, kQuestionTags, 3);
    std::vector<TranscriptEntry> context{{t, "teacher", "What is 4 times 3?", std::nullopt, std::nullopt}};
    std::string survivor;
    for (int stage = 0; stage < config.stages; ++stage) {
      std::vector<std::string> candidates;
      for (int b = 0; b < config.beam; ++b) {
        BehavioralInstruction draft{ActionKind::AnswerCorrectly, 50, EmotionId::Engagement, ToneTag::Attentive,
                                    "Refine candidate " + std::to_string(b) + " for " + hits.front().node_id};
        PerformerRequest req{draft, profile.persona_blurb, context, std::string("12")};
        (void)build_prompt(req);
        candidates.push_back(performer.perform(req).text);
      }
      survivor = *std::min_element(candidates.begin(), candidates.end());
      context.push_back({t, profile.student_id, survivor, std::nullopt, std::nullopt});
    }
    multi_ms.push_back(ms_since(start));
  }
  report.multi_stage = summarize(multi_ms, performer.calls(), config.turns);

  report.speedup = report.single_call.total_wall_ms > 0.0
                       ? report.multi_stage.total_wall_ms / report.single_call.total_wall_ms
                       : 0.0;
  return report;
}

nlohmann::json benchmark_report_json(const BenchmarkReport& r) {
  auto stats = [](const PipelineStats& s) {
    return nlohmann::json{{"calls_per_turn", s.calls_per_turn},     {"total_calls", s.total_calls},
                          {"total_wall_ms", s.total_wall_ms},       {"wall_ms_per_turn", s.wall_ms_per_turn},
                          {"median_turn_ms", s.median_turn_ms},     {"p95_turn_ms", s.p95_turn_ms}};
  };
  return {{"config",
           {{"latency_ms", r.config.latency_ms},
            {"stages", r.config.stages},
            {"beam", r.config.beam},
            {"turns", r.config.turns}}},
          {"single_call", stats(r.single_call)},
          {"multi_stage", stats(r.multi_stage)},
          {"speedup", r.speedup}};
}

}  // namespace slotsim
