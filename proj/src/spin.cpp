#include "slotsim/spin.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace slotsim {
namespace {

double draw(RandomSource& rng, std::vector<double>* draws) {
  const double u = rng.next_unit();
  if (draws) draws->push_back(u);
  return u;
}

bool is_positive_affect(EmotionId e) {
  using enum EmotionId;
  return e == Joy || e == PrideAccomplishment || e == Engagement || e == Excitement || e == Curiosity;
}

bool is_negative_affect(EmotionId e) {
  using enum EmotionId;
  return e == Confusion || e == AnxietyShyness || e == Frustration;
}

// Index of the bucket that u (in [0,1)) falls into, skipping zero-weight buckets.
template <std::size_t N>
std::size_t pick(const std::array<double, N>& weights, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  return last;
}

bool is_failure_action(ActionKind a) { return a != ActionKind::AnswerCorrectly && a != ActionKind::OffTaskRemark; }

EmotionId sample_and_trace(const std::array<Fixed4, kEmotionCount>& intensities, ActionKind action, RandomSource& rng,
                           double factor, SpinTrace& trace) {
  for (std::size_t i = 0; i < kEmotionCount; ++i) trace.emotion_weights_pre[i] = intensities[i].to_double();
  trace.emotion_weights_post = conditioned_emotion_weights(intensities, action, factor);
  return kAllEmotions[pick(trace.emotion_weights_post, 1.0, draw(rng, &trace.draws))];
}

}  // namespace

ActionKind sample_action(Fixed4 mastery, const StageCaps& caps, RandomSource& rng, const SpinConfig& config,
                         std::vector<double>* draws) {
  if (draw(rng, draws) < mastery.to_double()) return ActionKind::AnswerCorrectly;

  std::array<double, kActionCount> weights{};
  double total = 0.0;
  for (const auto a : kAllActions) {
    if (!is_failure_action(a) || !caps.allowed_actions.contains(a)) continue;
    weights[index_of(a)] = std::max(0.0, config.failure_weights[index_of(a)]);
    total += weights[index_of(a)];
  }
  // No reachable failure action: the only reachable outcome is a correct answer.
  if (total <= 0.0) return ActionKind::AnswerCorrectly;
  return kAllActions[pick(weights, total, draw(rng, draws))];
}

std::array<double, kEmotionCount> conditioned_emotion_weights(const std::array<Fixed4, kEmotionCount>& intensities,
                                                              ActionKind action, double factor) {
  std::array<double, kEmotionCount> w{};
  double total = 0.0;
  for (const auto e : kAllEmotions) {
    double v = intensities[index_of(e)].to_double();
    if (action == ActionKind::AnswerCorrectly && is_positive_affect(e)) v *= factor;
    if ((action == ActionKind::AnswerIncorrectly || action == ActionKind::RefuseToAnswer) && is_negative_affect(e))
      v *= factor;
    w[index_of(e)] = v;
    total += v;
  }
  if (total <= 0.0) {
    w.fill(1.0 / static_cast<double>(kEmotionCount));
    return w;
  }
  for (auto& v : w) v /= total;
  return w;
}

EmotionId sample_emotion(const std::array<Fixed4, kEmotionCount>& intensities, ActionKind action, RandomSource& rng,
                         double factor, std::vector<double>* draws) {
  const auto w = conditioned_emotion_weights(intensities, action, factor);
  return kAllEmotions[pick(w, 1.0, draw(rng, draws))];
}

ToneTag derive_tone(EmotionId emotion, const BehavioralTraits&) {
  switch (emotion) {
    case EmotionId::Joy: return ToneTag::Eager;
    case EmotionId::PrideAccomplishment: return ToneTag::Confident;
    case EmotionId::Engagement: return ToneTag::Attentive;
    case EmotionId::Confusion: return ToneTag::Hesitant;
    case EmotionId::AnxietyShyness: return ToneTag::Quiet;
    case EmotionId::Resentment: return ToneTag::Curt;
    case EmotionId::Boredom: return ToneTag::Flat;
    case EmotionId::Frustration: return ToneTag::Sharp;
    case EmotionId::Curiosity: return ToneTag::Inquisitive;
    case EmotionId::Excitement: return ToneTag::Animated;
  }
  return ToneTag::Attentive;
}

std::vector<std::string> text_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<std::string> match_interest(const BehavioralTraits& traits, const SpinContext& ctx) {
  if (traits.interests.empty()) return std::nullopt;
  std::vector<std::string> context;
  for (const auto& t : ctx.topic_tags)
    for (auto& tok : tag_tokens(t)) context.push_back(std::move(tok));
  for (auto& tok : text_tokens(ctx.text)) context.push_back(std::move(tok));
  for (const auto& interest : traits.interests)
    for (const auto& tok : tag_tokens(interest))
      if (std::find(context.begin(), context.end(), tok) != context.end()) return interest;
  return std::nullopt;
}

int confidence_from_engagement(Fixed4 engagement) {
  return static_cast<int>((engagement.clamp01().units() + 50) / 100);
}

SpinOutcome spin(const StudentProfile& profile, const std::vector<ModifierInstance>& active, const SpinContext& ctx,
                 RandomSource& rng, const SpinConfig& config) {
  SpinOutcome out;
  auto& trace = out.trace;
  trace.wildcard_probability = profile.wildcard_probability;

  const double wildcard_u = draw(rng, &trace.draws);
  trace.wildcard_fired = wildcard_u < profile.wildcard_probability.to_double() &&
                         ctx.caps.allowed_actions.contains(ActionKind::OffTaskRemark);

  try {
    trace.retrieved = query_nodes(profile, QueryTags(ctx.topic_tags), std::max(1, config.retrieval_k));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFallback) throw;
    throw Error(ErrorCode::EmptyContext, "nothing to retrieve for '" + profile.student_id + "': " + e.what());
  }
  trace.node_id = trace.retrieved.front().node_id;
  trace.mastery_used = effective_parameter(profile, active, ParameterPath::mastery(trace.node_id));

  auto& ins = out.instruction;
  ins.action = trace.wildcard_fired ? ActionKind::OffTaskRemark
                                    : sample_action(trace.mastery_used, ctx.caps, rng, config, &trace.draws);

  const auto affect = effective_affect(profile, active);
  ins.emotion = sample_and_trace(affect, ins.action, rng, config.emotion_conditioning, trace);
  ins.tone = derive_tone(ins.emotion, profile.behavioral);

  trace.matched_interest = match_interest(profile.behavioral, ctx);
  if (trace.matched_interest) ins.contextual_note = "Use " + *trace.matched_interest + " analogy if applicable";

  trace.engagement_used = affect[index_of(EmotionId::Engagement)];
  ins.confidence_pct = confidence_from_engagement(trace.engagement_used);
  return out;
}

std::optional<SpinOutcome> spin_unaddressed(const StudentProfile& profile, const std::vector<ModifierInstance>& active,
                                            const SpinContext& ctx, RandomSource& rng, const SpinConfig& config) {
  SpinOutcome out;
  auto& trace = out.trace;
  trace.wildcard_probability = profile.wildcard_probability;
  const double u = draw(rng, &trace.draws);
  if (u >= profile.wildcard_probability.to_double() || !ctx.caps.allowed_actions.contains(ActionKind::OffTaskRemark))
    return std::nullopt;
  trace.wildcard_fired = true;

  auto& ins = out.instruction;
  ins.action = ActionKind::OffTaskRemark;
  const auto affect = effective_affect(profile, active);
  ins.emotion = sample_and_trace(affect, ins.action, rng, config.emotion_conditioning, trace);
  ins.tone = derive_tone(ins.emotion, profile.behavioral);
  trace.engagement_used = affect[index_of(EmotionId::Engagement)];
  ins.confidence_pct = confidence_from_engagement(trace.engagement_used);
  return out;
}

}  // namespace slotsim
