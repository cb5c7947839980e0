#include "slotsim/profile.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace slotsim {
namespace {

bool is_lowercase(std::string_view s) {
  return std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c) != 0; });
}

bool in_unit(Fixed4 v) { return v >= Fixed4::zero() && v <= Fixed4::one(); }

void check_tags(ValidationReport& report, const std::string& path, const std::vector<std::string>& tags,
                bool require_nonempty) {
  if (require_nonempty && tags.empty()) report.add(path, "EMPTY_TAGS", "at least one tag is required");
  for (const auto& t : tags) {
    if (t.empty()) report.add(path, "EMPTY_TAG", "tags must be non-empty strings");
    else if (!is_lowercase(t)) report.add(path, "NOT_LOWERCASE", "tag '" + t + "' must be lowercase");
  }
}

// Reports a cycle if the prerequisite graph among known nodes is not a DAG.
void check_acyclic(ValidationReport& report, const std::vector<KnowledgeNode>& nodes) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].node_id, i);

  enum class Mark : unsigned char { White, Grey, Black };
  std::vector<Mark> mark(nodes.size(), Mark::White);
  // (node, next prerequisite to visit)
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < nodes.size(); ++root) {
    if (mark[root] != Mark::White) continue;
    stack.emplace_back(root, 0);
    mark[root] = Mark::Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& prereqs = nodes[node].prerequisites;
      if (next == prereqs.size()) {
        mark[node] = Mark::Black;
        stack.pop_back();
        continue;
      }
      const auto it = index.find(prereqs[next++]);
      if (it == index.end()) continue;
      const std::size_t child = it->second;
      if (mark[child] == Mark::Grey) {
        report.add("cognitive", "CYCLIC_GRAPH",
                   "prerequisite cycle through '" + nodes[child].node_id + "'");
        return;
      }
      if (mark[child] == Mark::White) {
        mark[child] = Mark::Grey;
        stack.emplace_back(child, 0);
      }
    }
  }
}

}  // namespace

std::vector<std::string> tag_tokens(std::string_view tag) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : tag) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || ch == '-' || ch == '_' || ch == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<ParameterPath> ParameterPath::parse(std::string_view text) {
  constexpr std::string_view kAffect = "affective.";
  constexpr std::string_view kCognitive = "cognitive.";
  constexpr std::string_view kMastery = ".mastery";
  if (text == "behavioral.openness_to_feedback") return openness();
  if (text.starts_with(kAffect)) {
    if (auto e = emotion_from_key(text.substr(kAffect.size()))) return affect(*e);
    return std::nullopt;
  }
  if (text.starts_with(kCognitive) && text.ends_with(kMastery) &&
      text.size() > kCognitive.size() + kMastery.size()) {
    const auto id = text.substr(kCognitive.size(), text.size() - kCognitive.size() - kMastery.size());
    return mastery(std::string(id));
  }
  return std::nullopt;
}

std::string ParameterPath::str() const {
  struct Visitor {
    std::string operator()(const Affect& a) const { return "affective." + std::string(key_name(a.emotion)); }
    std::string operator()(const Openness&) const { return "behavioral.openness_to_feedback"; }
    std::string operator()(const Mastery& m) const { return "cognitive." + m.node_id + ".mastery"; }
  };
  return std::visit(Visitor{}, target);
}

const KnowledgeNode* StudentProfile::find_node(std::string_view id) const {
  for (const auto& n : cognitive)
    if (n.node_id == id) return &n;
  return nullptr;
}

bool resolves(const StudentProfile& profile, const ParameterPath& path) {
  if (const auto* m = std::get_if<ParameterPath::Mastery>(&path.target))
    return profile.find_node(m->node_id) != nullptr;
  return true;
}

Fixed4 baseline_parameter(const StudentProfile& profile, const ParameterPath& path) {
  if (const auto* a = std::get_if<ParameterPath::Affect>(&path.target)) return profile.affective[a->emotion];
  if (std::holds_alternative<ParameterPath::Openness>(path.target))
    return profile.behavioral.openness_to_feedback;
  const auto& m = std::get<ParameterPath::Mastery>(path.target);
  if (const auto* node = profile.find_node(m.node_id)) return node->mastery;
  throw Error(ErrorCode::UnknownPath, path.str() + " does not resolve on '" + profile.student_id + "'");
}

Fixed4 effective_parameter(const StudentProfile& profile, const std::vector<ModifierInstance>& active,
                           const ParameterPath& path) {
  Fixed4 value = baseline_parameter(profile, path);
  for (const auto& inst : active)
    for (const auto& e : inst.current)
      if (e.path == path) value += e.delta;
  return value.clamp01();
}

std::array<Fixed4, kEmotionCount> effective_affect(const StudentProfile& profile,
                                                   const std::vector<ModifierInstance>& active) {
  std::array<Fixed4, kEmotionCount> out = profile.affective.baseline;
  for (const auto& inst : active)
    for (const auto& e : inst.current)
      if (const auto* a = std::get_if<ParameterPath::Affect>(&e.path.target)) out[index_of(a->emotion)] += e.delta;
  for (auto& v : out) v = v.clamp01();
  return out;
}

std::int64_t volatility_units(const StudentProfile& profile) {
  std::int64_t total = 0;
  for (const auto& rule : profile.modifiers)
    for (const auto& e : rule.effects) total += e.delta.abs().units();
  return total + 10 * profile.wildcard_probability.units();
}

double volatility_score(const StudentProfile& profile) {
  return static_cast<double>(volatility_units(profile)) / static_cast<double>(Fixed4::kScale);
}

ValidationReport validate_profile(const StudentProfile& p) {
  ValidationReport report;
  if (p.student_id.empty()) report.add("student_id", "MISSING_FIELD", "student_id must be non-empty");
  if (p.wildcard_probability < Fixed4::zero() || p.wildcard_probability > kMaxWildcard)
    report.add("wildcard_probability", "OUT_OF_RANGE",
               "wildcard_probability " + to_string(p.wildcard_probability) + " outside [0, 0.1]");

  std::set<std::string_view> node_ids;
  for (const auto& n : p.cognitive) {
    if (n.node_id.empty()) report.add("cognitive.node.node_id", "MISSING_FIELD", "node_id must be non-empty");
    if (!node_ids.insert(n.node_id).second)
      report.add("cognitive.node.node_id", "DUPLICATE_NODE", "duplicate node '" + n.node_id + "'");
    if (!in_unit(n.mastery))
      report.add("cognitive.node.mastery", "OUT_OF_RANGE",
                 "node '" + n.node_id + "' mastery " + to_string(n.mastery) + " outside [0, 1]");
    check_tags(report, "cognitive.node.topic_tags", n.topic_tags, true);
  }
  for (const auto& n : p.cognitive)
    for (const auto& pre : n.prerequisites)
      if (!node_ids.contains(pre))
        report.add("cognitive.node.prerequisites", "UNKNOWN_PREREQUISITE",
                   "node '" + n.node_id + "' requires unknown node '" + pre + "'");
  check_acyclic(report, p.cognitive);

  for (const auto e : kAllEmotions)
    if (!in_unit(p.affective[e]))
      report.add("affective." + std::string(key_name(e)), "OUT_OF_RANGE", "intensity outside [0, 1]");

  const auto& b = p.behavioral;
  if (!in_unit(b.openness_to_feedback))
    report.add("behavioral.openness_to_feedback", "OUT_OF_RANGE", "openness outside [0, 1]");
  check_tags(report, "behavioral.interests", b.interests, false);
  std::set<std::string_view> peers;
  for (const auto& link : b.social_links) {
    if (link.peer == p.student_id) report.add("behavioral.social_links", "SELF_LINK", "student links to itself");
    if (!peers.insert(link.peer).second)
      report.add("behavioral.social_links", "DUPLICATE_LINK", "duplicate link to '" + link.peer + "'");
    if (link.affinity < -Fixed4::one() || link.affinity > Fixed4::one())
      report.add("behavioral.social_links.affinity", "OUT_OF_RANGE",
                 "affinity to '" + link.peer + "' outside [-1, 1]");
  }

  std::set<std::string_view> rule_ids;
  for (const auto& r : p.modifiers) {
    if (r.rule_id.empty()) report.add("modifiers.rule_id", "MISSING_FIELD", "rule_id must be non-empty");
    if (!rule_ids.insert(r.rule_id).second)
      report.add("modifiers.rule_id", "DUPLICATE_RULE", "duplicate rule '" + r.rule_id + "'");
    if (r.ttl_turns < 1) report.add("modifiers.ttl_turns", "INVALID_TTL", "rule '" + r.rule_id + "' ttl < 1");
    if (r.trigger.near && r.trigger.kind != TeacherEventKind::Proximity)
      report.add("modifiers.trigger", "INVALID_TRIGGER", "'near' only applies to proximity triggers");
    if (r.effects.empty()) report.add("modifiers.effects", "EMPTY_EFFECTS", "rule '" + r.rule_id + "' has no effects");
    for (const auto& e : r.effects) {
      if (e.delta.abs() > Fixed4::one())
        report.add("modifiers.effects.delta", "OUT_OF_RANGE", "rule '" + r.rule_id + "' |delta| > 1");
      if (!resolves(p, e.path))
        report.add("modifiers.effects.path", "UNKNOWN_PATH", "rule '" + r.rule_id + "' path " + e.path.str());
    }
  }
  return report;
}

}  // namespace slotsim
