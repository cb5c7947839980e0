#include "slotsim/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "slotsim/json_io.hpp"

namespace slotsim {
namespace {

bool has_separator(std::string_view tag) {
  return tag.find_first_of(" \t-_/") != std::string_view::npos;
}

bool better(const RetrievalHit& a, const RetrievalHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.node_id < b.node_id;
}

}  // namespace

const StudentProfile* Roster::find(std::string_view id) const {
  for (const auto& s : students)
    if (s.student_id == id) return &s;
  return nullptr;
}

QueryTags::QueryTags(const std::vector<std::string>& tags) : tags_(tags) {
  std::sort(tags_.begin(), tags_.end());
  tags_.erase(std::unique(tags_.begin(), tags_.end()), tags_.end());
  for (const auto& t : tags_)
    for (auto& tok : tag_tokens(t)) tokens_.push_back(std::move(tok));
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

bool QueryTags::contains_tag(std::string_view tag) const {
  return std::binary_search(tags_.begin(), tags_.end(), tag, std::less<>{});
}

bool QueryTags::contains_token(std::string_view token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token, std::less<>{});
}

double LexicalScorer::score(const KnowledgeNode& node, const QueryTags& query,
                            std::vector<std::string>* matched) const {
  int exact = 0;
  int partial = 0;
  for (const auto& tag : node.topic_tags) {
    bool hit = false;
    if (query.contains_tag(tag)) {
      ++exact;
      hit = true;
    } else if (!has_separator(tag)) {
      hit = query.contains_token(tag);
      partial += hit ? 1 : 0;
    } else {
      for (const auto& tok : tag_tokens(tag)) {
        if (query.contains_token(tok)) {
          hit = true;
          break;
        }
      }
      partial += hit ? 1 : 0;
    }
    if (hit && matched) matched->push_back(tag);
  }
  return exact + 0.5 * partial;
}

const NodeScorer& default_scorer() {
  static const LexicalScorer scorer;
  return scorer;
}

std::vector<RetrievalHit> query_nodes(const StudentProfile& profile, const std::vector<std::string>& ctx_tags, int k,
                                      const NodeScorer& scorer) {
  return query_nodes(profile, QueryTags(ctx_tags), k, scorer);
}

std::vector<RetrievalHit> query_nodes(const StudentProfile& profile, const QueryTags& query, int k,
                                      const NodeScorer& scorer) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  std::vector<RetrievalHit> hits;
  if (!query.empty()) {
    std::vector<std::string> matched;
    for (const auto& node : profile.cognitive) {
      matched.clear();
      const double s = scorer.score(node, query, &matched);
      if (s <= 0.0) continue;
      RetrievalHit hit{node.node_id, s, matched};
      if (hits.size() < static_cast<std::size_t>(k)) {
        hits.push_back(std::move(hit));
        std::push_heap(hits.begin(), hits.end(), better);
      } else if (better(hit, hits.front())) {
        std::pop_heap(hits.begin(), hits.end(), better);
        hits.back() = std::move(hit);
        std::push_heap(hits.begin(), hits.end(), better);
      }
    }
  }
  if (!hits.empty()) {
    std::sort_heap(hits.begin(), hits.end(), better);
    return hits;
  }

  const KnowledgeNode* fallback = nullptr;
  for (const auto& node : profile.cognitive) {
    const bool general = std::find(node.topic_tags.begin(), node.topic_tags.end(), kFallbackTag) != node.topic_tags.end();
    if (general && (!fallback || node.node_id < fallback->node_id)) fallback = &node;
  }
  if (!fallback)
    throw Error(ErrorCode::NoFallback, "no node matches the context and '" + profile.student_id +
                                           "' has no node tagged 'general'");
  return {RetrievalHit{fallback->node_id, 0.0, {}}};
}

ValidationReport validate_roster(const Roster& roster) {
  ValidationReport report;
  if (roster.schema_version != kRosterSchemaVersion)
    report.add("schema_version", "SCHEMA_VERSION", "unsupported schema_version");
  std::set<std::string_view> ids;
  for (const auto& s : roster.students)
    if (!ids.insert(s.student_id).second)
      report.add("students", "DUPLICATE_ID", "duplicate student_id '" + s.student_id + "'");
  for (const auto& s : roster.students) {
    const std::string prefix = "students[" + s.student_id + "].";
    for (auto& issue : validate_profile(s).issues) report.add(prefix + issue.path, issue.code, issue.message);
    for (const auto& link : s.behavioral.social_links)
      if (link.peer != s.student_id && !ids.contains(link.peer))
        report.add(prefix + "behavioral.social_links", "UNKNOWN_PEER", "link to unknown student '" + link.peer + "'");
  }
  return report;
}

Roster roster_from_text(std::string_view json_text) {
  json_io::json j;
  try {
    j = json_io::json::parse(json_text);
  } catch (const json_io::json::exception& ex) {
    throw Error(ErrorCode::SchemaMismatch, std::string("roster is not valid JSON: ") + ex.what());
  }
  Roster roster;
  try {
    roster = json_io::roster_from_json(j);
  } catch (const json_io::json::exception& ex) {
    throw Error(ErrorCode::SchemaMismatch, std::string("roster: ") + ex.what());
  }
  auto report = validate_roster(roster);
  if (!report.ok) {
    const auto summary = report.issues.front().path + " " + report.issues.front().code + " (" +
                         std::to_string(report.issues.size()) + " issue(s))";
    throw Error(ErrorCode::Validation, summary, std::move(report));
  }
  return roster;
}

Roster load_roster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open roster '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read roster '" + path.string() + "'");
  return roster_from_text(buf.str());
}

std::string roster_to_text(const Roster& roster) { return json_io::roster_to_json(roster).dump(2) + "\n"; }

void save_roster(const Roster& roster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write roster '" + path.string() + "'");
  out << roster_to_text(roster);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace slotsim
