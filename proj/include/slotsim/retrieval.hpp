#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "slotsim/profile.hpp"

namespace slotsim {

inline constexpr int kRosterSchemaVersion = 1;
inline constexpr std::string_view kFallbackTag = "general";

struct Roster {
  std::string roster_id;
  int schema_version = kRosterSchemaVersion;
  std::vector<StudentProfile> students;

  [[nodiscard]] const StudentProfile* find(std::string_view id) const;

  friend bool operator==(const Roster&, const Roster&) = default;
};

struct RetrievalHit {
  NodeId node_id;
  double score = 0.0;
  std::vector<std::string> matched_tags;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

// Query tags, pre-tokenized once per spin.
class QueryTags {
public:
  explicit QueryTags(const std::vector<std::string>& tags);

  [[nodiscard]] bool empty() const { return tags_.empty(); }
  [[nodiscard]] bool contains_tag(std::string_view tag) const;
  [[nodiscard]] bool contains_token(std::string_view token) const;
  [[nodiscard]] const std::vector<std::string>& tags() const { return tags_; }

private:
  std::vector<std::string> tags_;    // sorted, unique
  std::vector<std::string> tokens_;  // sorted, unique
};

// Relevance of one knowledge node to a query. Kept behind an interface so a
// vector-similarity scorer can stand in for the lexical one.
class NodeScorer {
public:
  virtual ~NodeScorer() = default;
  virtual double score(const KnowledgeNode& node, const QueryTags& query,
                       std::vector<std::string>* matched) const = 0;
};

// |node tags ∩ query tags| + 0.5 per remaining node tag sharing a token with the query.
class LexicalScorer final : public NodeScorer {
public:
  double score(const KnowledgeNode& node, const QueryTags& query,
               std::vector<std::string>* matched) const override;
};

const NodeScorer& default_scorer();

// Top-k positively scored nodes ordered by (score desc, node_id asc). When
// nothing scores, returns the "general" fallback node with score 0.
// Throws NO_FALLBACK when nothing scores and no fallback exists.
std::vector<RetrievalHit> query_nodes(const StudentProfile& profile, const std::vector<std::string>& ctx_tags,
                                      int k, const NodeScorer& scorer = default_scorer());
std::vector<RetrievalHit> query_nodes(const StudentProfile& profile, const QueryTags& query, int k,
                                      const NodeScorer& scorer = default_scorer());

ValidationReport validate_roster(const Roster& roster);

// Throws IO, SCHEMA_MISMATCH, or VALIDATION (with the report attached).
Roster load_roster(const std::filesystem::path& path);
Roster roster_from_text(std::string_view json_text);
std::string roster_to_text(const Roster& roster);
void save_roster(const Roster& roster, const std::filesystem::path& path);

}  // namespace slotsim
