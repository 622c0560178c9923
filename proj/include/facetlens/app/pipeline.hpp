// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "facetlens/facetindex.hpp"
#include "facetlens/ingest.hpp"
#include "facetlens/kera.hpp"
#include "facetlens/mentions.hpp"
#include "facetlens/supervised.hpp"

namespace facetlens::app {

struct TopicsConfig {
  std::optional<std::size_t> k;  ///< unset: topics::chooseK
  std::size_t iterations = 200;
  std::uint64_t seed = 1;
  double threshold = 0.3;
  std::size_t tags_per_topic = 10;
  std::size_t cluster_tags = 10;
};

struct TrainConfig {
  supervised::ActiveLearningOptions active_learning;
  std::size_t discriminative_terms = 25;
};

struct PipelineConfig {
  std::filesystem::path store = ".facetlens";
  ingest::IngestConfig ingest;
  kera::KeraOptions kera;
  TopicsConfig topics;
  TrainConfig train;
  std::vector<std::filesystem::path> manifests;
  std::vector<std::filesystem::path> mention_specs;
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;

  /// Keys: store, host, port, the ingest keys (root, include_hidden,
  /// extensions, workers), kera.*, topics.*, train.*, manifests and
  /// mention_specs (comma separated). Relative paths in a file resolve
  /// against the file's directory. Throws facetlens::Error on unknown keys
  /// and invalid values.
  static PipelineConfig fromFile(const std::filesystem::path& path);
  static PipelineConfig fromKeyValues(const std::map<std::string, std::string>& kv,
                                      const std::filesystem::path& base_dir = {});

  /// Throws facetlens::Error unless threshold is in (0,1) and K values are in range.
  void validate() const;
};

/// Stage artifacts under one directory. Each accessor names the file a
/// stage writes; require() throws MissingStageError when it is absent.
class Store {
 public:
  explicit Store(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path documents() const { return root_ / "documents.jsonl"; }
  std::filesystem::path keywords() const { return root_ / "keywords.tsv"; }
  std::filesystem::path ldaModel() const { return root_ / "lda_model.txt"; }
  std::filesystem::path topics() const { return root_ / "topics.tsv"; }
  std::filesystem::path topicAssignments() const { return root_ / "topic_assignments.tsv"; }
  std::filesystem::path modelsDir() const { return root_ / "models"; }
  std::filesystem::path classifications() const { return root_ / "classifications.tsv"; }
  std::filesystem::path mentionSpec() const { return root_ / "mention_spec.tsv"; }
  std::filesystem::path mentions() const { return root_ / "mentions.tsv"; }
  std::filesystem::path index() const { return root_ / "index.json"; }

  void require(const std::filesystem::path& artifact, const std::string& stage) const;

 private:
  std::filesystem::path root_;
};

// --- stage artifacts ----------------------------------------------------------

std::vector<ingest::Document> loadDocuments(const Store& store);
void saveDocuments(const Store& store, const std::vector<ingest::Document>& docs);

/// doc_id -> keywords in rank order
using KeywordTable = std::map<std::string, std::vector<std::string>>;
KeywordTable loadKeywords(const Store& store);

/// doc_id -> facet -> values
using TagTable = std::map<std::string, facetindex::FacetTags>;

/// doc_id -> topic cluster labels
TagTable loadTopicTags(const Store& store);
/// doc_id -> technology / report_type values
TagTable loadClassifications(const Store& store);
/// doc_id -> category -> match count
using MentionCounts = std::map<std::string, std::map<std::string, std::size_t>>;
MentionCounts loadMentions(const Store& store);

// --- stages -------------------------------------------------------------------

struct StageReport {
  std::vector<std::string> lines;  ///< human-readable summary
  std::vector<std::string> warnings;
};

StageReport runIngest(const PipelineConfig& config);
StageReport runExtract(const PipelineConfig& config);
StageReport runTopics(const PipelineConfig& config);
/// Manifest labels: a technology name, `report:<TYPE>`, or `negative`.
/// Documents are named by id, absolute path or trailing path components.
StageReport runTrain(const PipelineConfig& config, const std::vector<std::filesystem::path>& manifests);
StageReport runMentions(const PipelineConfig& config,
                        const std::vector<std::filesystem::path>& spec_files);
StageReport runIndex(const PipelineConfig& config);

/// Builds the facet index from whatever stage artifacts exist; documents are required.
facetindex::FacetIndex buildIndex(const Store& store);

/// Re-tags every document's mentions facet from `counts` (absent: no mentions).
facetindex::FacetIndex retagMentions(const facetindex::FacetIndex& index, const MentionCounts& counts);

/// doc_id -> category -> count; documents without hits are absent.
MentionCounts scanAll(std::span<const ingest::Document* const> docs, const mentions::MentionSpec& spec);

/// One `category<TAB>kind<TAB>pattern` line per entry; gazetteer entries are
/// written as terms so the result no longer depends on dictionary files.
std::string formatMentionSpec(const mentions::MentionSpec& spec);

void saveMentions(const Store& store, const MentionCounts& counts);

// --- queries ------------------------------------------------------------------

/// Parses "terms facet:value facet:\"two words\" from:DATE to:DATE".
/// A day-form `to` bound covers the whole day. Throws facetlens::Error on
/// unknown facets, bad dates and unbalanced quotes.
facetindex::FacetQuery parseQueryExpression(std::string_view expr);

/// Lower bound from "YYYY-MM-DD" or a full timestamp.
Timestamp parseFromBound(std::string_view s);
/// Upper bound; "YYYY-MM-DD" means the end of that day.
Timestamp parseToBound(std::string_view s);

inline constexpr std::size_t kDefaultPageSize = 20;
inline constexpr std::size_t kMaxPageSize = 200;
inline constexpr std::size_t kMaxFacetValues = 50;

struct Page {
  std::size_t number = 1;  ///< 1-based
  std::size_t size = kDefaultPageSize;
};

/// Parses optional page / page_size strings; sizes above the maximum are
/// clamped. Throws facetlens::Error for non-numeric or zero values.
Page parsePage(const std::optional<std::string>& page, const std::optional<std::string>& page_size);

/// {"total","docs":[{"id","path","format","snippet"}],"facets":{facet:[{"value","count"}]}}
/// Facet values sorted by count desc then value, at most 50 per facet.
nlohmann::json searchResponse(const facetindex::FacetIndex& index, const facetindex::FacetQuery& query,
                              const Page& page = {});

/// Full text, metadata, tags per facet, and a quick view marking `hl_terms`
/// as query terms and the document's keywords as keywords. Throws
/// facetlens::Error for unknown ids.
nlohmann::json documentResponse(const facetindex::FacetIndex& index, std::string_view doc_id,
                                const std::vector<std::string>& hl_terms);

/// Compact serialization shared by the CLI and the HTTP service.
std::string dumpJson(const nlohmann::json& j);

/// First ~200 bytes of `text` cut at a word boundary, with "..." when truncated.
std::string snippet(std::string_view text);

}  // namespace facetlens::app
