// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "facetlens/ingest.hpp"
#include "facetlens/timeutil.hpp"

namespace facetlens::facetindex {

enum class Facet {
  Keywords,
  TopicCluster,
  Technology,
  ReportType,
  Mentions,
  FileType,
  Folder,
  Author,
  Date,
};

inline constexpr std::array<Facet, 9> kAllFacets{
    Facet::Keywords, Facet::TopicCluster, Facet::Technology, Facet::ReportType, Facet::Mentions,
    Facet::FileType, Facet::Folder,       Facet::Author,     Facet::Date,
};

std::string_view facetName(Facet facet);
std::optional<Facet> parseFacet(std::string_view name);
/// Like parseFacet but throws facetlens::Error("unknown facet: ...").
Facet requireFacet(std::string_view name);

using FacetTags = std::map<Facet, std::set<std::string>>;

/// file_type, folder, author and date (day bucket) tags derived from metadata.
FacetTags metadataTags(const ingest::Document& doc);

/// Inclusive bounds; either side may be open.
struct DateRange {
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;
};

struct FacetQuery {
  std::vector<std::string> text_terms;                   ///< AND
  std::map<Facet, std::set<std::string>> filters;        ///< AND across, OR within
  std::optional<DateRange> date_range;
};

struct FacetResult {
  std::vector<std::string> doc_ids;  ///< relevance desc, then doc id
  std::map<Facet, std::map<std::string, std::size_t>> facet_counts;

  friend bool operator==(const FacetResult&, const FacetResult&) = default;
};

enum class HighlightClass { QueryTerm, Keyword };
std::string_view toString(HighlightClass cls);

struct HighlightTerm {
  std::string term;
  HighlightClass cls = HighlightClass::QueryTerm;
};

struct HighlightSpan {
  std::size_t begin = 0;  ///< byte offsets into the original text
  std::size_t end = 0;
  HighlightClass cls = HighlightClass::QueryTerm;
};

inline constexpr std::string_view kMarkOpen = "⟦";
inline constexpr std::string_view kMarkClose = "⟧";

struct QuickView {
  std::string marked_text;  ///< text with each span wrapped in ⟦ ⟧
  std::vector<HighlightSpan> spans;
};

/// Case-insensitive whole-word highlighting; at each position the longest
/// matching term wins and matched text is never re-marked. A term listed as
/// both query term and keyword is reported as a query term.
QuickView renderQuickView(std::string_view text, std::span<const HighlightTerm> terms);

struct IndexedDocument {
  ingest::Document doc;
  FacetTags tags;  ///< includes metadata tags
};

/// In-memory inverted index over document text plus per-facet postings.
/// Mutation is single-writer; const member functions are safe to call
/// concurrently once building is finished.
class FacetIndex {
 public:
  /// Adds or replaces `doc`. `tags` are merged with metadataTags(doc).
  void indexDocument(const ingest::Document& doc, const FacetTags& tags = {});

  /// Documents matching every text term, at least one value of each filtered
  /// facet, and the date range; facet counts are taken over that result.
  FacetResult search(const FacetQuery& query) const;

  /// Throws facetlens::Error for unknown doc ids.
  QuickView quickView(std::string_view doc_id, std::span<const HighlightTerm> terms) const;

  const IndexedDocument* find(std::string_view doc_id) const;
  std::size_t size() const { return by_id_.size(); }
  /// Live documents in doc id order.
  std::vector<const IndexedDocument*> documents() const;

  /// Versioned JSON snapshot; see docs/formats.md.
  void save(const std::filesystem::path& path) const;
  static FacetIndex load(const std::filesystem::path& path);

 private:
  void remove(std::size_t slot);

  std::vector<std::optional<IndexedDocument>> slots_;
  std::vector<std::size_t> free_slots_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  // term -> slot -> term frequency
  std::unordered_map<std::string, std::map<std::size_t, std::uint32_t>> postings_;
  std::map<Facet, std::map<std::string, std::set<std::size_t>>> facet_postings_;
};

/// Normalized search words of a free-text query (same tokenizer as indexing).
std::vector<std::string> queryTerms(std::string_view text);

}  // namespace facetlens::facetindex
