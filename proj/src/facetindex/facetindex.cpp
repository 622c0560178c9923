// SPDX-License-Identifier: Apache-2.0
#include "facetlens/facetindex.hpp"

#include <algorithm>
#include <json.hpp>

#include "facetlens/document_json.hpp"
#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"
#include "facetlens/textproc.hpp"

namespace facetlens::facetindex {

namespace {

constexpr std::array<std::pair<Facet, std::string_view>, 9> kFacetNames{{
    {Facet::Keywords, "keywords"},
    {Facet::TopicCluster, "topic_cluster"},
    {Facet::Technology, "technology"},
    {Facet::ReportType, "report_type"},
    {Facet::Mentions, "mentions"},
    {Facet::FileType, "file_type"},
    {Facet::Folder, "folder"},
    {Facet::Author, "author"},
    {Facet::Date, "date"},
}};

}  // namespace

std::string_view facetName(Facet facet) {
  for (const auto& [f, name] : kFacetNames) {
    if (f == facet) return name;
  }
  return "unknown";
}

std::optional<Facet> parseFacet(std::string_view name) {
  for (const auto& [f, n] : kFacetNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

Facet requireFacet(std::string_view name) {
  if (auto f = parseFacet(name)) return *f;
  throw Error("unknown facet: " + std::string(name));
}

std::string_view toString(HighlightClass cls) {
  return cls == HighlightClass::QueryTerm ? "query" : "keyword";
}

FacetTags metadataTags(const ingest::Document& doc) {
  FacetTags tags;
  tags[Facet::FileType].insert(doc.format_tag);
  if (!doc.folder_tags.empty()) tags[Facet::Folder] = doc.folder_tags;
  if (doc.author) tags[Facet::Author].insert(*doc.author);
  tags[Facet::Date].insert(formatDay(doc.last_modified));
  return tags;
}

std::vector<std::string> queryTerms(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : textproc::tokenize(text)) out.push_back(std::move(t.norm));
  return out;
}

void FacetIndex::remove(std::size_t slot) {
  auto& entry = slots_[slot];
  if (!entry) return;
  for (const auto& t : textproc::tokenize(entry->doc.text)) {
    auto it = postings_.find(t.norm);
    if (it == postings_.end()) continue;
    it->second.erase(slot);
    if (it->second.empty()) postings_.erase(it);
  }
  for (const auto& [facet, values] : entry->tags) {
    auto& by_value = facet_postings_[facet];
    for (const auto& v : values) {
      auto it = by_value.find(v);
      if (it == by_value.end()) continue;
      it->second.erase(slot);
      if (it->second.empty()) by_value.erase(it);
    }
  }
  by_id_.erase(entry->doc.doc_id);
  entry.reset();
  free_slots_.push_back(slot);
}

void FacetIndex::indexDocument(const ingest::Document& doc, const FacetTags& tags) {
  if (auto it = by_id_.find(doc.doc_id); it != by_id_.end()) remove(it->second);

  std::size_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = slots_.size();
    slots_.emplace_back();
  }
  IndexedDocument entry{doc, metadataTags(doc)};
  for (const auto& [facet, values] : tags) {
    if (values.empty()) continue;
    entry.tags[facet].insert(values.begin(), values.end());
  }
  for (const auto& t : textproc::tokenize(doc.text)) ++postings_[t.norm][slot];
  for (const auto& [facet, values] : entry.tags) {
    for (const auto& v : values) facet_postings_[facet][v].insert(slot);
  }
  by_id_.emplace(doc.doc_id, slot);
  slots_[slot] = std::move(entry);
}

const IndexedDocument* FacetIndex::find(std::string_view doc_id) const {
  const auto it = by_id_.find(doc_id);
  return it == by_id_.end() ? nullptr : &*slots_[it->second];
}

std::vector<const IndexedDocument*> FacetIndex::documents() const {
  std::vector<const IndexedDocument*> out;
  out.reserve(by_id_.size());
  for (const auto& [id, slot] : by_id_) out.push_back(&*slots_[slot]);
  return out;
}

FacetResult FacetIndex::search(const FacetQuery& query) const {
  // slot -> relevance
  std::vector<std::pair<std::size_t, std::uint64_t>> hits;
  if (query.text_terms.empty()) {
    for (const auto& [id, slot] : by_id_) hits.emplace_back(slot, 0);
  } else {
    std::map<std::size_t, std::uint64_t> acc;
    bool first = true;
    for (const auto& raw : query.text_terms) {
      const std::string term = text::toLowerAscii(raw);
      const auto it = postings_.find(term);
      if (it == postings_.end()) return {};
      if (first) {
        for (const auto& [slot, tf] : it->second) acc.emplace(slot, tf);
        first = false;
        continue;
      }
      std::map<std::size_t, std::uint64_t> next;
      for (const auto& [slot, rel] : acc) {
        if (auto p = it->second.find(slot); p != it->second.end()) next.emplace(slot, rel + p->second);
      }
      acc = std::move(next);
      if (acc.empty()) return {};
    }
    hits.assign(acc.begin(), acc.end());
  }

  for (const auto& [facet, values] : query.filters) {
    if (values.empty()) continue;
    const auto fp = facet_postings_.find(facet);
    std::erase_if(hits, [&](const auto& h) {
      if (fp == facet_postings_.end()) return true;
      for (const auto& v : values) {
        const auto vp = fp->second.find(v);
        if (vp != fp->second.end() && vp->second.contains(h.first)) return false;
      }
      return true;
    });
  }

  if (query.date_range) {
    const auto& range = *query.date_range;
    std::erase_if(hits, [&](const auto& h) {
      const auto ts = slots_[h.first]->doc.last_modified;
      return (range.start && ts < *range.start) || (range.end && ts > *range.end);
    });
  }

  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return slots_[a.first]->doc.doc_id < slots_[b.first]->doc.doc_id;
  });

  FacetResult result;
  result.doc_ids.reserve(hits.size());
  for (const auto& [slot, rel] : hits) {
    const auto& entry = *slots_[slot];
    result.doc_ids.push_back(entry.doc.doc_id);
    for (const auto& [facet, values] : entry.tags) {
      auto& counts = result.facet_counts[facet];
      for (const auto& v : values) ++counts[v];
    }
  }
  return result;
}

QuickView FacetIndex::quickView(std::string_view doc_id,
                                std::span<const HighlightTerm> terms) const {
  const auto* entry = find(doc_id);
  if (entry == nullptr) throw Error("unknown document id: " + std::string(doc_id));
  return renderQuickView(entry->doc.text, terms);
}

namespace {

bool isWordByte(char c) { return text::isAsciiAlnum(c) || static_cast<unsigned char>(c) >= 0x80; }
bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

struct CompiledTerm {
  std::vector<std::string> pieces;
  HighlightClass cls;
};

// End of a whole-word match of `term` at `p`, if any.
std::optional<std::size_t> matchAt(std::string_view lower, std::size_t p, const CompiledTerm& term) {
  std::size_t q = p;
  for (std::size_t i = 0; i < term.pieces.size(); ++i) {
    if (i > 0) {
      if (q >= lower.size() || !isSpace(lower[q])) return std::nullopt;
      while (q < lower.size() && isSpace(lower[q])) ++q;
    }
    if (lower.compare(q, term.pieces[i].size(), term.pieces[i]) != 0) return std::nullopt;
    q += term.pieces[i].size();
  }
  if (isWordByte(term.pieces.back().back()) && q < lower.size() && isWordByte(lower[q])) {
    return std::nullopt;
  }
  return q;
}

}  // namespace

QuickView renderQuickView(std::string_view text, std::span<const HighlightTerm> terms) {
  // dedupe by normalized form; query terms win over keywords
  std::map<std::vector<std::string>, HighlightClass> unique;
  for (const auto& t : terms) {
    std::vector<std::string> pieces;
    for (const auto& w : text::split(text::toLowerAscii(text::trim(t.term)), ' ')) {
      if (!w.empty()) pieces.push_back(w);
    }
    if (pieces.empty()) continue;
    auto [it, inserted] = unique.emplace(std::move(pieces), t.cls);
    if (!inserted && t.cls == HighlightClass::QueryTerm) it->second = HighlightClass::QueryTerm;
  }
  std::vector<CompiledTerm> compiled;
  for (auto& [pieces, cls] : unique) compiled.push_back({pieces, cls});

  QuickView view;
  const std::string lower = text::toLowerAscii(text);
  std::size_t p = 0;
  std::size_t copied = 0;
  while (p < lower.size()) {
    const bool boundary = p == 0 || !isWordByte(lower[p - 1]);
    std::optional<std::size_t> best_end;
    HighlightClass best_cls = HighlightClass::QueryTerm;
    for (const auto& term : compiled) {
      if (isWordByte(term.pieces.front().front()) && !boundary) continue;
      const auto end = matchAt(lower, p, term);
      if (!end) continue;
      if (!best_end || *end > *best_end ||
          (*end == *best_end && term.cls == HighlightClass::QueryTerm)) {
        best_end = end;
        best_cls = term.cls;
      }
    }
    if (!best_end) {
      ++p;
      continue;
    }
    view.marked_text.append(text.substr(copied, p - copied));
    view.marked_text.append(kMarkOpen);
    view.marked_text.append(text.substr(p, *best_end - p));
    view.marked_text.append(kMarkClose);
    view.spans.push_back({p, *best_end, best_cls});
    p = copied = *best_end;
  }
  view.marked_text.append(text.substr(copied));
  return view;
}

// --- snapshot -----------------------------------------------------------------

namespace {

constexpr const char* kSnapshotFormat = "facetlens-index";
constexpr int kSnapshotVersion = 1;

}  // namespace

void FacetIndex::save(const std::filesystem::path& path) const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto* entry : documents()) {
    nlohmann::json j = ingest::toJson(entry->doc);
    nlohmann::json tags = nlohmann::json::object();
    for (const auto& [facet, values] : entry->tags) tags[std::string(facetName(facet))] = values;
    j["tags"] = std::move(tags);
    docs.push_back(std::move(j));
  }
  const nlohmann::json root{
      {"format", kSnapshotFormat}, {"version", kSnapshotVersion}, {"documents", std::move(docs)}};
  text::writeFileAtomic(path.string(), root.dump());
}

FacetIndex FacetIndex::load(const std::filesystem::path& path) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text::readFile(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt index snapshot " + path.string() + ": " + e.what());
  }
  if (root.value("format", "") != kSnapshotFormat) throw Error("not an index snapshot: " + path.string());
  if (root.value("version", 0) != kSnapshotVersion) {
    throw Error("unsupported index snapshot version in " + path.string());
  }
  FacetIndex index;
  try {
    for (const auto& j : root.at("documents")) {
      FacetTags tags;
      for (const auto& [name, values] : j.at("tags").items()) {
        tags[requireFacet(name)] = values.get<std::set<std::string>>();
      }
      index.indexDocument(ingest::documentFromJson(j), tags);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt index snapshot " + path.string() + ": " + e.what());
  }
  return index;
}

}  // namespace facetlens::facetindex
