// SPDX-License-Identifier: Apache-2.0
#include "facetlens/kera.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "facetlens/error.hpp"

namespace facetlens::kera {

using textproc::Pos;
using textproc::Token;

namespace {

double llrTerm(double n, double m) { return n > 0.0 ? n * std::log(n / m) : 0.0; }

}  // namespace

double llrScore(const ContingencyTable& t) {
  const auto total = t.total();
  if (total == 0) throw Error("empty table");
  const double N = static_cast<double>(total);
  const double r1 = static_cast<double>(t.n11 + t.n12);
  const double r2 = static_cast<double>(t.n21 + t.n22);
  const double c1 = static_cast<double>(t.n11 + t.n21);
  const double c2 = static_cast<double>(t.n12 + t.n22);
  const double sum = llrTerm(static_cast<double>(t.n11), r1 * c1 / N) +
                     llrTerm(static_cast<double>(t.n12), r1 * c2 / N) +
                     llrTerm(static_cast<double>(t.n21), r2 * c1 / N) +
                     llrTerm(static_cast<double>(t.n22), r2 * c2 / N);
  // the exact value is >= 0; rounding can leave a tiny negative residue
  return std::max(0.0, 2.0 * sum);
}

double pmiScore(const ContingencyTable& t) {
  if (t.n11 == 0) throw Error("unobserved pair");
  const double N = static_cast<double>(t.total());
  const double r1 = static_cast<double>(t.n11 + t.n12);
  const double c1 = static_cast<double>(t.n11 + t.n21);
  return std::log(static_cast<double>(t.n11) * N / (r1 * c1));
}

namespace {

bool collocationMember(const Token& t) { return t.pos != Pos::Stopword && t.pos != Pos::Number; }

std::string pairKey(const std::string& a, const std::string& b) { return a + " " + b; }

}  // namespace

CollocationMap extractCollocations(std::span<const Token> tokens, CollocationMethod method,
                                   std::size_t min_count) {
  if (min_count == 0) throw Error("min_count must be >= 1");
  CollocationMap out;
  if (tokens.size() < 2) return out;

  std::unordered_map<std::string, std::uint64_t> first_counts;
  std::unordered_map<std::string, std::uint64_t> second_counts;
  struct PairStats {
    std::uint64_t all = 0;        // every occurrence, the n11 cell
    std::uint64_t candidate = 0;  // occurrences with both members eligible
    std::size_t first_index = 0;
    const Token* first = nullptr;
    const Token* second = nullptr;
  };
  std::unordered_map<std::string, PairStats> pairs;
  std::uint64_t population = 0;

  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const Token& a = tokens[i];
    const Token& b = tokens[i + 1];
    if (a.sentence_id != b.sentence_id) continue;
    ++population;
    ++first_counts[a.norm];
    ++second_counts[b.norm];
    auto [it, inserted] = pairs.try_emplace(pairKey(a.norm, b.norm));
    auto& ps = it->second;
    ++ps.all;
    if (collocationMember(a) && collocationMember(b)) {
      if (ps.candidate == 0) {
        ps.first_index = a.index;
        ps.first = &a;
        ps.second = &b;
      }
      ++ps.candidate;
    }
  }

  for (auto& [key, ps] : pairs) {
    if (ps.candidate < min_count) continue;
    ContingencyTable table;
    table.n11 = ps.all;
    table.n12 = first_counts[ps.first->norm] - ps.all;
    table.n21 = second_counts[ps.second->norm] - ps.all;
    table.n22 = population - table.n11 - table.n12 - table.n21;
    Collocation c;
    c.first = ps.first->norm;
    c.second = ps.second->norm;
    c.count = ps.candidate;
    c.first_index = ps.first_index;
    c.table = table;
    c.score = method == CollocationMethod::Llr ? llrScore(table) : pmiScore(table);
    out.emplace(key, std::move(c));
  }
  return out;
}

CandidateSets generateCandidateSets(std::span<const Token> tokens, const KeraOptions& options) {
  CandidateSets sets;
  sets.collocations = extractCollocations(tokens, options.method, options.min_count);
  sets.noun_phrases = textproc::extractNounPhrases(tokens);
  sets.proper_unigrams = textproc::extractProperNounUnigrams(tokens, false);
  return sets;
}

namespace {

bool rankOrder(const KeywordCandidate& a, const KeywordCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.phrase.first_index != b.phrase.first_index) {
    return a.phrase.first_index < b.phrase.first_index;
  }
  return a.text() < b.text();
}

}  // namespace

std::vector<KeywordCandidate> rankCandidates(std::span<const Token> tokens,
                                             const CandidateSets& sets,
                                             const KeraOptions& options) {
  std::vector<KeywordCandidate> candidates;
  if (tokens.empty()) return candidates;

  // (collocations ∩ noun phrases) ∪ proper-noun unigrams
  std::vector<const Collocation*> bigram_sources;
  for (const auto& [key, np] : sets.noun_phrases) {
    const auto it = sets.collocations.find(key);
    if (it == sets.collocations.end()) continue;
    KeywordCandidate c;
    c.phrase = np;
    c.phrase.first_index = std::min(np.first_index, it->second.first_index);
    c.kind = CandidateKind::Bigram;
    candidates.push_back(std::move(c));
    bigram_sources.push_back(&it->second);
  }
  const std::size_t bigram_count = candidates.size();
  for (const auto& [key, phrase] : sets.proper_unigrams) {
    KeywordCandidate c;
    c.phrase = phrase;
    c.kind = CandidateKind::ProperUnigram;
    candidates.push_back(std::move(c));
  }
  if (candidates.empty()) return candidates;

  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& t : tokens) ++tf[t.norm];

  std::size_t max_tf = 0;
  for (const auto& c : candidates) {
    for (const auto& w : c.phrase.words) max_tf = std::max(max_tf, tf[w]);
  }
  double max_score = 0.0;
  std::size_t max_count = 0;
  for (const Collocation* src : bigram_sources) {
    max_score = std::max(max_score, src->score);
    max_count = std::max(max_count, src->count);
  }

  const double word_count = static_cast<double>(tokens.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    if (i < bigram_count) {
      const Collocation& src = *bigram_sources[i];
      if (options.alpha_always_frequency) {
        c.alpha = max_count > 0 ? static_cast<double>(src.count) / static_cast<double>(max_count)
                                : 0.0;
      } else {
        c.alpha = max_score > 0.0 ? std::max(0.0, src.score) / max_score : 0.0;
      }
    } else {
      c.alpha = max_tf > 0 ? static_cast<double>(tf[c.phrase.words.front()]) /
                                 static_cast<double>(max_tf)
                           : 0.0;
    }
    c.beta = 1.0 - static_cast<double>(c.phrase.first_index) / word_count;
    c.score = harmonicMean(c.alpha, c.beta);
  }

  // optional domain-specific pruning
  std::set<std::string> bigram_words;
  for (std::size_t i = 0; i < bigram_count; ++i) {
    for (const auto& w : candidates[i].phrase.words) bigram_words.insert(w);
  }
  const auto uppercase = options.prune_uppercase_unigrams
                             ? textproc::extractProperNounUnigrams(tokens, true)
                             : textproc::PhraseMap{};
  std::erase_if(candidates, [&](const KeywordCandidate& c) {
    if (c.kind != CandidateKind::ProperUnigram) return false;
    const std::string& w = c.phrase.words.front();
    if (options.prune_uppercase_unigrams && !uppercase.contains(w)) return true;
    if (options.discard_unigrams_in_bigrams && bigram_words.contains(w)) return true;
    if (options.drop_late_unigrams &&
        static_cast<double>(c.phrase.first_index) / word_count > options.late_unigram_cutoff) {
      return true;
    }
    return false;
  });

  std::sort(candidates.begin(), candidates.end(), rankOrder);
  return candidates;
}

std::vector<KeywordCandidate> extractKeywords(std::span<const Token> tokens,
                                              const KeraOptions& options) {
  if (options.k == 0) throw Error("K must be >= 1");
  auto ranked = rankCandidates(tokens, generateCandidateSets(tokens, options), options);
  if (ranked.size() > options.k) ranked.resize(options.k);
  return ranked;
}

std::vector<KeywordCandidate> extractKeywords(std::string_view text, const KeraOptions& options) {
  const auto tokens = textproc::analyze(text);
  return extractKeywords(std::span<const Token>(tokens), options);
}

std::vector<TagCount> buildTagCloud(
    std::span<const std::pair<std::string, std::vector<std::string>>> doc_keywords) {
  std::map<std::string, std::set<std::string>> docs_by_tag;
  for (const auto& [doc_id, tags] : doc_keywords) {
    for (const auto& tag : tags) docs_by_tag[tag].insert(doc_id);
  }
  std::vector<TagCount> cloud;
  cloud.reserve(docs_by_tag.size());
  for (const auto& [tag, docs] : docs_by_tag) cloud.push_back({tag, docs.size()});
  std::stable_sort(cloud.begin(), cloud.end(),
                   [](const TagCount& a, const TagCount& b) { return a.count > b.count; });
  return cloud;
}

}  // namespace facetlens::kera
