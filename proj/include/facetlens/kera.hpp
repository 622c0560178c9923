// SPDX-License-Identifier: Apache-2.0
#pragma once

// KERA keyword extraction: collocated bigrams filtered to noun phrases, plus
// proper-noun unigrams, ranked by the harmonic mean of a strength score
// (alpha) and a position score (beta).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facetlens/textproc.hpp"

namespace facetlens::kera {

/// 2x2 bigram-slot counts for a word pair (w1, w2):
/// n11 = w1 w2, n12 = w1 followed by not-w2, n21 = not-w1 followed by w2,
/// n22 = neither.
struct ContingencyTable {
  std::uint64_t n11 = 0;
  std::uint64_t n12 = 0;
  std::uint64_t n21 = 0;
  std::uint64_t n22 = 0;

  std::uint64_t total() const { return n11 + n12 + n21 + n22; }
};

/// Log-likelihood ratio 2 * sum n_ij ln(n_ij / m_ij) with m_ij from the
/// margins; 0 * ln(0) is 0. Throws facetlens::Error for an all-zero table.
double llrScore(const ContingencyTable& t);

/// ln(P(w1 w2) / (P(w1 _) P(_ w2))). Throws facetlens::Error when n11 == 0.
double pmiScore(const ContingencyTable& t);

enum class CollocationMethod { Llr, Pmi };

struct Collocation {
  std::string first;
  std::string second;
  double score = 0.0;
  std::size_t count = 0;
  std::size_t first_index = 0;  ///< position of `first` at the earliest occurrence
  ContingencyTable table;
};

/// Collocations keyed by "first second".
using CollocationMap = std::map<std::string, Collocation>;

/// Adjacent within-sentence pairs whose members are neither STOPWORD nor
/// NUMBER, seen at least `min_count` times, scored against the population of
/// all adjacent within-sentence token pairs.
CollocationMap extractCollocations(std::span<const textproc::Token> tokens,
                                   CollocationMethod method, std::size_t min_count = 2);

enum class CandidateKind { Bigram, ProperUnigram };

struct KeywordCandidate {
  textproc::Phrase phrase;
  CandidateKind kind = CandidateKind::Bigram;
  double alpha = 0.0;
  double beta = 0.0;
  double score = 0.0;

  std::string text() const { return phrase.text(); }
};

struct KeraOptions {
  std::size_t k = 10;
  CollocationMethod method = CollocationMethod::Llr;
  std::size_t min_count = 2;
  /// Keep only proper-noun unigrams written in capitals.
  bool prune_uppercase_unigrams = false;
  /// Drop unigrams that also occur inside a selected bigram.
  bool discard_unigrams_in_bigrams = false;
  /// Drop unigrams first seen after `late_unigram_cutoff` of the document.
  bool drop_late_unigrams = false;
  double late_unigram_cutoff = 0.5;
  /// Use normalized frequency as alpha for bigrams too.
  bool alpha_always_frequency = false;
};

/// The three candidate sources before set algebra.
struct CandidateSets {
  CollocationMap collocations;
  textproc::PhraseMap noun_phrases;
  textproc::PhraseMap proper_unigrams;
};

CandidateSets generateCandidateSets(std::span<const textproc::Token> tokens,
                                    const KeraOptions& options);

/// (collocations ∩ noun_phrases) ∪ proper_unigrams, scored, pruned per the
/// option flags, and sorted by score desc, first_index asc, text asc.
/// Not truncated.
std::vector<KeywordCandidate> rankCandidates(std::span<const textproc::Token> tokens,
                                             const CandidateSets& sets,
                                             const KeraOptions& options);

/// Top `options.k` keywords for one tagged document.
std::vector<KeywordCandidate> extractKeywords(std::span<const textproc::Token> tokens,
                                              const KeraOptions& options = {});

/// Convenience: analyze `text` with the builtin lexicon, then extract.
std::vector<KeywordCandidate> extractKeywords(std::string_view text,
                                              const KeraOptions& options = {});

inline double harmonicMean(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

struct TagCount {
  std::string tag;
  std::size_t count = 0;
  friend bool operator==(const TagCount&, const TagCount&) = default;
};

/// Number of distinct documents carrying each tag, sorted by count desc then
/// tag asc.
std::vector<TagCount> buildTagCloud(
    std::span<const std::pair<std::string, std::vector<std::string>>> doc_keywords);

}  // namespace facetlens::kera
