// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facetlens/kera.hpp"
#include "facetlens/textproc.hpp"

namespace facetlens::topics {

/// Documents as word-id sequences over a shared vocabulary.
struct LdaCorpus {
  std::vector<std::string> vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<std::uint32_t>> docs;
};

/// Drops STOPWORD/NUMBER tokens and words found in fewer than
/// `min_doc_freq` documents. Documents left empty are omitted.
LdaCorpus buildLdaCorpus(
    std::span<const std::pair<std::string, std::vector<textproc::Token>>> documents,
    std::size_t min_doc_freq = 2);

struct LdaOptions {
  std::size_t num_topics = 10;
  std::size_t iterations = 200;
  std::uint64_t seed = 1;
  std::optional<double> alpha;  ///< defaults to 50 / num_topics
  double beta = 0.01;
};

/// Collapsed Gibbs sampler state. Counts are exact integers kept consistent
/// with `assignments` at all times outside a token update.
class TopicModelState {
 public:
  std::size_t numTopics() const { return num_topics_; }
  std::size_t vocabSize() const { return vocab_.size(); }
  std::size_t numDocs() const { return doc_ids_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<std::string>& docIds() const { return doc_ids_; }
  const std::vector<std::vector<std::uint32_t>>& docs() const { return docs_; }
  const std::vector<std::vector<std::uint32_t>>& assignments() const { return assignments_; }

  std::int32_t docTopic(std::size_t d, std::size_t k) const { return doc_topic_[d * num_topics_ + k]; }
  std::int32_t topicWord(std::size_t k, std::size_t w) const { return word_topic_[w * num_topics_ + k]; }
  std::int32_t topicTotal(std::size_t k) const { return topic_totals_[k]; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t sweeps() const { return sweeps_; }

  /// (n_dk + alpha) / (len(d) + K alpha)
  double proportion(std::size_t d, std::size_t k) const;
  /// n_dk / len(d)
  double rawProportion(std::size_t d, std::size_t k) const;
  /// (n_kw + beta) / (n_k + V beta)
  double wordProbability(std::size_t k, std::size_t w) const;

  /// Throws facetlens::Error naming the first violated count identity.
  void checkInvariants() const;

  /// Versioned line-oriented dump; see docs/formats.md.
  void save(std::ostream& out) const;
  static TopicModelState load(std::istream& in);

  friend bool operator==(const TopicModelState&, const TopicModelState&) = default;

 private:
  friend TopicModelState fitLDA(const LdaCorpus&, const LdaOptions&,
                                const std::function<void(const TopicModelState&, std::size_t)>&);
  void rebuildCounts();

  std::size_t num_topics_ = 0;
  std::vector<std::string> vocab_;
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<std::vector<std::uint32_t>> assignments_;
  std::vector<std::int32_t> doc_topic_;    // D x K
  std::vector<std::int32_t> word_topic_;   // V x K, word-major for the sampling kernel
  std::vector<std::int32_t> topic_totals_;  // K
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::uint64_t seed_ = 0;
  std::size_t sweeps_ = 0;
};

using SweepObserver = std::function<void(const TopicModelState&, std::size_t sweep)>;

/// Fits LDA by collapsed Gibbs sampling. Deterministic for a given corpus,
/// options and kernel variant. `observer` runs after every sweep.
/// Throws facetlens::Error for an empty corpus, empty documents, K < 2,
/// K above the token count, or zero iterations.
TopicModelState fitLDA(const LdaCorpus& corpus, const LdaOptions& options,
                       const SweepObserver& observer = {});

/// doc_id -> topics whose smoothed proportion strictly exceeds `threshold`.
std::map<std::string, std::set<std::size_t>> assignTopics(const TopicModelState& state,
                                                          double threshold = 0.3);

/// The n most probable words of a topic, ties by word id.
std::vector<std::string> topicTags(const TopicModelState& state, std::size_t topic,
                                   std::size_t n = 10);

/// Topics by assigned-document count desc, ties by topic id.
std::vector<std::size_t> rankTopics(const TopicModelState& state,
                                    const std::map<std::string, std::set<std::size_t>>& assignment);

/// KERA keywords per document aggregated into a cluster tag cloud, top `k_tags`.
std::vector<kera::TagCount> labelClusterWithKera(
    std::span<const std::pair<std::string, std::vector<textproc::Token>>> cluster_docs,
    std::size_t k_tags, const kera::KeraOptions& options = {});

/// clamp(ceil(docs / 100) + 4, 5, 50)
std::size_t chooseK(std::size_t num_docs);

}  // namespace facetlens::topics
