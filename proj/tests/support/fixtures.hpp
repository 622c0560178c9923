// SPDX-License-Identifier: Apache-2.0
#pragma once

// Synthetic corpora shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "facetlens/facetindex.hpp"
#include "facetlens/ingest.hpp"
#include "facetlens/supervised.hpp"
#include "facetlens/topics.hpp"

namespace facetlens::fixtures {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void writeFile(const std::filesystem::path& path, std::string_view content);

// --- topics ---------------------------------------------------------------------

struct TopicCorpus {
  topics::LdaCorpus corpus;
  std::vector<std::size_t> labels;  ///< generating topic per document
};

/// `topics` disjoint vocabularies of `vocab_per_topic` words; every document
/// draws `doc_len` tokens uniformly from one topic (document d uses topic d % topics).
TopicCorpus makeTopicCorpus(std::uint64_t seed, std::size_t topics = 2, std::size_t docs = 100,
                            std::size_t doc_len = 50, std::size_t vocab_per_topic = 20);

/// Fraction of documents whose assignment is exactly {their generating
/// topic}, with learned topics matched to generating topics by majority vote.
double topicRecovery(const topics::TopicModelState& state, const std::vector<std::size_t>& labels,
                     double threshold);

// --- classifier -------------------------------------------------------------------

struct ClassifierCorpus {
  supervised::FeatureSpace space;
  supervised::FeatureTable features;
  supervised::PresenceIndex presence;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

/// Two classes with 50-word vocabularies sharing `overlap` of their words;
/// each document holds `words_per_doc` distinct words of its class.
ClassifierCorpus makeClassifierCorpus(std::uint64_t seed, std::size_t docs = 200,
                                      double overlap = 0.1, std::size_t words_per_doc = 15);

// --- facet search ------------------------------------------------------------------

struct FacetCorpus {
  std::vector<ingest::Document> docs;
  std::vector<facetindex::FacetTags> tags;  ///< extra tags per document
};

/// Random documents over a small vocabulary with random values in every
/// facet and dates spread over 2013.
FacetCorpus makeFacetCorpus(std::uint64_t seed, std::size_t docs);

facetindex::FacetQuery randomQuery(std::mt19937_64& rng, const FacetCorpus& corpus);

/// Linear-scan evaluation of `query` over indexed documents.
facetindex::FacetResult bruteForceSearch(const std::vector<const facetindex::IndexedDocument*>& docs,
                                         const facetindex::FacetQuery& query);

// --- end to end ---------------------------------------------------------------------

struct E2EFixture {
  std::size_t files = 0;
  std::set<std::string> ssn_files;  ///< paths relative to the root
};

/// Writes `files` distinct text/markdown/html documents in nested folders,
/// planting social security numbers in every fifth one.
E2EFixture writeE2ECorpus(const std::filesystem::path& root, std::size_t files, std::uint64_t seed);

}  // namespace facetlens::fixtures
