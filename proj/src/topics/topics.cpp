// SPDX-License-Identifier: Apache-2.0
#include "facetlens/topics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "facetlens/error.hpp"
#include "facetlens/simd/kernels.hpp"

namespace facetlens::topics {

using textproc::Pos;
using textproc::Token;

LdaCorpus buildLdaCorpus(std::span<const std::pair<std::string, std::vector<Token>>> documents,
                         std::size_t min_doc_freq) {
  auto eligible = [](const Token& t) { return t.pos != Pos::Stopword && t.pos != Pos::Number; };
  std::map<std::string, std::size_t> doc_freq;
  for (const auto& [id, tokens] : documents) {
    std::set<std::string_view> seen;
    for (const auto& t : tokens) {
      if (eligible(t) && seen.insert(t.norm).second) ++doc_freq[t.norm];
    }
  }
  LdaCorpus corpus;
  std::unordered_map<std::string, std::uint32_t> ids;
  for (const auto& [word, df] : doc_freq) {
    if (df < min_doc_freq) continue;
    ids.emplace(word, static_cast<std::uint32_t>(corpus.vocab.size()));
    corpus.vocab.push_back(word);
  }
  for (const auto& [id, tokens] : documents) {
    std::vector<std::uint32_t> words;
    for (const auto& t : tokens) {
      if (!eligible(t)) continue;
      if (auto it = ids.find(t.norm); it != ids.end()) words.push_back(it->second);
    }
    if (words.empty()) continue;
    corpus.doc_ids.push_back(id);
    corpus.docs.push_back(std::move(words));
  }
  return corpus;
}

double TopicModelState::proportion(std::size_t d, std::size_t k) const {
  const double len = static_cast<double>(docs_[d].size());
  return (docTopic(d, k) + alpha_) / (len + static_cast<double>(num_topics_) * alpha_);
}

double TopicModelState::rawProportion(std::size_t d, std::size_t k) const {
  return static_cast<double>(docTopic(d, k)) / static_cast<double>(docs_[d].size());
}

double TopicModelState::wordProbability(std::size_t k, std::size_t w) const {
  return (topicWord(k, w) + beta_) /
         (topicTotal(k) + static_cast<double>(vocab_.size()) * beta_);
}

void TopicModelState::rebuildCounts() {
  const std::size_t K = num_topics_;
  doc_topic_.assign(docs_.size() * K, 0);
  word_topic_.assign(vocab_.size() * K, 0);
  topic_totals_.assign(K, 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto w = docs_[d][i];
      const auto k = assignments_[d][i];
      ++doc_topic_[d * K + k];
      ++word_topic_[w * K + k];
      ++topic_totals_[k];
    }
  }
}

void TopicModelState::checkInvariants() const {
  const std::size_t K = num_topics_;
  std::vector<std::int64_t> totals(K, 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (docTopic(d, k) < 0) throw Error("negative doc-topic count");
      sum += docTopic(d, k);
    }
    if (sum != static_cast<std::int64_t>(docs_[d].size())) {
      throw Error("doc-topic counts of document " + std::to_string(d) + " do not sum to its length");
    }
  }
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    for (std::size_t k = 0; k < K; ++k) {
      if (topicWord(k, w) < 0) throw Error("negative topic-word count");
      totals[k] += topicWord(k, w);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (totals[k] != topicTotal(k)) {
      throw Error("topic-word counts of topic " + std::to_string(k) + " do not sum to its total");
    }
  }
  // counts must also agree with the assignments they summarize
  TopicModelState copy = *this;
  copy.rebuildCounts();
  if (copy.doc_topic_ != doc_topic_ || copy.word_topic_ != word_topic_ ||
      copy.topic_totals_ != topic_totals_) {
    throw Error("counts disagree with token assignments");
  }
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

TopicModelState fitLDA(const LdaCorpus& corpus, const LdaOptions& options,
                       const SweepObserver& observer) {
  const std::size_t K = options.num_topics;
  if (corpus.docs.empty()) throw Error("empty corpus");
  if (K < 2) throw Error("LDA needs at least 2 topics");
  if (options.iterations < 1) throw Error("LDA needs at least 1 iteration");
  if (corpus.doc_ids.size() != corpus.docs.size()) throw Error("doc_ids/docs size mismatch");
  std::size_t total_tokens = 0;
  for (const auto& d : corpus.docs) {
    if (d.empty()) throw Error("empty document in LDA corpus");
    for (auto w : d) {
      if (w >= corpus.vocab.size()) throw Error("word id out of vocabulary range");
    }
    total_tokens += d.size();
  }
  if (K > total_tokens) throw Error("more topics than tokens");

  TopicModelState s;
  s.num_topics_ = K;
  s.vocab_ = corpus.vocab;
  s.doc_ids_ = corpus.doc_ids;
  s.docs_ = corpus.docs;
  s.alpha_ = options.alpha.value_or(50.0 / static_cast<double>(K));
  s.beta_ = options.beta;
  s.seed_ = options.seed;

  std::mt19937_64 rng(options.seed);
  s.assignments_.resize(s.docs_.size());
  for (std::size_t d = 0; d < s.docs_.size(); ++d) {
    s.assignments_[d].resize(s.docs_[d].size());
    for (auto& z : s.assignments_[d]) z = static_cast<std::uint32_t>(rng() % K);
  }
  s.rebuildCounts();

  const double vbeta = static_cast<double>(s.vocab_.size()) * s.beta_;
  std::vector<double> cumulative(K);
  const std::span<const std::int32_t> totals(s.topic_totals_);
  for (std::size_t sweep = 1; sweep <= options.iterations; ++sweep) {
    for (std::size_t d = 0; d < s.docs_.size(); ++d) {
      std::int32_t* doc_row = s.doc_topic_.data() + d * K;
      for (std::size_t i = 0; i < s.docs_[d].size(); ++i) {
        const std::size_t w = s.docs_[d][i];
        std::int32_t* word_row = s.word_topic_.data() + w * K;
        const std::uint32_t old_k = s.assignments_[d][i];
        --doc_row[old_k];
        --word_row[old_k];
        --s.topic_totals_[old_k];

        const double total = simd::topicWeights({doc_row, K}, {word_row, K}, totals, s.alpha_,
                                                s.beta_, vbeta, cumulative);
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto new_k = static_cast<std::uint32_t>(
            std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(K) - 1));

        s.assignments_[d][i] = new_k;
        ++doc_row[new_k];
        ++word_row[new_k];
        ++s.topic_totals_[new_k];
      }
    }
    s.sweeps_ = sweep;
    if (observer) observer(s, sweep);
  }
  return s;
}

std::map<std::string, std::set<std::size_t>> assignTopics(const TopicModelState& state,
                                                          double threshold) {
  std::map<std::string, std::set<std::size_t>> out;
  for (std::size_t d = 0; d < state.numDocs(); ++d) {
    auto& topics = out[state.docIds()[d]];
    for (std::size_t k = 0; k < state.numTopics(); ++k) {
      if (state.proportion(d, k) > threshold) topics.insert(k);
    }
  }
  return out;
}

std::vector<std::string> topicTags(const TopicModelState& state, std::size_t topic,
                                   std::size_t n) {
  if (topic >= state.numTopics()) throw Error("invalid topic id " + std::to_string(topic));
  if (n == 0) throw Error("topicTags: n must be >= 1");
  n = std::min(n, state.vocabSize());
  std::vector<std::size_t> ids(state.vocabSize());
  std::iota(ids.begin(), ids.end(), 0);
  // probability is monotone in the count for a fixed topic
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](std::size_t a, std::size_t b) {
                      const auto ca = state.topicWord(topic, a);
                      const auto cb = state.topicWord(topic, b);
                      return ca != cb ? ca > cb : a < b;
                    });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(state.vocab()[ids[i]]);
  return out;
}

std::vector<std::size_t> rankTopics(const TopicModelState& state,
                                    const std::map<std::string, std::set<std::size_t>>& assignment) {
  std::vector<std::size_t> counts(state.numTopics(), 0);
  for (const auto& [doc, topics] : assignment) {
    for (auto k : topics) {
      if (k < counts.size()) ++counts[k];
    }
  }
  std::vector<std::size_t> order(state.numTopics());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

std::vector<kera::TagCount> labelClusterWithKera(
    std::span<const std::pair<std::string, std::vector<Token>>> cluster_docs, std::size_t k_tags,
    const kera::KeraOptions& options) {
  std::vector<std::pair<std::string, std::vector<std::string>>> keywords;
  keywords.reserve(cluster_docs.size());
  for (const auto& [id, tokens] : cluster_docs) {
    std::vector<std::string> tags;
    for (const auto& c : kera::extractKeywords(std::span<const Token>(tokens), options)) {
      tags.push_back(c.text());
    }
    keywords.emplace_back(id, std::move(tags));
  }
  auto cloud = kera::buildTagCloud(keywords);
  if (cloud.size() > k_tags) cloud.resize(k_tags);
  return cloud;
}

std::size_t chooseK(std::size_t num_docs) {
  const std::size_t k = (num_docs + 99) / 100 + 4;
  return std::clamp<std::size_t>(k, 5, 50);
}

// --- persistence ---------------------------------------------------------

namespace {

constexpr const char* kMagic = "facetlens-lda";
constexpr int kVersion = 1;

std::string fmtDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string expectLine(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(std::string("truncated LDA model: missing ") + what);
  return line;
}

template <typename T>
T parseField(const std::string& line, const std::string& key) {
  std::istringstream ss(line);
  std::string k;
  T value{};
  if (!(ss >> k >> value) || k != key) throw Error("malformed LDA model line: '" + line + "'");
  return value;
}

}  // namespace

void TopicModelState::save(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n';
  out << "topics " << num_topics_ << '\n';
  out << "alpha " << fmtDouble(alpha_) << '\n';
  out << "beta " << fmtDouble(beta_) << '\n';
  out << "seed " << seed_ << '\n';
  out << "sweeps " << sweeps_ << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (const auto& w : vocab_) out << w << '\n';
  out << "docs " << docs_.size() << '\n';
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    out << doc_ids_[d] << '\t';
    for (std::size_t k = 0; k < num_topics_; ++k) out << (k ? " " : "") << docTopic(d, k);
    out << '\t';
    for (std::size_t i = 0; i < docs_[d].size(); ++i) out << (i ? " " : "") << docs_[d][i];
    out << '\t';
    for (std::size_t i = 0; i < docs_[d].size(); ++i) out << (i ? " " : "") << assignments_[d][i];
    out << '\n';
  }
  out << "topic_totals";
  for (auto t : topic_totals_) out << ' ' << t;
  out << '\n';
}

TopicModelState TopicModelState::load(std::istream& in) {
  TopicModelState s;
  {
    std::istringstream header(expectLine(in, "header"));
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != kMagic) throw Error("not an LDA model file");
    if (version != kVersion) throw Error("unsupported LDA model version " + std::to_string(version));
  }
  s.num_topics_ = parseField<std::size_t>(expectLine(in, "topics"), "topics");
  s.alpha_ = parseField<double>(expectLine(in, "alpha"), "alpha");
  s.beta_ = parseField<double>(expectLine(in, "beta"), "beta");
  s.seed_ = parseField<std::uint64_t>(expectLine(in, "seed"), "seed");
  s.sweeps_ = parseField<std::size_t>(expectLine(in, "sweeps"), "sweeps");
  const auto V = parseField<std::size_t>(expectLine(in, "vocab"), "vocab");
  s.vocab_.reserve(V);
  for (std::size_t i = 0; i < V; ++i) s.vocab_.push_back(expectLine(in, "vocabulary word"));
  const auto D = parseField<std::size_t>(expectLine(in, "docs"), "docs");
  const std::size_t K = s.num_topics_;
  if (K == 0) throw Error("LDA model has zero topics");
  std::vector<std::int32_t> stored_doc_topic;
  for (std::size_t d = 0; d < D; ++d) {
    const auto line = expectLine(in, "document");
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string col; std::getline(ls, col, '\t');) cols.push_back(col);
    if (cols.size() != 4) throw Error("malformed LDA document line " + std::to_string(d));
    s.doc_ids_.push_back(cols[0]);
    std::istringstream counts(cols[1]), words(cols[2]), zs(cols[3]);
    for (std::size_t k = 0; k < K; ++k) {
      std::int32_t c = 0;
      if (!(counts >> c)) throw Error("malformed doc-topic counts in document " + std::to_string(d));
      stored_doc_topic.push_back(c);
    }
    std::vector<std::uint32_t> doc, z;
    for (std::uint32_t w; words >> w;) {
      if (w >= V) throw Error("word id out of range in LDA model");
      doc.push_back(w);
    }
    for (std::uint32_t k; zs >> k;) {
      if (k >= K) throw Error("topic id out of range in LDA model");
      z.push_back(k);
    }
    if (doc.size() != z.size()) throw Error("assignment count mismatch in document " + std::to_string(d));
    s.docs_.push_back(std::move(doc));
    s.assignments_.push_back(std::move(z));
  }
  std::istringstream tl(expectLine(in, "topic_totals"));
  std::string key;
  tl >> key;
  if (key != "topic_totals") throw Error("malformed topic_totals line");
  std::vector<std::int32_t> stored_totals;
  for (std::int32_t t; tl >> t;) stored_totals.push_back(t);

  s.rebuildCounts();
  if (stored_doc_topic != s.doc_topic_ || stored_totals != s.topic_totals_) {
    throw Error("LDA model counts disagree with its assignments");
  }
  return s;
}

}  // namespace facetlens::topics
