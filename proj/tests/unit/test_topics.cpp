// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numeric>
#include <sstream>

#include "facetlens/error.hpp"
#include "facetlens/textproc.hpp"
#include "facetlens/topics.hpp"
#include "fixtures.hpp"

using namespace facetlens;
using namespace facetlens::topics;

namespace {

// Builds a state through the persistence format: one word per token, the
// given per-document topic assignments, and smoothing `alpha`.
TopicModelState stateFromAssignments(std::size_t K, double alpha,
                                     const std::vector<std::vector<std::uint32_t>>& z) {
  std::ostringstream out;
  out << "facetlens-lda 1\ntopics " << K << "\nalpha " << alpha << "\nbeta 0.01\nseed 1\nsweeps 0\n";
  out << "vocab 1\nw\ndocs " << z.size() << '\n';
  std::vector<int> totals(K, 0);
  for (std::size_t d = 0; d < z.size(); ++d) {
    std::vector<int> counts(K, 0);
    for (auto k : z[d]) ++counts[k], ++totals[k];
    out << "d" << d << '\t';
    for (std::size_t k = 0; k < K; ++k) out << (k ? " " : "") << counts[k];
    out << '\t';
    for (std::size_t i = 0; i < z[d].size(); ++i) out << (i ? " " : "") << 0;
    out << '\t';
    for (std::size_t i = 0; i < z[d].size(); ++i) out << (i ? " " : "") << z[d][i];
    out << '\n';
  }
  out << "topic_totals";
  for (auto t : totals) out << ' ' << t;
  out << '\n';
  std::istringstream in(out.str());
  return TopicModelState::load(in);
}

std::vector<std::uint32_t> repeat(std::initializer_list<std::pair<std::uint32_t, int>> runs) {
  std::vector<std::uint32_t> z;
  for (auto [k, n] : runs) z.insert(z.end(), static_cast<std::size_t>(n), k);
  return z;
}

LdaOptions options(std::size_t K, std::size_t iterations, std::uint64_t seed) {
  LdaOptions o;
  o.num_topics = K;
  o.iterations = iterations;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("topics") {
  TEST_CASE("assignTopics examples") {
    const auto s = stateFromAssignments(2, 0.0,
                                        {repeat({{0, 60}, {1, 40}}), repeat({{0, 29}, {1, 71}})});
    const auto a = assignTopics(s, 0.3);
    CHECK(a.at("d0") == std::set<std::size_t>{0, 1});
    CHECK(a.at("d1") == std::set<std::size_t>{1});
    const auto u = stateFromAssignments(4, 0.0, {repeat({{0, 1}, {1, 1}, {2, 1}, {3, 1}})});
    CHECK(assignTopics(u, 0.25).at("d0").empty());
  }

  TEST_CASE("assignTopics uses smoothed proportions") {
    // raw (1.0, 0.0); with alpha 1 over 4 tokens: (5/6, 1/6)
    const auto s = stateFromAssignments(2, 1.0, {repeat({{0, 4}})});
    CHECK(s.proportion(0, 0) == doctest::Approx(5.0 / 6.0));
    CHECK(s.rawProportion(0, 0) == 1.0);
    CHECK(assignTopics(s, 0.9).at("d0").empty());
    CHECK(assignTopics(s, 0.8).at("d0") == std::set<std::size_t>{0});
  }

  TEST_CASE("rankTopics orders by assigned documents") {
    const auto s = stateFromAssignments(3, 0.0, {repeat({{0, 1}})});
    std::map<std::string, std::set<std::size_t>> a;
    for (int i = 0; i < 5; ++i) a["x" + std::to_string(i)] = {0};
    for (int i = 0; i < 9; ++i) a["y" + std::to_string(i)].insert(1);
    CHECK(rankTopics(s, a) == std::vector<std::size_t>{1, 0, 2});
    std::map<std::string, std::set<std::size_t>> tie = {{"a", {0}}, {"b", {1}}};
    CHECK(rankTopics(s, tie) == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("chooseK") {
    CHECK(chooseK(1) == 5);
    CHECK(chooseK(1000) == 14);
    CHECK(chooseK(100000) == 50);
    CHECK(chooseK(150) == 6);
  }

  TEST_CASE("fitLDA conserves counts after every sweep") {
    const auto tc = fixtures::makeTopicCorpus(3, 2, 20, 30, 10);
    std::size_t sweeps = 0;
    const auto state = fitLDA(tc.corpus, options(3, 15, 9), [&](const TopicModelState& s, std::size_t sweep) {
      CHECK(sweep == sweeps + 1);
      sweeps = sweep;
      CHECK_NOTHROW(s.checkInvariants());
    });
    CHECK(sweeps == 15);
    CHECK(state.sweeps() == 15);
    for (std::size_t d = 0; d < state.numDocs(); ++d) {
      std::int32_t sum = 0;
      double p = 0.0;
      for (std::size_t k = 0; k < state.numTopics(); ++k) {
        sum += state.docTopic(d, k);
        p += state.proportion(d, k);
      }
      CHECK(sum == static_cast<std::int32_t>(state.docs()[d].size()));
      CHECK(std::abs(p - 1.0) < 1e-12);
    }
  }

  TEST_CASE("single document, no signal") {
    LdaCorpus c;
    c.vocab = {"a", "b"};
    c.doc_ids = {"only"};
    c.docs = {{0, 1, 0, 1, 0}};
    const auto s = fitLDA(c, options(2, 10, 1));
    CHECK(s.docTopic(0, 0) + s.docTopic(0, 1) == 5);
    CHECK(s.topicTotal(0) + s.topicTotal(1) == 5);
  }

  TEST_CASE("fitLDA is deterministic per seed") {
    const auto tc = fixtures::makeTopicCorpus(5);
    const auto a = fitLDA(tc.corpus, options(2, 30, 42));
    const auto b = fitLDA(tc.corpus, options(2, 30, 42));
    CHECK(a.assignments() == b.assignments());
    // a single sweep still reflects the random initialization
    CHECK(fitLDA(tc.corpus, options(2, 1, 42)).assignments() != fitLDA(tc.corpus, options(2, 1, 43)).assignments());
  }

  TEST_CASE("recovery holds across seeds") {
    const auto tc = fixtures::makeTopicCorpus(17);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto s = fitLDA(tc.corpus, options(2, 200, seed));
      CHECK(fixtures::topicRecovery(s, tc.labels, 0.3) >= 0.95);
      // near-pure documents by raw proportion
      std::size_t pure = 0;
      for (std::size_t d = 0; d < s.numDocs(); ++d) {
        if (std::max(s.rawProportion(d, 0), s.rawProportion(d, 1)) > 0.9) ++pure;
      }
      CHECK(pure >= 95);
    }
  }

  TEST_CASE("fitLDA errors") {
    LdaCorpus empty;
    CHECK_THROWS_AS(fitLDA(empty, options(2, 1, 1)), Error);
    LdaCorpus tiny;
    tiny.vocab = {"a"};
    tiny.doc_ids = {"d"};
    tiny.docs = {{0}};
    CHECK_THROWS_AS(fitLDA(tiny, options(2, 1, 1)), Error);
    tiny.docs = {{0, 0}};
    CHECK_THROWS_AS(fitLDA(tiny, options(1, 1, 1)), Error);
    CHECK_THROWS_AS(fitLDA(tiny, options(2, 0, 1)), Error);
    tiny.docs = {{}};
    CHECK_THROWS_AS(fitLDA(tiny, options(2, 1, 1)), Error);
  }

  TEST_CASE("save and load round trip") {
    const auto tc = fixtures::makeTopicCorpus(2, 2, 10, 20, 5);
    const auto s = fitLDA(tc.corpus, options(2, 5, 3));
    std::stringstream buf;
    s.save(buf);
    const auto loaded = TopicModelState::load(buf);
    CHECK(loaded == s);
    std::istringstream bad("facetlens-lda 2\n");
    CHECK_THROWS_AS(TopicModelState::load(bad), Error);
    std::istringstream garbage("hello\n");
    CHECK_THROWS_AS(TopicModelState::load(garbage), Error);
  }

  TEST_CASE("topicTags") {
    const auto tc = fixtures::makeTopicCorpus(8);
    const auto s = fitLDA(tc.corpus, options(2, 100, 1));
    for (std::size_t k = 0; k < 2; ++k) {
      const auto tags = topicTags(s, k, 10);
      REQUIRE(tags.size() == 10);
      const char prefix = tags.front()[0];
      for (const auto& t : tags) CHECK(t[0] == prefix);
      CHECK(topicTags(s, k, 1) == std::vector<std::string>{tags.front()});
    }
    CHECK_THROWS_AS(topicTags(s, 2, 1), Error);

    // identical counts: lower word id first
    LdaCorpus c;
    c.vocab = {"x", "y"};
    c.doc_ids = {"a", "b"};
    c.docs = {{0, 1}, {0, 1}};
    const auto t = fitLDA(c, options(2, 1, 1));
    for (std::size_t k = 0; k < 2; ++k) {
      if (t.topicWord(k, 0) == t.topicWord(k, 1)) CHECK(topicTags(t, k, 2).front() == "x");
    }
  }

  TEST_CASE("buildLdaCorpus filters vocabulary") {
    using Entry = std::pair<std::string, std::vector<textproc::Token>>;
    std::vector<Entry> docs = {{"a", textproc::analyze("the radar signal 42 unique")},
                               {"b", textproc::analyze("radar signal noise")},
                               {"c", textproc::analyze("only singletons here")}};
    const auto c = buildLdaCorpus(docs, 2);
    CHECK(c.vocab == std::vector<std::string>{"radar", "signal"});
    CHECK(c.doc_ids == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("labelClusterWithKera") {
    using Entry = std::pair<std::string, std::vector<textproc::Token>>;
    const std::string text = "Data mining is useful. Data mining is hard. NASA uses it.";
    std::vector<Entry> one = {{"a", textproc::analyze(text)}};
    const auto cloud = labelClusterWithKera(one, 10);
    REQUIRE_FALSE(cloud.empty());
    for (const auto& tc : cloud) CHECK(tc.count == 1);
    std::vector<Entry> two = {{"a", textproc::analyze(text)},
                              {"b", textproc::analyze("We met ZED. Graph theory is fun. Graph theory is old.")}};
    const auto joined = labelClusterWithKera(two, 10);
    CHECK(joined.size() == cloud.size() + 2);
    for (const auto& tc : joined) CHECK(tc.count == 1);
    CHECK(labelClusterWithKera(two, 1).size() == 1);
  }
}
