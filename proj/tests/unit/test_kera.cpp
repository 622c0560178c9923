// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "facetlens/error.hpp"
#include "facetlens/kera.hpp"
#include "facetlens/textproc.hpp"
#include "oracles.hpp"

using namespace facetlens;
using namespace facetlens::kera;

namespace {

std::set<std::string> texts(const std::vector<KeywordCandidate>& ks) {
  std::set<std::string> out;
  for (const auto& k : ks) out.insert(k.text());
  return out;
}

const char* kSample =
    "Data mining finds patterns. We apply data mining to logs. The KERA tool uses data mining "
    "and topic models. Analysts read topic models daily. Tag clouds show topic models and "
    "data mining results.";

}  // namespace

TEST_SUITE("kera") {
  TEST_CASE("llrScore examples") {
    CHECK(llrScore({1, 1, 1, 1}) == 0.0);
    CHECK(llrScore({2, 0, 0, 8}) == doctest::Approx(10.008).epsilon(1e-4));
    CHECK(llrScore({2, 0, 0, 8}) ==
          doctest::Approx(static_cast<double>(oracles::llr(2, 0, 0, 8))).epsilon(1e-12));
    CHECK(llrScore({0, 0, 0, 5}) == 0.0);
    CHECK_THROWS_WITH_AS(llrScore({0, 0, 0, 0}), "empty table", Error);
  }

  TEST_CASE("llrScore matches the oracle and scales linearly") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      const ContingencyTable t{rng() % 50, rng() % 50, rng() % 50, 1 + rng() % 500};
      const double got = llrScore(t);
      const double want = static_cast<double>(oracles::llr(t.n11, t.n12, t.n21, t.n22));
      CHECK(got >= 0.0);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
      const ContingencyTable scaled{t.n11 * 10, t.n12 * 10, t.n21 * 10, t.n22 * 10};
      CHECK(std::abs(llrScore(scaled) - 10.0 * got) <= 1e-8 * std::max(1.0, got));
    }
  }

  TEST_CASE("pmiScore examples") {
    CHECK(pmiScore({1, 1, 1, 1}) == doctest::Approx(0.0));
    CHECK(pmiScore({2, 0, 0, 8}) == doctest::Approx(std::log(5.0)));
    CHECK_THROWS_WITH_AS(pmiScore({0, 1, 1, 1}), "unobserved pair", Error);
    // same dependence ratio, rarer pair scores higher
    CHECK(pmiScore({1, 0, 0, 99}) > pmiScore({10, 0, 0, 90}));
    CHECK(pmiScore({3, 1, 2, 20}) ==
          doctest::Approx(static_cast<double>(oracles::pmi(3, 1, 2, 20))).epsilon(1e-12));
  }

  TEST_CASE("extractCollocations") {
    std::string text;
    for (int i = 0; i < 3; ++i) text += "Alpha beta data mining gamma delta. ";
    const auto tokens = textproc::analyze(text);
    const auto c = extractCollocations(tokens, CollocationMethod::Llr, 2);
    REQUIRE(c.count("data mining") == 1);
    const auto& dm = c.at("data mining");
    CHECK(dm.count == 3);
    CHECK(dm.score > 0.0);
    CHECK(dm.first_index == 2);
    CHECK(dm.score == doctest::Approx(static_cast<double>(
                          oracles::llr(dm.table.n11, dm.table.n12, dm.table.n21, dm.table.n22))));
    // sentence-straddling pair is not a candidate
    CHECK(c.count("delta alpha") == 0);
  }

  TEST_CASE("extractCollocations min_count and trivial inputs") {
    const auto tokens = textproc::analyze("alpha beta gamma");
    CHECK(extractCollocations(tokens, CollocationMethod::Llr, 2).empty());
    CHECK(extractCollocations(tokens, CollocationMethod::Llr, 1).count("alpha beta") == 1);
    CHECK(extractCollocations(textproc::analyze("solo"), CollocationMethod::Llr, 1).empty());
    CHECK_THROWS_AS(extractCollocations(tokens, CollocationMethod::Llr, 0), Error);
    // stopwords and numbers never form candidates
    const auto s = textproc::analyze("the 42 the 42 the 42");
    CHECK(extractCollocations(s, CollocationMethod::Pmi, 1).empty());
  }

  TEST_CASE("harmonic mean identities") {
    CHECK(harmonicMean(0.4, 0.4) == doctest::Approx(0.4));
    CHECK(harmonicMean(0.0, 0.0) == 0.0);
    CHECK(harmonicMean(1.0, 0.5) == doctest::Approx(oracles::harmonic(1.0, 0.5)));
  }

  TEST_CASE("extractKeywords on a sample") {
    const auto ks = extractKeywords(kSample, KeraOptions{});
    const auto set = texts(ks);
    CHECK(set.count("data mining") == 1);
    CHECK(set.count("topic models") == 1);
    CHECK(set.count("kera") == 1);
    const auto& top = ks.front();
    CHECK(top.text() == "data mining");
    CHECK(top.phrase.first_index == 0);
    CHECK(top.beta == 1.0);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(ks[i].score >= 0.0);
      CHECK(ks[i].score <= 1.0);
      CHECK(ks[i].score == doctest::Approx(oracles::harmonic(ks[i].alpha, ks[i].beta)).epsilon(1e-12));
      if (i > 0) CHECK(ks[i - 1].score >= ks[i].score);
    }
    KeraOptions two;
    two.k = 2;
    CHECK(extractKeywords(kSample, two).size() == 2);
    two.k = 0;
    CHECK_THROWS_AS(extractKeywords(kSample, two), Error);
    CHECK(extractKeywords("", KeraOptions{}).empty());
  }

  TEST_CASE("output is drawn from the combined candidate set") {
    const auto tokens = textproc::analyze(kSample);
    KeraOptions opts;
    opts.k = 100;
    const auto sets = generateCandidateSets(tokens, opts);
    for (const auto& k : extractKeywords(std::span<const textproc::Token>(tokens), opts)) {
      if (k.kind == CandidateKind::Bigram) {
        CHECK(sets.collocations.count(k.text()) == 1);
        CHECK(sets.noun_phrases.count(k.text()) == 1);
      } else {
        CHECK(sets.proper_unigrams.count(k.text()) == 1);
      }
    }
  }

  TEST_CASE("equally frequent unigrams rank by position") {
    const auto ks = extractKeywords("We met ZED and YAK.", KeraOptions{});
    REQUIRE(ks.size() == 2);
    CHECK(ks[0].text() == "zed");
    CHECK(ks[1].text() == "yak");
  }

  TEST_CASE("candidate set is stable under self concatenation") {
    KeraOptions opts;
    opts.k = 1000;
    opts.min_count = 1;
    for (const std::string& text :
         {std::string(kSample), std::string("Graph theory helps. Signal processing and graph theory "
                                            "meet NASA engineers. The NASA lab does signal processing.")}) {
      const auto once = texts(extractKeywords(text, opts));
      const auto twice = texts(extractKeywords(text + "\n\n" + text, opts));
      CHECK(once == twice);
    }
  }

  TEST_CASE("pruning options") {
    const std::string text =
        "We met Petraeus and the NASA team. Data mining helps NASA. Data mining is fun. "
        "Much later Zimbabwe came up.";
    KeraOptions base;
    base.k = 100;
    const auto all = texts(extractKeywords(text, base));
    CHECK(all.count("petraeus") == 1);
    CHECK(all.count("nasa") == 1);
    CHECK(all.count("zimbabwe") == 1);

    auto upper = base;
    upper.prune_uppercase_unigrams = true;
    const auto u = texts(extractKeywords(text, upper));
    CHECK(u.count("petraeus") == 0);
    CHECK(u.count("nasa") == 1);
    CHECK(u.count("data mining") == 1);

    auto late = base;
    late.drop_late_unigrams = true;
    CHECK(texts(extractKeywords(text, late)).count("zimbabwe") == 0);

    const std::string inner = "The KERA method. KERA mining and KERA mining again. Mining KERA mining.";
    auto discard = base;
    discard.min_count = 2;
    const auto plain = texts(extractKeywords(inner, discard));
    REQUIRE(plain.count("kera mining") == 1);
    CHECK(plain.count("kera") == 1);
    discard.discard_unigrams_in_bigrams = true;
    CHECK(texts(extractKeywords(inner, discard)).count("kera") == 0);
  }

  TEST_CASE("alpha normalizations") {
    const auto tokens = textproc::analyze(kSample);
    KeraOptions opts;
    opts.k = 100;
    auto ks = extractKeywords(std::span<const textproc::Token>(tokens), opts);
    double max_bigram_alpha = 0.0;
    for (const auto& k : ks) {
      CHECK(k.alpha > 0.0);
      CHECK(k.alpha <= 1.0);
      if (k.kind == CandidateKind::Bigram) max_bigram_alpha = std::max(max_bigram_alpha, k.alpha);
    }
    CHECK(max_bigram_alpha == 1.0);
    opts.alpha_always_frequency = true;
    ks = extractKeywords(std::span<const textproc::Token>(tokens), opts);
    for (const auto& k : ks) {
      if (k.text() == "data mining") CHECK(k.alpha == 1.0);
      if (k.text() == "topic models") CHECK(k.alpha == doctest::Approx(3.0 / 4.0));
    }
  }

  TEST_CASE("PMI method ranks too") {
    KeraOptions opts;
    opts.method = CollocationMethod::Pmi;
    CHECK(texts(extractKeywords(kSample, opts)).count("data mining") == 1);
  }

  TEST_CASE("buildTagCloud") {
    using Entry = std::pair<std::string, std::vector<std::string>>;
    const std::vector<Entry> three = {{"a", {"data mining"}}, {"b", {"data mining"}}, {"c", {"data mining"}}};
    CHECK(buildTagCloud(three) == std::vector<TagCount>{{"data mining", 3}});
    const std::vector<Entry> dup = {{"a", {"x", "x"}}};
    CHECK(buildTagCloud(dup) == std::vector<TagCount>{{"x", 1}});
    CHECK(buildTagCloud(std::span<const Entry>{}).empty());
    const std::vector<Entry> mixed = {{"a", {"b", "a"}}, {"b", {"a"}}, {"c", {"c"}}};
    CHECK(buildTagCloud(mixed) == std::vector<TagCount>{{"a", 2}, {"b", 1}, {"c", 1}});
  }
}
