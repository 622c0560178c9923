// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "facetlens/textproc.hpp"

namespace facetlens::fixtures {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("facetlens-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void writeFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::string numbered(const std::string& prefix, std::size_t i, int width = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix.c_str(), width, i);
  return buf;
}

}  // namespace

TopicCorpus makeTopicCorpus(std::uint64_t seed, std::size_t topics, std::size_t docs,
                            std::size_t doc_len, std::size_t vocab_per_topic) {
  TopicCorpus out;
  for (std::size_t k = 0; k < topics; ++k) {
    for (std::size_t i = 0; i < vocab_per_topic; ++i) {
      out.corpus.vocab.push_back(numbered(std::string(1, static_cast<char>('a' + k)) + "w", i));
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t k = d % topics;
    std::vector<std::uint32_t> words(doc_len);
    for (auto& w : words) w = static_cast<std::uint32_t>(k * vocab_per_topic + pick(rng, vocab_per_topic));
    out.corpus.doc_ids.push_back(numbered("doc", d, 3));
    out.corpus.docs.push_back(std::move(words));
    out.labels.push_back(k);
  }
  return out;
}

double topicRecovery(const topics::TopicModelState& state, const std::vector<std::size_t>& labels,
                     double threshold) {
  const std::size_t K = state.numTopics();
  const std::size_t L = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<long>> votes(K, std::vector<long>(L, 0));
  for (std::size_t d = 0; d < state.numDocs(); ++d) {
    for (std::size_t k = 0; k < K; ++k) votes[k][labels[d]] += state.docTopic(d, k);
  }
  std::vector<std::size_t> mapped(K);
  for (std::size_t k = 0; k < K; ++k) {
    mapped[k] = static_cast<std::size_t>(std::max_element(votes[k].begin(), votes[k].end()) - votes[k].begin());
  }
  std::size_t good = 0;
  for (std::size_t d = 0; d < state.numDocs(); ++d) {
    std::set<std::size_t> assigned;
    for (std::size_t k = 0; k < K; ++k) {
      if (state.proportion(d, k) > threshold) assigned.insert(mapped[k]);
    }
    std::size_t hits = 0;
    for (std::size_t k = 0; k < K; ++k) hits += state.proportion(d, k) > threshold ? 1 : 0;
    if (hits == 1 && assigned == std::set<std::size_t>{labels[d]}) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(state.numDocs());
}

ClassifierCorpus makeClassifierCorpus(std::uint64_t seed, std::size_t docs, double overlap,
                                      std::size_t words_per_doc) {
  constexpr std::size_t kVocab = 50;
  const auto shared = static_cast<std::size_t>(overlap * kVocab + 0.5);
  std::vector<std::string> vocab_pos;
  std::vector<std::string> vocab_neg;
  for (std::size_t i = 0; i < shared; ++i) {
    vocab_pos.push_back(numbered("shared", i));
    vocab_neg.push_back(numbered("shared", i));
  }
  for (std::size_t i = shared; i < kVocab; ++i) {
    vocab_pos.push_back(numbered("pos", i));
    vocab_neg.push_back(numbered("neg", i));
  }

  ClassifierCorpus out;
  std::mt19937_64 rng(seed);
  std::vector<std::set<std::string>> sets;
  std::vector<std::string> ids;
  for (std::size_t d = 0; d < docs; ++d) {
    const bool positive = d % 2 == 0;
    auto vocab = positive ? vocab_pos : vocab_neg;
    for (std::size_t i = vocab.size(); i > 1; --i) std::swap(vocab[i - 1], vocab[pick(rng, i)]);
    std::set<std::string> words(vocab.begin(), vocab.begin() + static_cast<std::ptrdiff_t>(words_per_doc));
    const auto id = numbered("c", d, 4);
    ids.push_back(id);
    sets.push_back(words);
    out.presence[id] = words;
    (positive ? out.positives : out.negatives).push_back(id);
  }
  out.space = supervised::FeatureSpace::build(sets);
  for (std::size_t i = 0; i < ids.size(); ++i) out.features[ids[i]] = out.space.encode(sets[i]);
  return out;
}

namespace {

const std::vector<std::string>& facetVocab() {
  static const std::vector<std::string> words = {
      "alpha", "bravo",  "charlie", "delta",  "echo",    "foxtrot", "golf",   "hotel",
      "india", "juliet", "kilo",    "lima",   "mike",    "november", "oscar", "papa",
      "radar", "sierra", "tango",   "uniform", "victor", "whiskey", "xray",   "yankee"};
  return words;
}

std::vector<std::string> facetValues(facetindex::Facet f) {
  using facetindex::Facet;
  switch (f) {
    case Facet::Keywords:
      return {"data mining", "tag cloud", "topic model", "kera", "search engine", "graph theory"};
    case Facet::TopicCluster:
      return {"t0 alpha", "t1 bravo", "t2 charlie", "t3 delta"};
    case Facet::Technology:
      return {"radar", "sonar", "lidar", "other"};
    case Facet::ReportType:
      return {"TECHNICAL", "TEST", "PROGRAMMATIC", "OTHER"};
    case Facet::Mentions:
      return {"PII", "FOUO", "NET"};
    default:
      return {};
  }
}

}  // namespace

FacetCorpus makeFacetCorpus(std::uint64_t seed, std::size_t docs) {
  using facetindex::Facet;
  std::mt19937_64 rng(seed);
  const auto& vocab = facetVocab();
  const std::vector<std::string> formats = {"txt", "md", "html"};
  const std::vector<std::vector<std::string>> folders = {
      {"/"}, {"/", "a"}, {"/", "a", "a/b"}, {"/", "c"}, {"/", "c", "c/d"}};
  const std::vector<std::string> authors = {"ann", "bo", "cy"};
  const auto start = std::chrono::sys_days{std::chrono::year{2013} / 1 / 1};

  FacetCorpus out;
  for (std::size_t d = 0; d < docs; ++d) {
    ingest::Document doc;
    doc.doc_id = numbered("doc", d, 5);
    doc.source_path = "/corpus/" + doc.doc_id;
    doc.format_tag = formats[pick(rng, formats.size())];
    const std::size_t len = 3 + pick(rng, 25);
    for (std::size_t i = 0; i < len; ++i) {
      if (i > 0) doc.text += ' ';
      std::string w = vocab[pick(rng, vocab.size())];
      if (pick(rng, 7) == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      doc.text += w;
    }
    const auto& f = folders[pick(rng, folders.size())];
    doc.folder_tags = {f.begin(), f.end()};
    if (pick(rng, 4) != 0) doc.author = authors[pick(rng, authors.size())];
    doc.last_modified = start + std::chrono::seconds{static_cast<long>(pick(rng, 365 * 86400))};
    doc.byte_size = doc.text.size();

    facetindex::FacetTags tags;
    for (auto facet : {Facet::Keywords, Facet::TopicCluster, Facet::Technology, Facet::ReportType,
                       Facet::Mentions}) {
      const auto values = facetValues(facet);
      const bool single = facet == Facet::Technology || facet == Facet::ReportType;
      const std::size_t n = single ? 1 : pick(rng, 4);
      for (std::size_t i = 0; i < n; ++i) tags[facet].insert(values[pick(rng, values.size())]);
    }
    out.docs.push_back(std::move(doc));
    out.tags.push_back(std::move(tags));
  }
  return out;
}

facetindex::FacetQuery randomQuery(std::mt19937_64& rng, const FacetCorpus& corpus) {
  using facetindex::Facet;
  facetindex::FacetQuery q;
  const auto& vocab = facetVocab();
  const std::size_t n_terms = pick(rng, 3);
  for (std::size_t i = 0; i < n_terms; ++i) {
    q.text_terms.push_back(pick(rng, 10) == 0 ? "zulu" : vocab[pick(rng, vocab.size())]);
  }
  const std::size_t n_filters = pick(rng, 4);
  for (std::size_t i = 0; i < n_filters; ++i) {
    const Facet facet = facetindex::kAllFacets[pick(rng, facetindex::kAllFacets.size())];
    // values drawn from a random document so filters usually match something
    const auto& doc = corpus.docs[pick(rng, corpus.docs.size())];
    std::vector<std::string> pool;
    switch (facet) {
      case Facet::FileType:
        pool = {doc.format_tag};
        break;
      case Facet::Folder:
        pool.assign(doc.folder_tags.begin(), doc.folder_tags.end());
        break;
      case Facet::Author:
        pool = {doc.author.value_or("nobody")};
        break;
      case Facet::Date:
        pool = {formatDay(doc.last_modified)};
        break;
      default:
        pool = facetValues(facet);
    }
    const std::size_t n_values = 1 + pick(rng, 2);
    for (std::size_t v = 0; v < n_values; ++v) q.filters[facet].insert(pool[pick(rng, pool.size())]);
  }
  if (pick(rng, 3) == 0) {
    const auto base = std::chrono::sys_days{std::chrono::year{2013} / 1 / 1};
    facetindex::DateRange range;
    const auto a = base + std::chrono::seconds{static_cast<long>(pick(rng, 365 * 86400))};
    const auto b = base + std::chrono::seconds{static_cast<long>(pick(rng, 365 * 86400))};
    if (pick(rng, 4) != 0) range.start = std::min(a, b);
    if (pick(rng, 4) != 0) range.end = std::max(a, b);
    q.date_range = range;
  }
  return q;
}

facetindex::FacetResult bruteForceSearch(const std::vector<const facetindex::IndexedDocument*>& docs,
                                         const facetindex::FacetQuery& query) {
  std::vector<std::pair<std::size_t, const facetindex::IndexedDocument*>> hits;
  for (const auto* entry : docs) {
    std::map<std::string, std::size_t> tf;
    for (const auto& t : textproc::tokenize(entry->doc.text)) ++tf[t.norm];
    std::size_t relevance = 0;
    bool ok = true;
    for (const auto& term : query.text_terms) {
      std::string lower = term;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const auto it = tf.find(lower);
      if (it == tf.end()) {
        ok = false;
        break;
      }
      relevance += it->second;
    }
    for (const auto& [facet, values] : query.filters) {
      if (!ok || values.empty()) continue;
      const auto it = entry->tags.find(facet);
      const bool any = it != entry->tags.end() &&
                       std::any_of(values.begin(), values.end(),
                                   [&](const std::string& v) { return it->second.contains(v); });
      ok = any;
    }
    if (ok && query.date_range) {
      const auto ts = entry->doc.last_modified;
      if (query.date_range->start && ts < *query.date_range->start) ok = false;
      if (query.date_range->end && ts > *query.date_range->end) ok = false;
    }
    if (ok) hits.emplace_back(relevance, entry);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second->doc.doc_id < b.second->doc.doc_id;
  });
  facetindex::FacetResult out;
  for (const auto& [rel, entry] : hits) {
    out.doc_ids.push_back(entry->doc.doc_id);
    for (const auto& [facet, values] : entry->tags) {
      for (const auto& v : values) ++out.facet_counts[facet][v];
    }
  }
  return out;
}

namespace {

struct Theme {
  std::vector<std::string> adjectives;
  std::vector<std::string> nouns;
  std::string phrase_a;
  std::string phrase_b;
};

const std::vector<Theme>& themes() {
  static const std::vector<Theme> t = {
      {{"large", "noisy", "sparse"}, {"corpus", "archive", "collection", "index", "query"},
       "data mining", "text analytics"},
      {{"secure", "wireless", "optical"}, {"router", "packet", "link", "protocol", "switch"},
       "network traffic", "packet loss"},
      {{"thermal", "composite", "structural"}, {"beam", "panel", "load", "joint", "stress"},
       "fatigue testing", "crack growth"},
      {{"annual", "fiscal", "strategic"}, {"budget", "program", "milestone", "review", "plan"},
       "program office", "funding profile"},
  };
  return t;
}

}  // namespace

E2EFixture writeE2ECorpus(const fs::path& root, std::size_t files, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> dirs = {"reports/2012", "reports/2013", "notes", "web", "misc/deep/er"};
  const std::vector<std::string> exts = {"txt", "md", "html", "txt"};
  E2EFixture out;
  out.files = files;
  for (std::size_t i = 0; i < files; ++i) {
    const auto& theme = themes()[i % themes().size()];
    std::string body;
    const std::size_t sentences = 6 + pick(rng, 6);
    for (std::size_t s = 0; s < sentences; ++s) {
      const auto& adj = theme.adjectives[pick(rng, theme.adjectives.size())];
      const auto& n1 = theme.nouns[pick(rng, theme.nouns.size())];
      const auto& n2 = theme.nouns[pick(rng, theme.nouns.size())];
      const auto& phrase = s % 2 == 0 ? theme.phrase_a : theme.phrase_b;
      body += "The " + adj + " " + n1 + " needs " + phrase + " for the " + n2 + " in report " +
              std::to_string(i * 100 + s) + ". ";
    }
    if (i % 5 == 0) {
      char ssn[16];
      std::snprintf(ssn, sizeof ssn, "%03zu-%02zu-%04zu", 100 + i, 10 + i % 90, 1000 + i * 7);
      body += "Contact record SSN " + std::string(ssn) + " is on file. ";
    } else if (i % 5 == 1) {
      body += "Ticket 12-345-6789 was closed. ";
    }
    if (i % 9 == 0) body += "For Official Use Only. ";

    const auto& ext = exts[i % exts.size()];
    const auto rel = dirs[i % dirs.size()] + "/" + numbered("file", i, 3) + "." + ext;
    std::string content = body;
    if (ext == "html") content = "<html><head><title>r</title></head><body><p>" + body + "</p></body></html>";
    writeFile(root / rel, content);
    if (i % 4 == 0) writeFile(root / (rel + ".meta"), "author=analyst" + std::to_string(i % 3) + "\n");
    if (i % 5 == 0) out.ssn_files.insert(rel);
  }
  return out;
}

}  // namespace facetlens::fixtures
