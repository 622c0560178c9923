// SPDX-License-Identifier: Apache-2.0
#include "facetlens/app/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "facetlens/document_json.hpp"
#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"
#include "facetlens/textproc.hpp"
#include "facetlens/topics.hpp"

namespace facetlens::app {

namespace fs = std::filesystem;
using facetindex::Facet;

namespace {

std::size_t parseSize(const std::string& key, const std::string& value, std::size_t min) {
  std::size_t n = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, n);
  if (ec != std::errc() || ptr != end || n < min) {
    throw Error("config key '" + key + "': expected an integer >= " + std::to_string(min) +
                ", got '" + value + "'");
  }
  return n;
}

double parseDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error("config key '" + key + "': expected a number, got '" + value + "'");
}

bool parseBool(const std::string& key, const std::string& value) {
  const auto v = text::toLowerAscii(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("config key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<fs::path> parsePathList(const std::string& value, const fs::path& base_dir) {
  std::vector<fs::path> out;
  for (const auto& item : text::split(value, ',')) {
    const auto trimmed = text::trim(item);
    if (trimmed.empty()) continue;
    fs::path p{std::string(trimmed)};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    out.push_back(std::move(p));
  }
  return out;
}

std::string formatScore(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Lines of a tab-separated artifact with exactly `columns` fields.
std::vector<std::vector<std::string>> readTable(const fs::path& path, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  for (auto& line : text::split(text::readFile(path.string()), '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != columns) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(columns) + " tab-separated fields");
    }
    rows.push_back(std::move(cols));
  }
  return rows;
}

void ensureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

// Words used for topic modelling and classifier features.
std::set<std::string> contentWords(std::span<const textproc::Token> tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) {
    if (t.pos != textproc::Pos::Stopword && t.pos != textproc::Pos::Number) out.insert(t.norm);
  }
  return out;
}

std::string modelFileStem(std::string_view label) {
  std::string out;
  for (char c : label) out.push_back(text::isAsciiAlnum(c) || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "_" : out;
}

}  // namespace

// --- config -------------------------------------------------------------------

PipelineConfig PipelineConfig::fromKeyValues(const std::map<std::string, std::string>& kv,
                                             const fs::path& base_dir) {
  PipelineConfig c;
  std::map<std::string, std::string> ingest_kv;
  for (const auto& [key, value] : kv) {
    if (key == "root" || key == "include_hidden" || key == "extensions" || key == "workers") {
      ingest_kv[key] = value;
    } else if (key == "store") {
      const auto paths = parsePathList(value, base_dir);
      if (paths.size() != 1) throw Error("config key 'store': expected one directory");
      c.store = paths.front();
    } else if (key == "host") {
      c.host = value;
    } else if (key == "port") {
      const auto port = parseSize(key, value, 1);
      if (port > 65535) throw Error("config key 'port': out of range");
      c.port = static_cast<std::uint16_t>(port);
    } else if (key == "kera.k") {
      c.kera.k = parseSize(key, value, 1);
    } else if (key == "kera.method") {
      const auto m = text::toLowerAscii(value);
      if (m == "llr") {
        c.kera.method = kera::CollocationMethod::Llr;
      } else if (m == "pmi") {
        c.kera.method = kera::CollocationMethod::Pmi;
      } else {
        throw Error("config key 'kera.method': expected llr or pmi, got '" + value + "'");
      }
    } else if (key == "kera.min_count") {
      c.kera.min_count = parseSize(key, value, 1);
    } else if (key == "kera.prune_uppercase_unigrams") {
      c.kera.prune_uppercase_unigrams = parseBool(key, value);
    } else if (key == "kera.discard_unigrams_in_bigrams") {
      c.kera.discard_unigrams_in_bigrams = parseBool(key, value);
    } else if (key == "kera.drop_late_unigrams") {
      c.kera.drop_late_unigrams = parseBool(key, value);
    } else if (key == "kera.late_unigram_cutoff") {
      c.kera.late_unigram_cutoff = parseDouble(key, value);
    } else if (key == "kera.alpha_always_frequency") {
      c.kera.alpha_always_frequency = parseBool(key, value);
    } else if (key == "topics.k") {
      if (text::toLowerAscii(value) == "auto") {
        c.topics.k.reset();
      } else {
        c.topics.k = parseSize(key, value, 1);
      }
    } else if (key == "topics.iterations") {
      c.topics.iterations = parseSize(key, value, 1);
    } else if (key == "topics.seed") {
      c.topics.seed = parseSize(key, value, 0);
    } else if (key == "topics.threshold") {
      c.topics.threshold = parseDouble(key, value);
    } else if (key == "topics.tags") {
      c.topics.tags_per_topic = parseSize(key, value, 1);
    } else if (key == "topics.cluster_tags") {
      c.topics.cluster_tags = parseSize(key, value, 1);
    } else if (key == "train.epochs") {
      c.train.active_learning.svm.epochs = parseSize(key, value, 1);
    } else if (key == "train.lambda") {
      c.train.active_learning.svm.lambda = parseDouble(key, value);
    } else if (key == "train.seed") {
      c.train.active_learning.seed = parseSize(key, value, 0);
      c.train.active_learning.svm.seed = c.train.active_learning.seed;
    } else if (key == "train.discriminative_terms") {
      c.train.discriminative_terms = parseSize(key, value, 1);
    } else if (key == "manifests") {
      c.manifests = parsePathList(value, base_dir);
    } else if (key == "mention_specs") {
      c.mention_specs = parsePathList(value, base_dir);
    } else {
      throw Error("unknown config key: " + key);
    }
  }
  c.ingest = ingest::IngestConfig::fromKeyValues(ingest_kv);
  if (!c.ingest.root.empty() && c.ingest.root.is_relative() && !base_dir.empty()) {
    c.ingest.root = base_dir / c.ingest.root;
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::fromFile(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::size_t bad = 0;
  if (!text::parseKeyValues(text::readFile(path.string()), kv, &bad)) {
    throw Error(path.string() + ":" + std::to_string(bad) + ": expected key=value");
  }
  return fromKeyValues(kv, path.parent_path());
}

void PipelineConfig::validate() const {
  if (!(topics.threshold > 0.0 && topics.threshold < 1.0)) {
    throw Error("topic threshold must be in (0,1)");
  }
  if (topics.k && *topics.k < 2) throw Error("topic count must be at least 2");
  if (kera.k < 1) throw Error("keyword count must be at least 1");
  if (kera.min_count < 1) throw Error("collocation min_count must be at least 1");
  if (!(train.active_learning.svm.lambda > 0.0)) throw Error("SVM lambda must be positive");
}

// --- store --------------------------------------------------------------------

void Store::require(const fs::path& artifact, const std::string& stage) const {
  std::error_code ec;
  if (!fs::exists(artifact, ec)) throw MissingStageError(stage);
}

std::vector<ingest::Document> loadDocuments(const Store& store) {
  store.require(store.documents(), "ingest");
  std::vector<ingest::Document> docs;
  std::size_t line_no = 0;
  for (const auto& line : text::split(text::readFile(store.documents().string()), '\n')) {
    ++line_no;
    if (line.empty()) continue;
    try {
      docs.push_back(ingest::documentFromJson(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(store.documents().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void saveDocuments(const Store& store, const std::vector<ingest::Document>& docs) {
  ensureDir(store.root());
  std::string out;
  for (const auto& d : docs) out.append(ingest::toJson(d).dump()).push_back('\n');
  text::writeFileAtomic(store.documents().string(), out);
}

KeywordTable loadKeywords(const Store& store) {
  store.require(store.keywords(), "extract");
  std::map<std::string, std::map<std::size_t, std::string>> ranked;
  for (auto& row : readTable(store.keywords(), 4)) {
    ranked[row[0]][parseSize("rank", row[1], 1)] = std::move(row[2]);
  }
  KeywordTable out;
  for (auto& [doc, by_rank] : ranked) {
    auto& list = out[doc];
    for (auto& [rank, phrase] : by_rank) list.push_back(std::move(phrase));
  }
  return out;
}

TagTable loadTopicTags(const Store& store) {
  store.require(store.topicAssignments(), "topics");
  TagTable out;
  for (auto& row : readTable(store.topicAssignments(), 4)) {
    out[row[0]][Facet::TopicCluster].insert(std::move(row[3]));
  }
  return out;
}

TagTable loadClassifications(const Store& store) {
  store.require(store.classifications(), "train");
  TagTable out;
  for (auto& row : readTable(store.classifications(), 3)) {
    const auto facet = facetindex::requireFacet(row[1]);
    if (facet != Facet::Technology && facet != Facet::ReportType) {
      throw Error(store.classifications().string() + ": unexpected facet " + row[1]);
    }
    out[row[0]][facet].insert(std::move(row[2]));
  }
  return out;
}

MentionCounts loadMentions(const Store& store) {
  store.require(store.mentions(), "mentions");
  MentionCounts out;
  for (auto& row : readTable(store.mentions(), 3)) {
    out[row[0]][row[1]] = parseSize("count", row[2], 1);
  }
  return out;
}

void saveMentions(const Store& store, const MentionCounts& counts) {
  ensureDir(store.root());
  std::string out;
  for (const auto& [doc, cats] : counts) {
    for (const auto& [cat, n] : cats) {
      out.append(doc).append("\t").append(cat).append("\t").append(std::to_string(n)).push_back('\n');
    }
  }
  text::writeFileAtomic(store.mentions().string(), out);
}

// --- stages -------------------------------------------------------------------

StageReport runIngest(const PipelineConfig& config) {
  if (config.ingest.root.empty()) throw Error("ingest: no root directory given");
  auto result = ingest::ingestTree(config.ingest);
  StageReport report;
  for (const auto& issue : result.issues) {
    report.warnings.push_back(issue.path + ": " + std::string(ingest::toString(issue.kind)) +
                              (issue.message.empty() ? "" : ": " + issue.message));
  }
  // identical extracted text means identical doc id; keep the first path
  std::vector<ingest::Document> docs;
  std::map<std::string, std::string> seen;
  for (auto& d : result.documents) {
    auto [it, inserted] = seen.emplace(d.doc_id, d.source_path);
    if (!inserted) {
      report.warnings.push_back(d.source_path + ": duplicate content of " + it->second);
      continue;
    }
    docs.push_back(std::move(d));
  }
  saveDocuments(Store(config.store), docs);
  report.lines.push_back("ingested " + std::to_string(docs.size()) + " documents (" +
                         std::to_string(result.stats.skipped) + " skipped, " +
                         std::to_string(result.stats.errors) + " errors)");
  return report;
}

StageReport runExtract(const PipelineConfig& config) {
  const Store store(config.store);
  const auto docs = loadDocuments(store);
  std::string out;
  std::size_t lines = 0;
  for (const auto& d : docs) {
    const auto tokens = textproc::analyze(d.text);
    const auto keywords = kera::extractKeywords(std::span<const textproc::Token>(tokens), config.kera);
    for (std::size_t i = 0; i < keywords.size(); ++i) {
      out.append(d.doc_id)
          .append("\t")
          .append(std::to_string(i + 1))
          .append("\t")
          .append(keywords[i].text())
          .append("\t")
          .append(formatScore(keywords[i].score))
          .push_back('\n');
      ++lines;
    }
  }
  text::writeFileAtomic(store.keywords().string(), out);
  return {{"extracted " + std::to_string(lines) + " keywords from " + std::to_string(docs.size()) +
           " documents"},
          {}};
}

StageReport runTopics(const PipelineConfig& config) {
  const Store store(config.store);
  const auto docs = loadDocuments(store);
  std::vector<std::pair<std::string, std::vector<textproc::Token>>> analyzed;
  analyzed.reserve(docs.size());
  for (const auto& d : docs) analyzed.emplace_back(d.doc_id, textproc::analyze(d.text));

  const auto corpus = topics::buildLdaCorpus(analyzed);
  if (corpus.docs.empty()) throw Error("topics: no words shared by two or more documents");
  topics::LdaOptions opts;
  opts.num_topics = config.topics.k.value_or(topics::chooseK(corpus.docs.size()));
  opts.iterations = config.topics.iterations;
  opts.seed = config.topics.seed;
  const auto state = topics::fitLDA(corpus, opts);
  const auto assignment = topics::assignTopics(state, config.topics.threshold);
  const auto order = topics::rankTopics(state, assignment);

  std::ostringstream model;
  state.save(model);
  text::writeFileAtomic(store.ldaModel().string(), model.str());

  const std::size_t n_tags = std::min(config.topics.tags_per_topic, state.vocabSize());
  std::vector<std::string> labels(state.numTopics());
  std::vector<std::vector<std::string>> tags(state.numTopics());
  for (std::size_t k = 0; k < state.numTopics(); ++k) {
    tags[k] = topics::topicTags(state, k, n_tags);
    std::string label = "t" + std::to_string(k);
    for (std::size_t i = 0; i < std::min<std::size_t>(3, tags[k].size()); ++i) label += " " + tags[k][i];
    labels[k] = std::move(label);
  }

  std::map<std::size_t, std::vector<std::size_t>> members;  // topic -> analyzed indices
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < analyzed.size(); ++i) position[analyzed[i].first] = i;

  std::string assignments_out;
  std::size_t d = 0;
  for (const auto& id : state.docIds()) {
    const auto it = assignment.find(id);
    if (it != assignment.end()) {
      for (auto k : it->second) {
        members[k].push_back(position.at(id));
        assignments_out.append(id)
            .append("\t")
            .append(std::to_string(k))
            .append("\t")
            .append(formatScore(state.proportion(d, k)))
            .append("\t")
            .append(labels[k])
            .push_back('\n');
      }
    }
    ++d;
  }

  std::string topics_out;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto k = order[rank];
    std::string cloud;
    if (auto m = members.find(k); m != members.end()) {
      std::vector<std::pair<std::string, std::vector<textproc::Token>>> cluster;
      for (auto i : m->second) cluster.push_back(analyzed[i]);
      for (const auto& tc : topics::labelClusterWithKera(cluster, config.topics.cluster_tags, config.kera)) {
        if (!cloud.empty()) cloud += "|";
        cloud += tc.tag + "=" + std::to_string(tc.count);
      }
    }
    const auto n_docs = members.contains(k) ? members[k].size() : 0;
    topics_out.append(std::to_string(k))
        .append("\t")
        .append(std::to_string(rank + 1))
        .append("\t")
        .append(std::to_string(n_docs))
        .append("\t")
        .append(labels[k])
        .append("\t")
        .append(text::join(tags[k], " "))
        .append("\t")
        .append(cloud)
        .push_back('\n');
  }
  text::writeFileAtomic(store.topics().string(), topics_out);
  text::writeFileAtomic(store.topicAssignments().string(), assignments_out);

  StageReport report;
  report.lines.push_back("fitted " + std::to_string(state.numTopics()) + " topics over " +
                         std::to_string(state.numDocs()) + " documents; " +
                         std::to_string(assignment.size()) + " documents assigned");
  if (state.numDocs() < docs.size()) {
    report.warnings.push_back(std::to_string(docs.size() - state.numDocs()) +
                              " documents have no topic vocabulary");
  }
  return report;
}

StageReport runTrain(const PipelineConfig& config, const std::vector<fs::path>& manifests) {
  if (manifests.empty()) throw Error("train: no manifest given");
  const Store store(config.store);
  const auto docs = loadDocuments(store);
  std::vector<std::pair<std::string, std::string>> manifest;
  for (const auto& path : manifests) {
    try {
      for (auto& entry : supervised::parseManifest(text::readFile(path.string()))) {
        manifest.push_back(std::move(entry));
      }
    } catch (const MissingStageError&) {
      throw;
    } catch (const Error& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  if (manifest.empty()) throw Error("train: manifest has no entries");

  // documents may be named by id, absolute path or path suffix
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < docs.size(); ++i) by_id[docs[i].doc_id] = i;
  auto resolve = [&](const std::string& ref) -> const std::string& {
    if (auto it = by_id.find(ref); it != by_id.end()) return docs[it->second].doc_id;
    const ingest::Document* found = nullptr;
    for (const auto& d : docs) {
      const std::string_view p = d.source_path;
      const bool match = p == ref || (p.size() > ref.size() && p.ends_with(ref) &&
                                      p[p.size() - ref.size() - 1] == '/');
      if (!match) continue;
      if (found != nullptr) throw Error("manifest: ambiguous document reference " + ref);
      found = &d;
    }
    if (found == nullptr) throw Error("manifest: unknown document " + ref);
    return found->doc_id;
  };

  std::map<std::string, std::set<std::string>> technology;  // label -> positives
  std::map<std::string, supervised::ReportType> report_labels;
  for (const auto& [label, ref] : manifest) {
    const auto& id = resolve(ref);
    if (label.starts_with("report:")) {
      const auto type = supervised::parseReportType(std::string_view(label).substr(7));
      if (!type) throw Error("manifest: unknown report type in label " + label);
      report_labels[id] = *type;
    } else if (label == "negative") {
      continue;  // stays in every pool
    } else {
      technology[label].insert(id);
    }
  }

  std::vector<std::set<std::string>> words;
  words.reserve(docs.size());
  for (const auto& d : docs) words.push_back(contentWords(textproc::analyze(d.text)));
  const auto space = supervised::FeatureSpace::build(words);
  supervised::FeatureTable features;
  supervised::PresenceIndex presence;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    features[docs[i].doc_id] = space.encode(words[i]);
    presence[docs[i].doc_id] = words[i];
  }

  ensureDir(store.modelsDir());
  StageReport report;
  std::string classifications;

  if (!technology.empty()) {
    std::vector<supervised::LinearModel> models;
    for (const auto& [label, positives] : technology) {
      std::vector<std::string> pos(positives.begin(), positives.end());
      std::vector<std::string> pool;
      for (const auto& d : docs) {
        if (!positives.contains(d.doc_id)) pool.push_back(d.doc_id);
      }
      auto model = supervised::trainWithActiveLearning(label, pos, pool, features, space.dimension(),
                                                       config.train.active_learning);
      std::ostringstream out;
      model.save(out, space);
      const auto stem = modelFileStem(label);
      text::writeFileAtomic((store.modelsDir() / (stem + ".model")).string(), out.str());

      supervised::LabeledSet set{pos, pool};
      std::vector<std::string> terms;
      for (auto& t : supervised::topDiscriminativeTerms(set, presence, config.train.discriminative_terms)) {
        terms.push_back(std::move(t.term));
      }
      text::writeFileAtomic((store.modelsDir() / (stem + ".terms.tsv")).string(),
                            mentions::formatTermSpec(label, terms));
      report.lines.push_back("technology '" + label + "': " + std::to_string(pos.size()) +
                             " positives, training accuracy " + formatScore(model.training_accuracy));
      models.push_back(std::move(model));
    }
    for (const auto& d : docs) {
      const auto tag = supervised::predictTag(models, features.at(d.doc_id));
      classifications.append(d.doc_id).append("\ttechnology\t").append(tag).push_back('\n');
    }
  }

  if (!report_labels.empty()) {
    const auto models = supervised::trainReportTypeModels(report_labels, features, space.dimension(),
                                                          config.train.active_learning.svm);
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (!models[i]) continue;
      std::ostringstream out;
      models[i]->save(out, space);
      const auto name = text::toLowerAscii(supervised::toString(supervised::kReportTypes[i]));
      text::writeFileAtomic((store.modelsDir() / ("report_" + name + ".model")).string(), out.str());
    }
    for (const auto& d : docs) {
      const auto type = supervised::classifyReportType(models, features.at(d.doc_id));
      classifications.append(d.doc_id)
          .append("\treport_type\t")
          .append(supervised::toString(type))
          .push_back('\n');
    }
    report.lines.push_back("report type models trained on " + std::to_string(report_labels.size()) +
                           " documents");
  }

  if (technology.empty() && report_labels.empty()) {
    throw Error("train: manifest has no technology or report:<type> labels");
  }
  text::writeFileAtomic(store.classifications().string(), classifications);
  return report;
}

std::string formatMentionSpec(const mentions::MentionSpec& spec) {
  std::string out;
  for (const auto& e : spec.entries) {
    const auto kind = e.kind == mentions::MentionKind::Regex ? "regex" : "term";
    out.append(e.category).append("\t").append(kind).append("\t").append(e.pattern).push_back('\n');
  }
  return out;
}

MentionCounts scanAll(std::span<const ingest::Document* const> docs, const mentions::MentionSpec& spec) {
  MentionCounts out;
  for (const auto* d : docs) {
    auto hits = mentions::scanDocument(d->text, spec);
    if (!hits.empty()) out[d->doc_id] = std::move(hits);
  }
  return out;
}

StageReport runMentions(const PipelineConfig& config, const std::vector<fs::path>& spec_files) {
  if (spec_files.empty()) throw Error("mentions: no spec file given");
  const Store store(config.store);
  const auto docs = loadDocuments(store);
  mentions::MentionSpec spec;
  for (const auto& f : spec_files) spec = spec.merged(mentions::parseMentionSpecFile(f));

  std::vector<const ingest::Document*> ptrs;
  for (const auto& d : docs) ptrs.push_back(&d);
  const auto counts = scanAll(ptrs, spec);
  text::writeFileAtomic(store.mentionSpec().string(), formatMentionSpec(spec));
  saveMentions(store, counts);
  return {{"scanned " + std::to_string(docs.size()) + " documents with " +
           std::to_string(spec.entries.size()) + " patterns; " + std::to_string(counts.size()) +
           " documents tagged"},
          {}};
}

facetindex::FacetIndex buildIndex(const Store& store) {
  const auto docs = loadDocuments(store);
  std::error_code ec;
  const auto keywords = fs::exists(store.keywords(), ec) ? loadKeywords(store) : KeywordTable{};
  const auto topic_tags = fs::exists(store.topicAssignments(), ec) ? loadTopicTags(store) : TagTable{};
  const auto classes = fs::exists(store.classifications(), ec) ? loadClassifications(store) : TagTable{};
  const auto mention_counts = fs::exists(store.mentions(), ec) ? loadMentions(store) : MentionCounts{};

  facetindex::FacetIndex index;
  for (const auto& d : docs) {
    facetindex::FacetTags tags;
    if (auto it = keywords.find(d.doc_id); it != keywords.end()) {
      tags[Facet::Keywords].insert(it->second.begin(), it->second.end());
    }
    for (const auto* table : {&topic_tags, &classes}) {
      if (auto it = table->find(d.doc_id); it != table->end()) {
        for (const auto& [facet, values] : it->second) tags[facet].insert(values.begin(), values.end());
      }
    }
    if (auto it = mention_counts.find(d.doc_id); it != mention_counts.end()) {
      for (const auto& [cat, n] : it->second) tags[Facet::Mentions].insert(cat);
    }
    index.indexDocument(d, tags);
  }
  return index;
}

StageReport runIndex(const PipelineConfig& config) {
  const Store store(config.store);
  const auto index = buildIndex(store);
  index.save(store.index());
  return {{"indexed " + std::to_string(index.size()) + " documents"}, {}};
}

facetindex::FacetIndex retagMentions(const facetindex::FacetIndex& index, const MentionCounts& counts) {
  facetindex::FacetIndex out;
  for (const auto* entry : index.documents()) {
    auto tags = entry->tags;
    tags.erase(Facet::Mentions);
    if (auto it = counts.find(entry->doc.doc_id); it != counts.end()) {
      for (const auto& [cat, n] : it->second) tags[Facet::Mentions].insert(cat);
    }
    out.indexDocument(entry->doc, tags);
  }
  return out;
}

// --- queries ------------------------------------------------------------------

Timestamp parseFromBound(std::string_view s) {
  const auto t = parseTimestamp(text::trim(s));
  if (!t) throw Error("bad date '" + std::string(s) + "' (expected YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ)");
  return *t;
}

Timestamp parseToBound(std::string_view s) {
  const auto trimmed = text::trim(s);
  const auto t = parseFromBound(trimmed);
  if (trimmed.size() == 10) return t + std::chrono::days{1} - std::chrono::seconds{1};
  return t;
}

facetindex::FacetQuery parseQueryExpression(std::string_view expr) {
  facetindex::FacetQuery query;
  std::size_t i = 0;
  while (i < expr.size()) {
    if (expr[i] == ' ' || expr[i] == '\t' || expr[i] == '\n') {
      ++i;
      continue;
    }
    std::string token;
    std::size_t colon = std::string::npos;  // in `token`, only if before any quote
    bool quoted = false;
    bool seen_quote = false;
    for (; i < expr.size(); ++i) {
      const char c = expr[i];
      if (c == '"') {
        quoted = !quoted;
        seen_quote = true;
        continue;
      }
      if (!quoted && (c == ' ' || c == '\t' || c == '\n')) break;
      if (c == ':' && !seen_quote && colon == std::string::npos) colon = token.size();
      token.push_back(c);
    }
    if (quoted) throw Error("unbalanced quote in query");

    std::string name = colon == std::string::npos ? std::string() : token.substr(0, colon);
    const bool named = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || c == '_';
    });
    if (!named) {
      for (auto& w : facetindex::queryTerms(token)) query.text_terms.push_back(std::move(w));
      continue;
    }
    const std::string value = token.substr(colon + 1);
    if (name == "from" || name == "to") {
      if (!query.date_range) query.date_range.emplace();
      if (name == "from") {
        query.date_range->start = parseFromBound(value);
      } else {
        query.date_range->end = parseToBound(value);
      }
      continue;
    }
    const auto facet = facetindex::requireFacet(name);
    if (value.empty()) throw Error("empty value for facet " + name);
    query.filters[facet].insert(value);
  }
  return query;
}

Page parsePage(const std::optional<std::string>& page, const std::optional<std::string>& page_size) {
  Page p;
  auto parse = [](const std::string& name, const std::string& v) {
    std::size_t n = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, n);
    if (ec != std::errc() || ptr != end || n == 0) throw Error(name + " must be a positive integer");
    return n;
  };
  if (page) p.number = parse("page", *page);
  if (page_size) p.size = std::min(parse("page_size", *page_size), kMaxPageSize);
  return p;
}

std::string dumpJson(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string snippet(std::string_view text) {
  constexpr std::size_t kLimit = 200;
  std::string flat(text.substr(0, std::min(text.size(), kLimit + 1)));
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  if (text.size() <= kLimit) return flat;
  std::size_t cut = flat.rfind(' ', kLimit);
  if (cut == std::string::npos || cut == 0) {
    cut = kLimit;
    while (cut > 0 && (static_cast<unsigned char>(flat[cut]) & 0xC0) == 0x80) --cut;
  }
  flat.resize(cut);
  while (!flat.empty() && flat.back() == ' ') flat.pop_back();
  return flat + "...";
}

nlohmann::json searchResponse(const facetindex::FacetIndex& index, const facetindex::FacetQuery& query,
                              const Page& page) {
  const auto result = index.search(query);
  nlohmann::json docs = nlohmann::json::array();
  const std::size_t begin = std::min(result.doc_ids.size(), (page.number - 1) * page.size);
  const std::size_t end = std::min(result.doc_ids.size(), begin + page.size);
  for (std::size_t i = begin; i < end; ++i) {
    const auto& doc = index.find(result.doc_ids[i])->doc;
    docs.push_back({{"id", doc.doc_id},
                    {"path", doc.source_path},
                    {"format", doc.format_tag},
                    {"snippet", snippet(doc.text)}});
  }
  nlohmann::json facets = nlohmann::json::object();
  for (const auto& [facet, counts] : result.facet_counts) {
    std::vector<std::pair<std::string, std::size_t>> values(counts.begin(), counts.end());
    std::stable_sort(values.begin(), values.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (values.size() > kMaxFacetValues) values.resize(kMaxFacetValues);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [value, count] : values) arr.push_back({{"value", value}, {"count", count}});
    facets[std::string(facetindex::facetName(facet))] = std::move(arr);
  }
  return {{"total", result.doc_ids.size()}, {"docs", std::move(docs)}, {"facets", std::move(facets)}};
}

nlohmann::json documentResponse(const facetindex::FacetIndex& index, std::string_view doc_id,
                                const std::vector<std::string>& hl_terms) {
  const auto* entry = index.find(doc_id);
  if (entry == nullptr) throw Error("unknown document id: " + std::string(doc_id));
  const auto& doc = entry->doc;

  std::vector<facetindex::HighlightTerm> terms;
  for (const auto& raw : hl_terms) {
    for (const auto& w : text::split(raw, ' ')) {
      if (!text::trim(w).empty()) terms.push_back({std::string(text::trim(w)), facetindex::HighlightClass::QueryTerm});
    }
  }
  if (auto it = entry->tags.find(Facet::Keywords); it != entry->tags.end()) {
    for (const auto& k : it->second) terms.push_back({k, facetindex::HighlightClass::Keyword});
  }
  const auto view = facetindex::renderQuickView(doc.text, terms);
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : view.spans) {
    spans.push_back({{"begin", s.begin},
                     {"end", s.end},
                     {"class", facetindex::toString(s.cls)},
                     {"text", doc.text.substr(s.begin, s.end - s.begin)}});
  }
  nlohmann::json tags = nlohmann::json::object();
  for (const auto& [facet, values] : entry->tags) tags[std::string(facetindex::facetName(facet))] = values;

  nlohmann::json j = {{"id", doc.doc_id},
                      {"path", doc.source_path},
                      {"format", doc.format_tag},
                      {"last_modified", formatTimestamp(doc.last_modified)},
                      {"bytes", doc.byte_size},
                      {"text", doc.text},
                      {"tags", std::move(tags)},
                      {"quick_view", {{"marked_text", view.marked_text}, {"spans", std::move(spans)}}}};
  j["author"] = doc.author ? nlohmann::json(*doc.author) : nlohmann::json(nullptr);
  return j;
}

}  // namespace facetlens::app
