// SPDX-License-Identifier: Apache-2.0
#include "facetlens/supervised.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "facetlens/error.hpp"
#include "facetlens/simd/kernels.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::supervised {

FeatureSpace FeatureSpace::build(std::span<const std::set<std::string>> documents) {
  std::set<std::string> all;
  for (const auto& doc : documents) all.insert(doc.begin(), doc.end());
  FeatureSpace space;
  space.words_.assign(all.begin(), all.end());
  for (std::uint32_t i = 0; i < space.words_.size(); ++i) space.ids_.emplace(space.words_[i], i);
  return space;
}

std::optional<std::uint32_t> FeatureSpace::id(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureVector FeatureSpace::encode(const std::set<std::string>& words) const {
  FeatureVector fv;
  for (const auto& w : words) {
    if (auto i = id(w)) fv.entries.emplace_back(*i, 1.0);
  }
  if (fv.entries.empty()) return fv;
  std::sort(fv.entries.begin(), fv.entries.end());
  const double norm = 1.0 / std::sqrt(static_cast<double>(fv.entries.size()));
  for (auto& e : fv.entries) e.second = norm;
  return fv;
}

double LinearModel::margin(const FeatureVector& x) const {
  double m = bias;
  for (const auto& [i, v] : x.entries) {
    if (i < weights.size()) m += weights[i] * v;
  }
  return m;
}

double LabeledSet::pPlus() const {
  return size() == 0 ? 0.0 : static_cast<double>(positives.size()) / static_cast<double>(size());
}

double LabeledSet::pMinus() const {
  return size() == 0 ? 0.0 : static_cast<double>(negatives.size()) / static_cast<double>(size());
}

namespace {

template <typename T>
void seededShuffle(std::vector<T>& v, std::mt19937_64& rng) {
  // Fisher-Yates with an explicit draw so the order is stable across stdlibs
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

const FeatureVector& featuresOf(const FeatureTable& features, const std::string& id) {
  const auto it = features.find(id);
  if (it == features.end()) throw Error("no features for document " + id);
  return it->second;
}

}  // namespace

LinearModel trainLinearSVM(const LabeledSet& train, const FeatureTable& features,
                           std::size_t dimension, const SvmOptions& options, std::string label) {
  if (train.positives.empty() || train.negatives.empty()) throw Error("degenerate training set");
  if (options.lambda <= 0.0) throw Error("SVM lambda must be positive");
  {
    const std::set<std::string> pos(train.positives.begin(), train.positives.end());
    for (const auto& n : train.negatives) {
      if (pos.contains(n)) throw Error("document " + n + " is labeled both positive and negative");
    }
  }
  struct Example {
    const FeatureVector* x;
    double y;
  };
  std::vector<Example> examples;
  for (const auto& id : train.positives) examples.push_back({&featuresOf(features, id), 1.0});
  for (const auto& id : train.negatives) examples.push_back({&featuresOf(features, id), -1.0});

  // the bias rides along as weight[dimension] on a constant feature
  std::vector<double> w(dimension + 1, 0.0);
  auto score = [&](const FeatureVector& x) {
    double m = w[dimension];
    for (const auto& [i, v] : x.entries) {
      if (i < dimension) m += w[i] * v;
    }
    return m;
  };

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    seededShuffle(order, rng);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (options.lambda * static_cast<double>(t));
      const Example& ex = examples[idx];
      const double m = ex.y * score(*ex.x);
      simd::scale(w, 1.0 - eta * options.lambda);
      if (m < 1.0) {
        const double step = eta * ex.y;
        for (const auto& [i, v] : ex.x->entries) {
          if (i < dimension) w[i] += step * v;
        }
        w[dimension] += step;
      }
    }
  }

  LinearModel model;
  model.label = std::move(label);
  model.bias = w[dimension];
  w.pop_back();
  model.weights = std::move(w);
  model.training_manifest = train.positives;
  model.training_manifest.insert(model.training_manifest.end(), train.negatives.begin(),
                                 train.negatives.end());
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    if ((model.margin(*ex.x) > 0.0) == (ex.y > 0.0)) ++correct;
  }
  model.training_accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return model;
}

std::string predictTag(std::span<const LinearModel> models, const FeatureVector& x) {
  const LinearModel* best = nullptr;
  double best_margin = 0.0;
  for (const auto& m : models) {
    const double margin = m.margin(x);
    if (margin > best_margin) {
      best_margin = margin;
      best = &m;
    }
  }
  return best ? best->label : std::string(kOtherTag);
}

std::vector<std::string> selectInformativeNegatives(const LinearModel& model,
                                                    std::span<const std::string> pool,
                                                    const FeatureTable& features, std::size_t n) {
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(pool.size());
  for (const auto& id : pool) scored.emplace_back(std::abs(model.margin(featuresOf(features, id))), id);
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(scored[i].second));
  return out;
}

LabeledSet balanceTrainingSet(std::span<const std::string> positives,
                              std::span<const std::string> negatives, std::uint64_t seed) {
  if (positives.empty() || negatives.empty()) throw Error("degenerate training set");
  LabeledSet out{{positives.begin(), positives.end()}, {negatives.begin(), negatives.end()}};
  const std::size_t m = std::min(positives.size(), negatives.size());
  std::mt19937_64 rng(seed);
  for (auto* cls : {&out.positives, &out.negatives}) {
    if (cls->size() > m) {
      seededShuffle(*cls, rng);
      cls->resize(m);
      std::sort(cls->begin(), cls->end());
    }
  }
  return out;
}

LinearModel trainWithActiveLearning(std::string label, std::span<const std::string> positives,
                                    std::span<const std::string> negative_pool,
                                    const FeatureTable& features, std::size_t dimension,
                                    const ActiveLearningOptions& options) {
  if (positives.empty() || negative_pool.empty()) throw Error("degenerate training set");
  std::mt19937_64 rng(options.seed);

  std::vector<std::string> pool(negative_pool.begin(), negative_pool.end());
  std::vector<std::string> bootstrap = pool;
  seededShuffle(bootstrap, rng);
  const std::size_t n_seed =
      std::min(pool.size(), options.seed_negatives ? options.seed_negatives : positives.size());
  bootstrap.resize(n_seed);

  LabeledSet seed_set{{positives.begin(), positives.end()}, bootstrap};
  const LinearModel seed_model = trainLinearSVM(seed_set, features, dimension, options.svm, label);

  const std::size_t n_inf = std::min(
      pool.size(), options.informative_negatives ? options.informative_negatives : 3 * positives.size());
  const auto informative = selectInformativeNegatives(seed_model, pool, features, n_inf);

  const LabeledSet final_set = balanceTrainingSet(positives, informative, rng());
  return trainLinearSVM(final_set, features, dimension, options.svm, std::move(label));
}

// --- information gain -----------------------------------------------------

double entropy(std::size_t positives, std::size_t negatives) {
  const std::size_t total = positives + negatives;
  if (total == 0) throw Error("entropy of an empty set");
  auto term = [&](std::size_t c) {
    if (c == 0) return 0.0;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    return -p * std::log2(p);
  };
  return term(positives) + term(negatives);
}

double entropy(const LabeledSet& set) { return entropy(set.positives.size(), set.negatives.size()); }

namespace {

bool contains(const PresenceIndex& presence, const std::string& doc, std::string_view word) {
  const auto it = presence.find(doc);
  return it != presence.end() && it->second.contains(std::string(word));
}

double gainFromCounts(std::size_t pos, std::size_t neg, std::size_t pos_w, std::size_t neg_w) {
  const double total = static_cast<double>(pos + neg);
  double gain = entropy(pos, neg);
  const std::size_t with = pos_w + neg_w;
  const std::size_t without = pos + neg - with;
  if (with > 0) gain -= static_cast<double>(with) / total * entropy(pos_w, neg_w);
  if (without > 0) gain -= static_cast<double>(without) / total * entropy(pos - pos_w, neg - neg_w);
  return gain;
}

}  // namespace

double informationGain(std::string_view word, const LabeledSet& set, const PresenceIndex& presence) {
  if (set.size() == 0) throw Error("information gain over an empty set");
  std::size_t pos_w = 0, neg_w = 0;
  for (const auto& d : set.positives) pos_w += contains(presence, d, word);
  for (const auto& d : set.negatives) neg_w += contains(presence, d, word);
  return gainFromCounts(set.positives.size(), set.negatives.size(), pos_w, neg_w);
}

std::vector<RankedTerm> topDiscriminativeTerms(const LabeledSet& set, const PresenceIndex& presence,
                                               std::size_t n) {
  if (set.size() == 0) throw Error("information gain over an empty set");
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // word -> (pos, neg)
  auto tally = [&](const std::vector<std::string>& docs, bool positive) {
    for (const auto& d : docs) {
      const auto it = presence.find(d);
      if (it == presence.end()) continue;
      for (const auto& w : it->second) {
        auto& c = counts[w];
        (positive ? c.first : c.second) += 1;
      }
    }
  };
  tally(set.positives, true);
  tally(set.negatives, false);

  std::vector<RankedTerm> ranked;
  ranked.reserve(counts.size());
  for (const auto& [w, c] : counts) {
    ranked.push_back({w, gainFromCounts(set.positives.size(), set.negatives.size(), c.first, c.second),
                      c.first + c.second});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedTerm& a, const RankedTerm& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.doc_freq != b.doc_freq) return a.doc_freq > b.doc_freq;
    return a.term < b.term;
  });
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

// --- report type ------------------------------------------------------------

std::string_view toString(ReportType type) {
  switch (type) {
    case ReportType::Technical:
      return "TECHNICAL";
    case ReportType::Test:
      return "TEST";
    case ReportType::Programmatic:
      return "PROGRAMMATIC";
    case ReportType::Other:
      return "OTHER";
  }
  return "OTHER";
}

std::optional<ReportType> parseReportType(std::string_view name) {
  const auto upper = [&] {
    std::string s(name);
    for (char& c : s) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return s;
  }();
  for (auto t : kReportTypes) {
    if (toString(t) == upper) return t;
  }
  return std::nullopt;
}

ReportType classifyReportType(const ReportTypeModels& models, const FeatureVector& x) {
  std::optional<std::size_t> best;
  double best_margin = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i]) continue;
    const double m = models[i]->margin(x);
    if (!best || m > best_margin) {
      best_margin = m;
      best = i;
    }
  }
  return best ? kReportTypes[*best] : ReportType::Other;
}

ReportTypeModels trainReportTypeModels(const std::map<std::string, ReportType>& labels,
                                       const FeatureTable& features, std::size_t dimension,
                                       const SvmOptions& options) {
  std::set<ReportType> present;
  for (const auto& [doc, type] : labels) present.insert(type);
  if (present.size() < 2) throw Error("report type labels need at least two categories");
  ReportTypeModels models;
  for (std::size_t i = 0; i < kReportTypes.size(); ++i) {
    if (!present.count(kReportTypes[i])) continue;
    LabeledSet set;
    for (const auto& [doc, type] : labels) {
      (type == kReportTypes[i] ? set.positives : set.negatives).push_back(doc);
    }
    models[i] = trainLinearSVM(set, features, dimension, options, std::string(toString(kReportTypes[i])));
  }
  return models;
}

// --- persistence ------------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "facetlens-linear";
constexpr int kModelVersion = 1;

std::string fmtDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void LinearModel::save(std::ostream& out, const FeatureSpace& space) const {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "label\t" << label << '\n';
  out << "bias\t" << fmtDouble(bias) << '\n';
  out << "accuracy\t" << fmtDouble(training_accuracy) << '\n';
  for (std::size_t i = 0; i < weights.size() && i < space.dimension(); ++i) {
    if (weights[i] != 0.0) out << "w\t" << space.words()[i] << '\t' << fmtDouble(weights[i]) << '\n';
  }
  for (const auto& id : training_manifest) out << "train\t" << id << '\n';
}

LinearModel LinearModel::load(std::istream& in, const FeatureSpace& space) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty model file");
  {
    std::istringstream h(line);
    std::string magic;
    int version = 0;
    if (!(h >> magic >> version) || magic != kModelMagic) throw Error("not a linear model file");
    if (version != kModelVersion) throw Error("unsupported model version " + std::to_string(version));
  }
  LinearModel m;
  m.weights.assign(space.dimension(), 0.0);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = text::split(line, '\t');
    auto bad = [&] { return Error("malformed model line " + std::to_string(line_no)); };
    try {
      if (cols[0] == "label" && cols.size() == 2) {
        m.label = cols[1];
      } else if (cols[0] == "bias" && cols.size() == 2) {
        m.bias = std::stod(cols[1]);
      } else if (cols[0] == "accuracy" && cols.size() == 2) {
        m.training_accuracy = std::stod(cols[1]);
      } else if (cols[0] == "w" && cols.size() == 3) {
        if (auto id = space.id(cols[1])) m.weights[*id] = std::stod(cols[2]);
      } else if (cols[0] == "train" && cols.size() == 2) {
        m.training_manifest.push_back(cols[1]);
      } else {
        throw bad();
      }
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  return m;
}

std::vector<std::pair<std::string, std::string>> parseManifest(std::string_view content) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 2 || text::trim(cols[0]).empty() || text::trim(cols[1]).empty()) {
      throw Error("manifest line " + std::to_string(line_no) + ": expected label<TAB>doc_id");
    }
    out.emplace_back(std::string(text::trim(cols[0])), std::string(text::trim(cols[1])));
  }
  return out;
}

}  // namespace facetlens::supervised
