// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace facetlens::supervised {

/// Sparse binary-presence vector, L2-normalized. Entries sorted by word id.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

/// Word <-> id map shared by every model trained on one corpus.
class FeatureSpace {
 public:
  /// Assigns ids in lexicographic order of the distinct words.
  static FeatureSpace build(std::span<const std::set<std::string>> documents);

  std::size_t dimension() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<std::uint32_t> id(std::string_view word) const;

  /// Unknown words are ignored; an empty result has no entries.
  FeatureVector encode(const std::set<std::string>& words) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

using FeatureTable = std::map<std::string, FeatureVector>;  // doc_id -> features

struct LinearModel {
  std::string label;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<std::string> training_manifest;  ///< doc ids used for the final fit
  double training_accuracy = 0.0;

  double margin(const FeatureVector& x) const;

  /// `facetlens-linear 1` header, `label`, `bias`, then `word<TAB>weight`
  /// lines for non-zero weights and `train<TAB>doc_id` lines.
  void save(std::ostream& out, const FeatureSpace& space) const;
  static LinearModel load(std::istream& in, const FeatureSpace& space);
};

/// Positive and negative document ids; the two sets are disjoint.
struct LabeledSet {
  std::vector<std::string> positives;
  std::vector<std::string> negatives;

  std::size_t size() const { return positives.size() + negatives.size(); }
  double pPlus() const;
  double pMinus() const;
};

struct SvmOptions {
  std::size_t epochs = 50;
  double lambda = 1e-4;
  std::uint64_t seed = 1;
};

/// Hinge loss with L2 penalty minimized by Pegasos-style stochastic
/// subgradient descent over a seeded shuffle. Throws facetlens::Error when a
/// class is empty ("degenerate training set"), when a doc id is in both
/// classes, or when features are missing. Contradictory training data shows
/// up as training_accuracy < 1.
LinearModel trainLinearSVM(const LabeledSet& train, const FeatureTable& features,
                           std::size_t dimension, const SvmOptions& options = {},
                           std::string label = "positive");

inline constexpr std::string_view kOtherTag = "other";

/// Tag of the model with the largest strictly positive margin, else "other".
/// Ties go to the earlier model.
std::string predictTag(std::span<const LinearModel> models, const FeatureVector& x);

/// The n pool documents closest to the decision boundary (smallest |margin|),
/// ties by doc id.
std::vector<std::string> selectInformativeNegatives(const LinearModel& model,
                                                    std::span<const std::string> pool,
                                                    const FeatureTable& features, std::size_t n);

/// Subsamples the larger class uniformly (seeded) down to the smaller size.
LabeledSet balanceTrainingSet(std::span<const std::string> positives,
                              std::span<const std::string> negatives, std::uint64_t seed);

struct ActiveLearningOptions {
  /// Random negatives for the bootstrap model; 0 means as many as positives.
  std::size_t seed_negatives = 0;
  /// Informative negatives kept from the pool; 0 means 3x the positives.
  std::size_t informative_negatives = 0;
  SvmOptions svm;
  std::uint64_t seed = 1;
};

/// Bootstrap model on positives + random negatives, informative-negative
/// selection over the pool, class balancing, final fit.
LinearModel trainWithActiveLearning(std::string label, std::span<const std::string> positives,
                                    std::span<const std::string> negative_pool,
                                    const FeatureTable& features, std::size_t dimension,
                                    const ActiveLearningOptions& options = {});

// --- information gain -----------------------------------------------------

/// doc_id -> distinct words present in the document.
using PresenceIndex = std::map<std::string, std::set<std::string>>;

/// -p+ log2 p+ - p- log2 p-, with 0 log2 0 = 0. Throws on an empty set.
double entropy(std::size_t positives, std::size_t negatives);
double entropy(const LabeledSet& set);

/// H(D) - |Dw|/|D| H(Dw) - |D\Dw|/|D| H(D\Dw). Throws on an empty set.
double informationGain(std::string_view word, const LabeledSet& set, const PresenceIndex& presence);

struct RankedTerm {
  std::string term;
  double gain = 0.0;
  std::size_t doc_freq = 0;  ///< documents of the set containing the term
};

/// Highest-gain words over the set's vocabulary; ties by doc_freq desc, then
/// lexicographic.
std::vector<RankedTerm> topDiscriminativeTerms(const LabeledSet& set, const PresenceIndex& presence,
                                               std::size_t n = 25);

// --- report type ------------------------------------------------------------

enum class ReportType { Technical, Test, Programmatic, Other };
inline constexpr std::array<ReportType, 4> kReportTypes{ReportType::Technical, ReportType::Test,
                                                        ReportType::Programmatic, ReportType::Other};
std::string_view toString(ReportType type);
std::optional<ReportType> parseReportType(std::string_view name);

/// One-vs-rest models indexed in kReportTypes order; a category without
/// labeled positives has no model.
using ReportTypeModels = std::array<std::optional<LinearModel>, 4>;

/// Argmax margin over present models; ties resolve to the earlier category.
/// OTHER when no model is present.
ReportType classifyReportType(const ReportTypeModels& models, const FeatureVector& x);

/// Fits one binary model per labeled category (category vs the rest).
/// Throws unless the labels cover at least two categories.
ReportTypeModels trainReportTypeModels(const std::map<std::string, ReportType>& labels,
                                       const FeatureTable& features, std::size_t dimension,
                                       const SvmOptions& options = {});

// --- training manifest -----------------------------------------------------

/// `label<TAB>doc_id` lines; blank lines and `#` comments skipped.
/// Throws facetlens::Error with the line number on malformed lines.
std::vector<std::pair<std::string, std::string>> parseManifest(std::string_view content);

}  // namespace facetlens::supervised
