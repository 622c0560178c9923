// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// optional AVX2 variants. The variant is chosen once at runtime from CPU
// support; FACETLENS_SIMD=scalar in the environment forces the reference path.
//
// Every variant performs the same IEEE operations per lane in the same order,
// so results are bit-identical across variants (the tests check this).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace facetlens::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;

  // Unnormalized collapsed-Gibbs topic weights
  //   w[k] = (doc_topic[k] + alpha) * (word_topic[k] + beta) / (topic_totals[k] + vbeta)
  // written as a running prefix sum into cumulative[0..n). Returns the total.
  double (*topic_weights)(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                          const std::int32_t* topic_totals, std::size_t n, double alpha,
                          double beta, double vbeta, double* cumulative);

  // values[i] *= factor
  void (*scale)(double* values, std::size_t n, double factor);
};

const KernelTable& scalarKernels();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2Kernels();

bool cpuSupports(Isa isa);
std::string_view isaName(Isa isa);

/// The table selected for this process. Thread-safe; resolved on first use.
const KernelTable& active();

/// Test hook: pin the dispatch to one variant (nullopt restores auto-detect).
/// Not thread-safe with concurrent kernel use.
void overrideIsa(std::optional<Isa> isa);

inline double topicWeights(std::span<const std::int32_t> doc_topic,
                           std::span<const std::int32_t> word_topic,
                           std::span<const std::int32_t> topic_totals, double alpha, double beta,
                           double vbeta, std::span<double> cumulative) {
  return active().topic_weights(doc_topic.data(), word_topic.data(), topic_totals.data(),
                                cumulative.size(), alpha, beta, vbeta, cumulative.data());
}

inline void scale(std::span<double> values, double factor) {
  active().scale(values.data(), values.size(), factor);
}

}  // namespace facetlens::simd
