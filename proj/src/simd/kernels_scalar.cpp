// SPDX-License-Identifier: Apache-2.0
#include "facetlens/simd/kernels.hpp"

namespace facetlens::simd {

namespace {

double topicWeightsScalar(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                          const std::int32_t* topic_totals, std::size_t n, double alpha,
                          double beta, double vbeta, double* cumulative) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = (static_cast<double>(doc_topic[k]) + alpha) *
                     (static_cast<double>(word_topic[k]) + beta) /
                     (static_cast<double>(topic_totals[k]) + vbeta);
    acc += w;
    cumulative[k] = acc;
  }
  return acc;
}

void scaleScalar(double* values, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) values[i] *= factor;
}

}  // namespace

const KernelTable& scalarKernels() {
  static const KernelTable table{Isa::Scalar, &topicWeightsScalar, &scaleScalar};
  return table;
}

}  // namespace facetlens::simd
