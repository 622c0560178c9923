// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 only; callers must check cpuSupports(Isa::Avx2) first.
// FMA is deliberately not enabled so each lane rounds exactly like the scalar path.
#include <immintrin.h>

#include "facetlens/simd/kernels.hpp"

namespace facetlens::simd {

namespace {

double topicWeightsAvx2(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                        const std::int32_t* topic_totals, std::size_t n, double alpha,
                        double beta, double vbeta, double* cumulative) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vvb = _mm256_set1_pd(vbeta);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dt = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(doc_topic + k)));
    const __m256d wt = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(word_topic + k)));
    const __m256d tt = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(topic_totals + k)));
    const __m256d w = _mm256_div_pd(_mm256_mul_pd(_mm256_add_pd(dt, va), _mm256_add_pd(wt, vb)),
                                    _mm256_add_pd(tt, vvb));
    _mm256_storeu_pd(cumulative + k, w);
  }
  for (; k < n; ++k) {
    cumulative[k] = (static_cast<double>(doc_topic[k]) + alpha) *
                    (static_cast<double>(word_topic[k]) + beta) /
                    (static_cast<double>(topic_totals[k]) + vbeta);
  }
  // prefix sum stays sequential to keep the summation order of the scalar path
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += cumulative[i];
    cumulative[i] = acc;
  }
  return acc;
}

void scaleAvx2(double* values, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(values + i, _mm256_mul_pd(_mm256_loadu_pd(values + i), f));
  }
  for (; i < n; ++i) values[i] *= factor;
}

}  // namespace

const KernelTable* avx2Kernels() {
  static const KernelTable table{Isa::Avx2, &topicWeightsAvx2, &scaleAvx2};
  return &table;
}

}  // namespace facetlens::simd
