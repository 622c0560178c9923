// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "facetlens/simd/kernels.hpp"

namespace facetlens::simd {

#ifndef FACETLENS_HAVE_AVX2
const KernelTable* avx2Kernels() { return nullptr; }
#endif

bool cpuSupports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(FACETLENS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isaName(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("FACETLENS_SIMD"); env && std::string(env) == "scalar") {
    return &scalarKernels();
  }
  if (cpuSupports(Isa::Avx2) && avx2Kernels() != nullptr) return avx2Kernels();
  return &scalarKernels();
}

std::atomic<const KernelTable*> g_override{nullptr};

}  // namespace

const KernelTable& active() {
  if (const KernelTable* o = g_override.load(std::memory_order_acquire)) return *o;
  static const KernelTable* const detected = detect();
  return *detected;
}

void overrideIsa(std::optional<Isa> isa) {
  if (!isa) {
    g_override.store(nullptr, std::memory_order_release);
    return;
  }
  const KernelTable* table = *isa == Isa::Avx2 ? avx2Kernels() : &scalarKernels();
  if (table == nullptr || !cpuSupports(*isa)) table = &scalarKernels();
  g_override.store(table, std::memory_order_release);
}

}  // namespace facetlens::simd
