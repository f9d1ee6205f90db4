#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace chirp::kernels {

namespace {

const KernelTable kScalar{"scalar", detail::gemm_scalar, detail::scale_rows_scalar,
                          detail::weighted_norm2_scalar};

#if defined(CHIRP_HAVE_AVX2)
const KernelTable kAvx2{"avx2", detail::gemm_avx2, detail::scale_rows_avx2,
                        detail::weighted_norm2_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* best_supported() {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &kScalar;
}

const KernelTable* from_name(std::string_view name) {
  if (name == "scalar") return &kScalar;
  if (name == "avx2") return avx2_kernels();
  if (name == "auto" || name.empty()) return best_supported();
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("CHIRP_KERNELS")) {
    if (const KernelTable* t = from_name(env)) return t;
  }
  return best_supported();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(CHIRP_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = from_name(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace chirp::kernels
