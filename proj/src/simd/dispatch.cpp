#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "daelstm/simd/kernels.hpp"

namespace daelstm::simd {

namespace detail {
#if defined(DAELSTM_HAS_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
#endif
#if defined(DAELSTM_HAS_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_neon(const double* a, const double* b, std::size_t n);
#endif
}  // namespace detail

namespace {

constexpr KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::axpy_scalar,
                              detail::squared_distance_scalar};
#if defined(DAELSTM_HAS_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::axpy_avx2,
                            detail::squared_distance_avx2};
#endif
#if defined(DAELSTM_HAS_NEON)
constexpr KernelTable kNeon{Isa::neon, detail::dot_neon, detail::axpy_neon,
                            detail::squared_distance_neon};
#endif

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
      return avx2_table();
    case Isa::neon:
      return neon_table();
  }
  return nullptr;
}

const KernelTable* pick_default() {
  if (const char* forced = std::getenv("DAELSTM_SIMD")) {
    const std::string name(forced);
    const KernelTable* t = nullptr;
    if (name == "scalar") t = &kScalar;
    if (name == "avx2") t = avx2_table();
    if (name == "neon") t = neon_table();
    if (t != nullptr) return t;
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(DAELSTM_HAS_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(DAELSTM_HAS_NEON)
  return &kNeon;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) {
    throw std::runtime_error("kernel table unavailable: " + std::string(isa_name(isa)));
  }
  current().store(t, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace daelstm::simd
