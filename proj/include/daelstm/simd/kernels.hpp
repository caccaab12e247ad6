#pragma once

// Data-parallel f64 primitives behind every dense and recurrent inner loop.
//
// A scalar reference implementation is always built. AVX2+FMA (x86-64) and
// NEON (aarch64) variants are compiled when the toolchain targets them and
// chosen at first use when the running CPU supports them. Setting the
// environment variable DAELSTM_SIMD=scalar|avx2|neon forces a table.
//
// Variants agree with the reference to rounding; they are not bit-identical
// because lane-wise accumulation reorders the sums. A single process always
// uses one table, so runs on the same machine stay bit-reproducible.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace daelstm::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr unless built with AVX2 support and the CPU reports avx2+fma.
const KernelTable* avx2_table();
/// nullptr unless built for aarch64.
const KernelTable* neon_table();

const KernelTable& active();
/// Switches the process-wide table. Throws std::runtime_error if `isa` is
/// unavailable. Intended for tests and benchmarks; not thread-safe with
/// concurrent kernel calls.
void select(Isa isa);
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
}  // namespace detail

}  // namespace daelstm::simd
