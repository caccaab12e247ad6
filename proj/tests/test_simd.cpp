#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "daelstm/nn/rng.hpp"
#include "daelstm/simd/kernels.hpp"

using namespace daelstm;

namespace {

std::vector<const simd::KernelTable*> available_tables() {
  std::vector<const simd::KernelTable*> out{&simd::scalar_table()};
  if (const auto* t = simd::avx2_table()) out.push_back(t);
  if (const auto* t = simd::neon_table()) out.push_back(t);
  return out;
}

// Reordered sums differ from the sequential one by at most ~n ulp of the
// absolute sum.
double sum_bound(const std::vector<double>& a, const std::vector<double>& b, bool diff) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = diff ? (a[i] - b[i]) : a[i] * b[i];
    s += diff ? t * t : std::abs(t);
  }
  return 4.0 * static_cast<double>(a.size() + 1) * 2.220446049250313e-16 * s;
}

struct RestoreActive {
  simd::Isa saved = simd::active().isa;
  ~RestoreActive() { simd::select(saved); }
};

}  // namespace

TEST_CASE("every kernel table matches the scalar reference on all tail lengths") {
  Rng rng(7);
  const auto& ref = simd::scalar_table();
  for (const auto* table : available_tables()) {
    CAPTURE(simd::isa_name(table->isa));
    for (std::size_t n = 0; n <= 67; ++n) {
      std::vector<double> a(n), b(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform(-3.0, 3.0);
        b[i] = rng.uniform(-3.0, 3.0);
        y[i] = rng.uniform(-1.0, 1.0);
      }
      CHECK(std::abs(table->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= sum_bound(a, b, false));
      CHECK(std::abs(table->squared_distance(a.data(), b.data(), n) - ref.squared_distance(a.data(), b.data(), n)) <=
            sum_bound(a, b, true));

      std::vector<double> y_ref = y;
      ref.axpy(0.37, a.data(), y_ref.data(), n);
      table->axpy(0.37, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - y_ref[i]) <= 1e-15 * (1.0 + std::abs(y_ref[i])));
    }
  }
}

TEST_CASE("scalar reference kernels") {
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {2.0, 2.0, 2.0};
  CHECK(simd::detail::dot_scalar(a, b, 3) == 12.0);
  CHECK(simd::detail::squared_distance_scalar(a, b, 3) == 2.0);
  double y[] = {1.0, 1.0, 1.0};
  simd::detail::axpy_scalar(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  CHECK(simd::detail::dot_scalar(a, b, 0) == 0.0);
}

TEST_CASE("select switches the process table") {
  RestoreActive restore;
  simd::select(simd::Isa::scalar);
  CHECK(simd::active().isa == simd::Isa::scalar);
  for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon}) {
    const bool available = (isa == simd::Isa::avx2 ? simd::avx2_table() : simd::neon_table()) != nullptr;
    if (available) {
      simd::select(isa);
      CHECK(simd::active().isa == isa);
    } else {
      CHECK_THROWS_AS(simd::select(isa), std::runtime_error);
    }
  }
}
