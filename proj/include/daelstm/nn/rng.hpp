#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace daelstm {

/// splitmix64 finalizer applied to `x`.
std::uint64_t splitmix64_mix(std::uint64_t x);

/// Sub-seed for an independently reproducible stage: mix(seed ^ fnv1a64(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// Deterministic stream: splitmix64 state update, 53-bit uniforms and
/// Box-Muller Gaussians with the spare cached. Every draw is defined in terms
/// of next_u64(), so the same seed yields the same stream on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double gaussian();
  /// True with probability p.
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace daelstm
