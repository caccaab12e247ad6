#include "daelstm/data/corrupt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "daelstm/errors.hpp"

namespace daelstm {

void add_gaussian_noise(std::span<double> values, double variance, Rng& rng) {
  if (!(variance >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  if (variance == 0.0) return;
  const double sd = std::sqrt(variance);
  for (double& v : values) v += sd * rng.gaussian();
}

std::size_t drop_joints(std::span<double> frame, double rate, const SkeletonSpec& skeleton, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("joint dropout rate must lie in [0, 1]");
  require_shape(frame.size() == skeleton.total_dims(), "drop_joints: frame width != skeleton dims");
  if (rate == 0.0) return 0;
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < skeleton.joint_count(); ++j) {
    if (!rng.bernoulli(rate)) continue;
    const auto [begin, end] = skeleton.channel_range(j);
    std::fill(frame.begin() + static_cast<std::ptrdiff_t>(begin), frame.begin() + static_cast<std::ptrdiff_t>(end),
              0.0);
    ++dropped;
  }
  return dropped;
}

MotionSequence corrupt_gaussian(const MotionSequence& seq, double variance, Rng& rng) {
  MotionSequence out = seq;
  add_gaussian_noise(out.frames.values(), variance, rng);
  return out;
}

MotionSequence corrupt_joint_dropout(const MotionSequence& seq, double rate, const SkeletonSpec& skeleton,
                                     Rng& rng) {
  MotionSequence out = seq;
  for (std::size_t t = 0; t < out.length(); ++t) drop_joints(out.frames.row(t), rate, skeleton, rng);
  return out;
}

}  // namespace daelstm
