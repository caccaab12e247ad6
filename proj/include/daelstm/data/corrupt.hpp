#pragma once

#include <cstddef>
#include <span>

#include "daelstm/data/skeleton.hpp"
#include "daelstm/nn/rng.hpp"

namespace daelstm {

/// Adds i.i.d. N(0, variance) noise to every entry.
MotionSequence corrupt_gaussian(const MotionSequence& seq, double variance, Rng& rng);

/// Per frame, drops each joint with probability `rate` by zeroing its whole
/// channel group. Surviving channels are not rescaled.
MotionSequence corrupt_joint_dropout(const MotionSequence& seq, double rate, const SkeletonSpec& skeleton,
                                     Rng& rng);

void add_gaussian_noise(std::span<double> values, double variance, Rng& rng);
/// Returns the number of joints dropped from `frame`.
std::size_t drop_joints(std::span<double> frame, double rate, const SkeletonSpec& skeleton, Rng& rng);

}  // namespace daelstm
