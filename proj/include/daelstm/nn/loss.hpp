#pragma once

#include <cstddef>
#include <span>

#include "daelstm/nn/matrix.hpp"
#include "daelstm/nn/rng.hpp"

namespace daelstm {

/// Sum (not mean) of squared differences.
double squared_error(std::span<const double> x, std::span<const double> y);

/// Numerically stable softmax.
Vector softmax(std::span<const double> logits);

/// -log p[label], with p floored at 1e-300.
double cross_entropy(std::span<const double> probs, std::size_t label);

/// Binary keep-mask: each entry is 0 with probability `rate`, else 1.
/// With `training == false` the mask is all ones and no draws are made.
Vector dropout_mask(Rng& rng, std::size_t length, double rate, bool training = true);

}  // namespace daelstm
