#include "daelstm/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "daelstm/errors.hpp"
#include "daelstm/simd/kernels.hpp"

namespace daelstm {

double squared_error(std::span<const double> x, std::span<const double> y) {
  require_shape(x.size() == y.size(), "squared_error: length " + std::to_string(x.size()) +
                                          " != " + std::to_string(y.size()));
  return simd::squared_distance(x, y);
}

Vector softmax(std::span<const double> logits) {
  Vector p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double peak = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& v : p) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  require_shape(label < probs.size(), "cross_entropy: label out of range");
  return -std::log(std::max(probs[label], 1e-300));
}

Vector dropout_mask(Rng& rng, std::size_t length, double rate, bool training) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1]");
  }
  Vector mask(length, 1.0);
  if (!training) return mask;
  for (double& m : mask) {
    if (rng.bernoulli(rate)) m = 0.0;
  }
  return mask;
}

}  // namespace daelstm
