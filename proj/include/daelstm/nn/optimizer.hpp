#pragma once

#include <cstddef>
#include <limits>
#include <vector>
#include <string_view>

#include "daelstm/nn/tensor.hpp"

namespace daelstm {

enum class OptimizerMethod { sgd, adam };

std::string_view optimizer_method_name(OptimizerMethod m);
OptimizerMethod optimizer_method_from_name(std::string_view name);

struct OptimizerConfig {
  double learning_rate = 0.005;
  /// Epochs without validation improvement before the rate is halved.
  std::size_t patience = 2;
  double l2 = 0.0;
  OptimizerMethod method = OptimizerMethod::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Gradient descent with L2 weight decay folded into the gradient,
/// g' = g + l2 * p, and a learning rate halved whenever validation loss
/// plateaus. `sgd` applies p <- p - lr * g'; `adam` uses bias-corrected first
/// and second moment estimates of g'.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& config);

  /// Throws DivergenceError on a non-finite gradient; parameters are left
  /// untouched in that case. The inventory must not change between calls.
  void step(const TensorList& params, const ConstTensorList& grads);
  /// Records a validation loss at an epoch boundary. Returns true when the
  /// learning rate was halved.
  bool end_epoch(double validation_loss);

  double learning_rate() const { return config_.learning_rate; }
  std::size_t halvings() const { return halvings_; }
  std::size_t steps() const { return steps_; }

 private:
  OptimizerConfig config_;
  std::size_t halvings_ = 0;
  std::size_t stale_epochs_ = 0;
  std::size_t steps_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace daelstm
