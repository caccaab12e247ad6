#include "daelstm/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "daelstm/errors.hpp"
#include "daelstm/nn/matrix.hpp"
#include "daelstm/simd/kernels.hpp"

namespace daelstm {

std::string_view optimizer_method_name(OptimizerMethod m) { return m == OptimizerMethod::sgd ? "sgd" : "adam"; }

OptimizerMethod optimizer_method_from_name(std::string_view name) {
  if (name == "sgd") return OptimizerMethod::sgd;
  if (name == "adam") return OptimizerMethod::adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(const OptimizerConfig& config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) throw ConfigError("learning rate must be strictly positive");
  if (!(config_.l2 >= 0.0)) throw ConfigError("l2 coefficient must be nonnegative");
  if (config_.patience == 0) throw ConfigError("plateau patience must be at least 1 epoch");
  if (!(config_.beta1 >= 0.0 && config_.beta1 < 1.0 && config_.beta2 >= 0.0 && config_.beta2 < 1.0)) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (!(config_.epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
}

void Optimizer::step(const TensorList& params, const ConstTensorList& grads) {
  require_shape(params.size() == grads.size(), "optimizer: parameter/gradient inventory mismatch");
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_shape(params[i].values.size() == grads[i].values.size(),
                  "optimizer: shape mismatch for " + params[i].name);
    if (!all_finite(grads[i].values)) {
      throw DivergenceError("non-finite gradient in " + params[i].name);
    }
    total += params[i].values.size();
  }
  ++steps_;
  const double lr = config_.learning_rate;
  const double l2 = config_.l2;
  if (config_.method == OptimizerMethod::sgd) {
    const double decay = 1.0 - lr * l2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (l2 != 0.0) {
        for (double& p : params[i].values) p *= decay;
      }
      simd::axpy(-lr, grads[i].values, params[i].values);
    }
    return;
  }

  if (m_.empty()) {
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  }
  require_shape(m_.size() == total, "optimizer: parameter inventory changed between steps");
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  std::size_t k = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].values;
    const auto g = grads[i].values;
    for (std::size_t j = 0; j < p.size(); ++j, ++k) {
      const double gj = g[j] + l2 * p[j];
      m_[k] = b1 * m_[k] + (1.0 - b1) * gj;
      v_[k] = b2 * v_[k] + (1.0 - b2) * gj * gj;
      p[j] -= lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + config_.epsilon);
    }
  }
}

bool Optimizer::end_epoch(double validation_loss) {
  if (validation_loss < best_) {
    best_ = validation_loss;
    stale_epochs_ = 0;
    return false;
  }
  if (++stale_epochs_ >= config_.patience) {
    config_.learning_rate *= 0.5;
    ++halvings_;
    stale_epochs_ = 0;
    return true;
  }
  return false;
}

}  // namespace daelstm
