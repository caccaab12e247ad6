#include "daelstm/nn/tensor.hpp"

#include <cmath>

#include "daelstm/simd/kernels.hpp"

namespace daelstm {

ConstTensorList const_view(const TensorList& tensors) {
  ConstTensorList out;
  out.reserve(tensors.size());
  for (const auto& t : tensors) out.push_back({t.name, t.shape, t.values});
  return out;
}

double global_norm(const ConstTensorList& tensors) {
  double sq = 0.0;
  for (const auto& t : tensors) sq += simd::dot(t.values, t.values);
  return std::sqrt(sq);
}

double clip_global_norm(const TensorList& tensors, double max_norm) {
  const double norm = global_norm(const_view(tensors));
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& t : tensors) {
      for (double& v : t.values) v *= scale;
    }
  }
  return norm;
}

bool same_inventory(const ConstTensorList& a, const ConstTensorList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].shape != b[i].shape) return false;
  }
  return true;
}

std::vector<double> flatten(const ConstTensorList& tensors) {
  std::vector<double> out;
  for (const auto& t : tensors) out.insert(out.end(), t.values.begin(), t.values.end());
  return out;
}

std::size_t parameter_count(const ConstTensorList& tensors) {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.values.size();
  return n;
}

}  // namespace daelstm
