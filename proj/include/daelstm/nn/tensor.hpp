#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace daelstm {

/// Named, shaped window onto a parameter (or gradient) buffer. Models expose
/// their parameters as an ordered inventory of these; a gradient container
/// is a zeroed model of the same type, so inventories line up by index.
struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<double> values;
};

struct ConstTensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<const double> values;
};

using TensorList = std::vector<TensorRef>;
using ConstTensorList = std::vector<ConstTensorRef>;

ConstTensorList const_view(const TensorList& tensors);

double global_norm(const ConstTensorList& tensors);
/// Rescales all tensors so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping. max_norm <= 0 disables clipping.
double clip_global_norm(const TensorList& tensors, double max_norm);
/// Same names and shapes in the same order.
bool same_inventory(const ConstTensorList& a, const ConstTensorList& b);
/// Flattened copy of every value, in inventory order.
std::vector<double> flatten(const ConstTensorList& tensors);
std::size_t parameter_count(const ConstTensorList& tensors);

}  // namespace daelstm
