#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

#include "daelstm/data/skeleton.hpp"

namespace daelstm {

/// Per-feature min/max fitted on training frames only.
struct NormalizationStats {
  Vector min;
  Vector max;

  std::size_t dims() const { return min.size(); }
  bool is_constant(std::size_t i) const { return max[i] == min[i]; }

  nlohmann::json to_json() const;
  static NormalizationStats from_json(const nlohmann::json& doc);
  bool operator==(const NormalizationStats&) const = default;
};

NormalizationStats fit_normalization(std::span<const MotionSequence> train);

/// x' = (x - min) / (max - min); constant features map to 0. Values outside
/// the training range extrapolate past [0, 1]; their count is written to
/// `out_of_range` when non-null.
MotionSequence normalize(const MotionSequence& seq, const NormalizationStats& stats,
                         std::size_t* out_of_range = nullptr);
MotionSequence denormalize(const MotionSequence& seq, const NormalizationStats& stats);

void normalize_frame(std::span<double> frame, const NormalizationStats& stats);
void denormalize_frame(std::span<double> frame, const NormalizationStats& stats);

}  // namespace daelstm
