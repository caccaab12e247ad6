#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "daelstm/nn/matrix.hpp"

namespace daelstm {

struct CurriculumStage {
  double noise_variance = 0.0;
  double dropout_rate = 0.0;
};

/// Staged corruption levels. The stage count is the longer of the two lists;
/// a shorter list is stretched over the stages (value index = s * n / S) and an
/// empty list contributes 0 throughout. `reverse` walks the stages backwards.
struct CurriculumSchedule {
  Vector noise_variance;
  Vector dropout_rate;
  bool reverse = false;

  /// Joint dropout + Gaussian noise: [0.01, 0.05, 0.1] and
  /// [0.01, 0.02, 0.04, 0.08, 0.1].
  static CurriculumSchedule dropout_noise();
  /// Gaussian noise only.
  static CurriculumSchedule gaussian_only();
  /// No corruption (plain autoencoder / teacher forcing on clean inputs).
  static CurriculumSchedule none();

  void validate() const;
  std::size_t stage_count() const;
  CurriculumStage stage(std::size_t s) const;

  /// floor(total / S) epochs per stage, the remainder going to the last stage.
  std::vector<std::size_t> epochs_per_stage(std::size_t total_epochs) const;
  std::size_t stage_for_epoch(std::size_t epoch, std::size_t total_epochs) const;
  /// Stage covering `fraction` in [0, 1] of a run split into S equal parts.
  std::size_t stage_for_progress(double fraction) const;

  nlohmann::json to_json() const;
  static CurriculumSchedule from_json(const nlohmann::json& doc);
};

}  // namespace daelstm
