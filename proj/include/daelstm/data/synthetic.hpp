#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "daelstm/data/skeleton.hpp"
#include "daelstm/nn/rng.hpp"

namespace daelstm {

/// Parametric action class. For feature j at time t (seconds):
///   periodic:   x_j = m_j + A_j sin(2 pi f_j t + phi_j) + eps
///   aperiodic:  x_j = m_j + A_j (sin(2 pi f_j t + phi_j) + sin(2 pi f_j sqrt(2) t)) / 2 + eps
/// with eps ~ N(0, noise_variance). Each generated sequence starts at a time
/// drawn uniformly from [0, start_jitter_s) so sequences of one class differ
/// in phase as well as noise.
///
/// t is a shared motion clock rather than wall time. With tempo_spread r a
/// sequence runs at a speed s drawn from U(1 - r, 1 + r). With tempo_wander w
/// the clock advances by s * (1 + u) per second, where u is a stationary
/// Ornstein-Uhlenbeck process with standard deviation w and correlation time
/// wander_time_s, so tempo drifts smoothly within a sequence while the pose
/// stays on the class's manifold. With r = w = 0, t is wall time.
struct SyntheticActionSpec {
  int class_id = 0;
  std::string name;
  bool periodic = true;
  Vector amplitude;
  Vector frequency;  // Hz
  Vector phase;      // radians
  Vector offset;
  double noise_variance = 1e-4;
  double start_jitter_s = 0.0;
  double tempo_spread = 0.0;
  double tempo_wander = 0.0;
  double wander_time_s = 1.0;

  std::size_t dims() const { return offset.size(); }
  void validate() const;
  nlohmann::json to_json() const;
  static SyntheticActionSpec from_json(const nlohmann::json& doc);
};

/// T = floor(duration_s * fps) frames labelled with the spec's class id.
MotionSequence generate_synthetic(const SyntheticActionSpec& spec, double duration_s, double fps, Rng& rng);

struct SyntheticRoster {
  SkeletonSpec skeleton;
  std::vector<SyntheticActionSpec> classes;

  nlohmann::json to_json() const;
  static SyntheticRoster from_json(const nlohmann::json& doc);
};

/// Three classes over 12 joints x 3 channels: 0 "walk-like" (periodic, 1 and
/// 2 Hz components), 1 "eat-like" (aperiodic), 2 "idle" (constant pose).
SyntheticRoster default_roster(std::uint64_t seed);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Stratified by label: within each label group (in first-seen order) the
/// members are shuffled and round(n * test_fraction) go to test,
/// round(n * validation_fraction) to validation, the rest to train.
/// Returned index lists are sorted.
SplitIndices split_indices(const std::vector<std::optional<int>>& labels, double validation_fraction,
                           double test_fraction, Rng& rng);

struct DatasetSplit {
  std::vector<MotionSequence> train;
  std::vector<MotionSequence> validation;
  std::vector<MotionSequence> test;
};

DatasetSplit split_dataset(const std::vector<MotionSequence>& sequences, double validation_fraction,
                           double test_fraction, Rng& rng);

}  // namespace daelstm
