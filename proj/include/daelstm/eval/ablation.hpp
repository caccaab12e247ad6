#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "daelstm/eval/classifier.hpp"
#include "daelstm/eval/metrics.hpp"
#include "daelstm/stacked/stacked.hpp"

namespace daelstm {

struct RolloutProtocol {
  Vector horizons_ms{kProtocolHorizonsMs.begin(), kProtocolHorizonsMs.end()};
  std::size_t seed_frames = 50;
  std::size_t rollout_frames = 300;
  /// Final frames whose temporal variance is compared across modes.
  std::size_t tail_frames = 50;
  /// Trailing window for the per-frame variance curves.
  std::size_t curve_window = 25;

  void validate() const;
};

/// Metrics of one rollout mode averaged over the test sequences.
struct ModeSummary {
  HorizonMetrics metrics;
  Vector variance_curve;  // per predicted frame, normalized space
  double tail_variance = 0.0;
};

struct AblationReport {
  ModeSummary filtered;
  ModeSummary unfiltered;
  /// Separate reference predictor, e.g. the LSTM before fine-tuning.
  std::optional<ModeSummary> baseline;
  std::size_t sequences = 0;

  /// Header `horizon_ms,filtered_err,unfiltered_err`, one row per horizon.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Seeds every mode with the first `seed_frames` frames of each test
/// sequence and compares the next frames with the ground truth. Errors are
/// in original units when `stats` is given. Sequences too short for the
/// largest horizon are skipped; throws DataError when none remain.
AblationReport ablation_report(const StackedModel& model, std::span<const MotionSequence> test,
                               const RolloutProtocol& protocol, const NormalizationStats* stats = nullptr,
                               const Lstm3Model* baseline = nullptr);

struct LongevityEntry {
  std::size_t sequence = 0;
  int true_class = 0;
  double filtered = 0.0;
  double unfiltered = 0.0;
  std::optional<double> baseline;
  ClassProbSeries filtered_series;
  ClassProbSeries unfiltered_series;
};

struct LongevityReport {
  double threshold = 0.5;
  double warmup_s = 1.0;
  double rollout_s = 0.0;
  std::vector<LongevityEntry> entries;

  struct ClassMean {
    double filtered = 0.0;
    double unfiltered = 0.0;
    std::optional<double> baseline;
    std::size_t count = 0;
  };
  std::map<int, ClassMean> per_class() const;
  nlohmann::json to_json(bool include_series = true) const;
};

/// Classifies the generated frames (not the seed) of each labelled test
/// sequence's rollouts.
LongevityReport longevity_report(const StackedModel& model, const ClassifierModel& classifier,
                                 std::span<const MotionSequence> test, const RolloutProtocol& protocol,
                                 double threshold, double warmup_s = 1.0, const Lstm3Model* baseline = nullptr);

}  // namespace daelstm
