#pragma once

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daelstm/data/normalize.hpp"

namespace daelstm {

/// The horizons reported in the evaluation tables, in milliseconds.
inline constexpr std::array<double, 5> kProtocolHorizonsMs{80.0, 160.0, 320.0, 560.0, 1000.0};

enum class ErrorSpace { Normalized, Original };

std::string_view error_space_name(ErrorSpace space);

/// round(ms * fps / 1000); a 1-based count of predicted frames. Throws
/// std::invalid_argument when the result is < 1.
std::size_t horizon_frame_index(double horizon_ms, double fps);

struct HorizonMetrics {
  std::vector<std::pair<double, double>> errors;  // (horizon ms, mean error)
  double fps = 25.0;
  ErrorSpace space = ErrorSpace::Original;

  /// Error at `horizon_ms`; throws std::out_of_range when absent.
  double at(double horizon_ms) const;
  nlohmann::json to_json() const;
};

/// Euclidean distance between prediction and ground truth at frame
/// horizon_frame_index(h) (row index - 1) for every horizon. Both matrices
/// hold predicted-frame-aligned poses: row 0 is the first frame after the
/// seed. When `stats` is given both sides are denormalized first.
HorizonMetrics horizon_error(const Matrix& prediction, const Matrix& ground_truth,
                             std::span<const double> horizons_ms, double fps,
                             const NormalizationStats* stats = nullptr);

/// Averages same-horizon errors across several metrics.
HorizonMetrics mean_metrics(std::span<const HorizonMetrics> runs);

/// Per-frame class distributions produced while a classifier consumes a
/// sequence.
struct ClassProbSeries {
  Matrix probabilities;  // T x C
  int true_class = 0;
  double fps = 25.0;

  std::size_t length() const { return probabilities.rows(); }
  nlohmann::json to_json() const;
};

/// Seconds after a warm-up of round(warmup_s * fps) frames for which the
/// true class keeps the argmax with probability >= threshold. Frames inside
/// the warm-up are not judged. Throws std::invalid_argument for threshold
/// outside (0, 1) or a series shorter than the warm-up.
double classification_longevity(const ClassProbSeries& series, double threshold, double warmup_s = 1.0);

}  // namespace daelstm
