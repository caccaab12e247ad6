#include "daelstm/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "daelstm/errors.hpp"

namespace daelstm {

std::string_view error_space_name(ErrorSpace space) {
  return space == ErrorSpace::Normalized ? "normalized" : "original";
}

std::size_t horizon_frame_index(double horizon_ms, double fps) {
  const double idx = std::round(horizon_ms * fps / 1000.0);
  if (!(idx >= 1.0)) {
    throw std::invalid_argument("horizon " + std::to_string(horizon_ms) + " ms is shorter than one frame");
  }
  return static_cast<std::size_t>(idx);
}

double HorizonMetrics::at(double horizon_ms) const {
  for (const auto& [h, e] : errors) {
    if (h == horizon_ms) return e;
  }
  throw std::out_of_range("no metric for horizon " + std::to_string(horizon_ms) + " ms");
}

nlohmann::json HorizonMetrics::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [h, e] : errors) {
    rows.push_back({{"horizon_ms", h}, {"frame", horizon_frame_index(h, fps)}, {"error", e}});
  }
  return {{"fps", fps}, {"space", error_space_name(space)}, {"errors", rows}};
}

HorizonMetrics horizon_error(const Matrix& prediction, const Matrix& ground_truth,
                             std::span<const double> horizons_ms, double fps, const NormalizationStats* stats) {
  require_shape(prediction.cols() == ground_truth.cols(), "horizon_error: prediction/ground-truth dims differ");
  if (stats != nullptr) require_shape(stats->dims() == prediction.cols(), "horizon_error: stats dims differ");
  HorizonMetrics m;
  m.fps = fps;
  m.space = stats != nullptr ? ErrorSpace::Original : ErrorSpace::Normalized;
  for (double h : horizons_ms) {
    const std::size_t idx = horizon_frame_index(h, fps);
    if (ground_truth.rows() < idx || prediction.rows() < idx) {
      throw DataError("horizon_error: sequence shorter than horizon " + std::to_string(h) + " ms (" +
                      std::to_string(idx) + " frames)");
    }
    Vector p(prediction.row(idx - 1).begin(), prediction.row(idx - 1).end());
    Vector g(ground_truth.row(idx - 1).begin(), ground_truth.row(idx - 1).end());
    if (stats != nullptr) {
      denormalize_frame(p, *stats);
      denormalize_frame(g, *stats);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) sum += (p[j] - g[j]) * (p[j] - g[j]);
    m.errors.emplace_back(h, std::sqrt(sum));
  }
  return m;
}

HorizonMetrics mean_metrics(std::span<const HorizonMetrics> runs) {
  if (runs.empty()) throw DataError("mean_metrics: no runs");
  HorizonMetrics out = runs.front();
  for (std::size_t i = 0; i < out.errors.size(); ++i) {
    double sum = 0.0;
    for (const auto& r : runs) {
      require_shape(r.errors.size() == out.errors.size() && r.errors[i].first == out.errors[i].first,
                    "mean_metrics: horizon sets differ");
      sum += r.errors[i].second;
    }
    out.errors[i].second = sum / static_cast<double>(runs.size());
  }
  return out;
}

nlohmann::json ClassProbSeries::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t t = 0; t < probabilities.rows(); ++t) {
    const auto r = probabilities.row(t);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"true_class", true_class}, {"fps", fps}, {"probabilities", rows}};
}

double classification_longevity(const ClassProbSeries& series, double threshold, double warmup_s) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("longevity threshold must be in (0, 1)");
  if (warmup_s < 0.0) throw std::invalid_argument("longevity warm-up must be nonnegative");
  const auto warmup = static_cast<std::size_t>(std::llround(warmup_s * series.fps));
  if (series.length() < warmup) throw DataError("longevity: series shorter than the warm-up window");
  const auto c = static_cast<std::size_t>(series.true_class);
  require_shape(series.true_class >= 0 && c < series.probabilities.cols(), "longevity: true class out of range");
  std::size_t k = warmup;
  for (; k < series.length(); ++k) {
    const auto row = series.probabilities.row(k);
    bool ok = row[c] >= threshold;
    for (std::size_t j = 0; ok && j < row.size(); ++j) {
      if (j != c && row[j] > row[c]) ok = false;
    }
    if (!ok) break;
  }
  return static_cast<double>(k - warmup) / series.fps;
}

}  // namespace daelstm
