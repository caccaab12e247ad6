#include "daelstm/data/normalize.hpp"

#include <algorithm>

#include "daelstm/errors.hpp"

namespace daelstm {

nlohmann::json NormalizationStats::to_json() const { return {{"min", min}, {"max", max}}; }

NormalizationStats NormalizationStats::from_json(const nlohmann::json& doc) {
  NormalizationStats s{doc.at("min").get<Vector>(), doc.at("max").get<Vector>()};
  if (s.min.size() != s.max.size()) throw DataError("normalization min/max lengths differ");
  return s;
}

NormalizationStats fit_normalization(std::span<const MotionSequence> train) {
  std::size_t frames = 0;
  for (const auto& s : train) frames += s.length();
  if (frames == 0) throw DataError("fit_normalization: no training frames");
  const std::size_t dims = train.front().dims();
  NormalizationStats stats{Vector(dims, 0.0), Vector(dims, 0.0)};
  bool first = true;
  for (const auto& s : train) {
    require_shape(s.dims() == dims, "fit_normalization: sequences disagree on feature count");
    for (std::size_t t = 0; t < s.length(); ++t) {
      const auto row = s.frames.row(t);
      if (first) {
        std::copy(row.begin(), row.end(), stats.min.begin());
        std::copy(row.begin(), row.end(), stats.max.begin());
        first = false;
        continue;
      }
      for (std::size_t i = 0; i < dims; ++i) {
        stats.min[i] = std::min(stats.min[i], row[i]);
        stats.max[i] = std::max(stats.max[i], row[i]);
      }
    }
  }
  return stats;
}

void normalize_frame(std::span<double> frame, const NormalizationStats& stats) {
  require_shape(frame.size() == stats.dims(), "normalize: feature count mismatch");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    frame[i] = stats.is_constant(i) ? 0.0 : (frame[i] - stats.min[i]) / (stats.max[i] - stats.min[i]);
  }
}

void denormalize_frame(std::span<double> frame, const NormalizationStats& stats) {
  require_shape(frame.size() == stats.dims(), "denormalize: feature count mismatch");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    frame[i] = stats.is_constant(i) ? stats.min[i] : stats.min[i] + frame[i] * (stats.max[i] - stats.min[i]);
  }
}

MotionSequence normalize(const MotionSequence& seq, const NormalizationStats& stats,
                         std::size_t* out_of_range) {
  MotionSequence out = seq;
  std::size_t outside = 0;
  for (std::size_t t = 0; t < out.length(); ++t) {
    auto row = out.frames.row(t);
    normalize_frame(row, stats);
    for (double v : row) outside += (v < 0.0 || v > 1.0) ? 1 : 0;
  }
  out.normalized = true;
  if (out_of_range) *out_of_range = outside;
  return out;
}

MotionSequence denormalize(const MotionSequence& seq, const NormalizationStats& stats) {
  MotionSequence out = seq;
  for (std::size_t t = 0; t < out.length(); ++t) denormalize_frame(out.frames.row(t), stats);
  out.normalized = false;
  return out;
}

}  // namespace daelstm
