#include "daelstm/eval/ablation.hpp"

#include <algorithm>
#include <sstream>

#include "daelstm/data/csv.hpp"
#include "daelstm/errors.hpp"

namespace daelstm {

namespace {

Vector variance_curve(const Matrix& frames, std::size_t window) {
  Vector curve(frames.rows());
  for (std::size_t k = 0; k < frames.rows(); ++k) {
    const std::size_t begin = k + 1 >= window ? k + 1 - window : 0;
    curve[k] = window_variance(frames, begin, k + 1);
  }
  return curve;
}

struct ModeAccumulator {
  std::vector<HorizonMetrics> runs;
  Vector curve;
  double tail = 0.0;

  void add(const Matrix& predicted, const Matrix& truth, const RolloutProtocol& p, double fps,
           const NormalizationStats* stats) {
    runs.push_back(horizon_error(predicted, truth, p.horizons_ms, fps, stats));
    const Vector c = variance_curve(predicted, p.curve_window);
    if (curve.empty()) curve.assign(c.size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) curve[i] += c[i];
    tail += window_variance(predicted, predicted.rows() - p.tail_frames, predicted.rows());
  }

  ModeSummary finish() const {
    ModeSummary s;
    s.metrics = mean_metrics(runs);
    const double n = static_cast<double>(runs.size());
    s.variance_curve = curve;
    for (double& v : s.variance_curve) v /= n;
    s.tail_variance = tail / n;
    return s;
  }
};

nlohmann::json summary_json(const ModeSummary& s) {
  return {{"metrics", s.metrics.to_json()}, {"tail_variance", s.tail_variance}, {"variance_curve", s.variance_curve}};
}

}  // namespace

void RolloutProtocol::validate() const {
  if (horizons_ms.empty()) throw ConfigError("eval horizons must not be empty");
  for (double h : horizons_ms) {
    if (!(h > 0.0)) throw ConfigError("eval horizons must be positive");
  }
  if (seed_frames == 0) throw ConfigError("eval seed_frames must be at least 1");
  if (rollout_frames == 0) throw ConfigError("eval rollout_frames must be at least 1");
  if (tail_frames == 0 || tail_frames > rollout_frames) throw ConfigError("eval tail_frames must be in [1, rollout_frames]");
  if (curve_window == 0) throw ConfigError("eval curve_window must be positive");
}

std::string AblationReport::to_csv() const {
  std::ostringstream out;
  out << "horizon_ms,filtered_err,unfiltered_err\n";
  for (std::size_t i = 0; i < filtered.metrics.errors.size(); ++i) {
    out << format_number(filtered.metrics.errors[i].first) << ',' << format_number(filtered.metrics.errors[i].second)
        << ',' << format_number(unfiltered.metrics.errors[i].second) << '\n';
  }
  return out.str();
}

nlohmann::json AblationReport::to_json() const {
  nlohmann::json doc{{"sequences", sequences}, {"filtered", summary_json(filtered)},
                     {"unfiltered", summary_json(unfiltered)}};
  doc["baseline"] = baseline ? summary_json(*baseline) : nlohmann::json(nullptr);
  return doc;
}

AblationReport ablation_report(const StackedModel& model, std::span<const MotionSequence> test,
                               const RolloutProtocol& protocol, const NormalizationStats* stats,
                               const Lstm3Model* baseline) {
  protocol.validate();
  model.validate();
  if (baseline != nullptr) {
    require_shape(baseline->pose_dims() == model.lstm.pose_dims(), "ablation: baseline dims differ");
  }
  ModeAccumulator filtered, unfiltered, base;
  AblationReport report;
  for (const auto& seq : test) {
    std::size_t needed = 0;
    for (double h : protocol.horizons_ms) needed = std::max(needed, horizon_frame_index(h, seq.fps));
    if (seq.length() < protocol.seed_frames + needed) continue;
    const Matrix seed = seq.frames.slice_rows(0, protocol.seed_frames);
    const Matrix truth = seq.frames.slice_rows(protocol.seed_frames, seq.length());
    filtered.add(rollout_filtered(model, seed, protocol.rollout_frames, seq.fps).frames, truth, protocol, seq.fps,
                 stats);
    unfiltered.add(rollout_unfiltered(model.lstm, seed, protocol.rollout_frames, seq.fps).frames, truth, protocol,
                   seq.fps, stats);
    if (baseline != nullptr) {
      base.add(rollout_unfiltered(*baseline, seed, protocol.rollout_frames, seq.fps).frames, truth, protocol, seq.fps,
               stats);
    }
    ++report.sequences;
  }
  if (report.sequences == 0) throw DataError("ablation: no test sequence covers the seed and the largest horizon");
  report.filtered = filtered.finish();
  report.unfiltered = unfiltered.finish();
  if (baseline != nullptr) report.baseline = base.finish();
  return report;
}

std::map<int, LongevityReport::ClassMean> LongevityReport::per_class() const {
  std::map<int, ClassMean> out;
  for (const auto& e : entries) {
    ClassMean& m = out[e.true_class];
    m.filtered += e.filtered;
    m.unfiltered += e.unfiltered;
    if (e.baseline) m.baseline = m.baseline.value_or(0.0) + *e.baseline;
    ++m.count;
  }
  for (auto& [c, m] : out) {
    const double n = static_cast<double>(m.count);
    m.filtered /= n;
    m.unfiltered /= n;
    if (m.baseline) *m.baseline /= n;
  }
  return out;
}

nlohmann::json LongevityReport::to_json(bool include_series) const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [c, m] : per_class()) {
    classes.push_back({{"class", c},
                       {"sequences", m.count},
                       {"filtered_s", m.filtered},
                       {"unfiltered_s", m.unfiltered},
                       {"baseline_s", m.baseline ? nlohmann::json(*m.baseline) : nlohmann::json(nullptr)}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json row{{"sequence", e.sequence},
                       {"class", e.true_class},
                       {"filtered_s", e.filtered},
                       {"unfiltered_s", e.unfiltered},
                       {"baseline_s", e.baseline ? nlohmann::json(*e.baseline) : nlohmann::json(nullptr)}};
    if (include_series) {
      row["filtered_series"] = e.filtered_series.to_json();
      row["unfiltered_series"] = e.unfiltered_series.to_json();
    }
    rows.push_back(std::move(row));
  }
  return {{"threshold", threshold}, {"warmup_s", warmup_s}, {"rollout_s", rollout_s},
          {"per_class", classes},   {"sequences", rows}};
}

LongevityReport longevity_report(const StackedModel& model, const ClassifierModel& classifier,
                                 std::span<const MotionSequence> test, const RolloutProtocol& protocol,
                                 double threshold, double warmup_s, const Lstm3Model* baseline) {
  protocol.validate();
  require_shape(classifier.pose_dims() == model.lstm.pose_dims(), "longevity: classifier dims differ");
  LongevityReport report;
  report.threshold = threshold;
  report.warmup_s = warmup_s;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const MotionSequence& seq = test[i];
    if (!seq.label || seq.length() < protocol.seed_frames) continue;
    const Matrix seed = seq.frames.slice_rows(0, protocol.seed_frames);
    LongevityEntry e;
    e.sequence = i;
    e.true_class = *seq.label;
    e.filtered_series = classify_over_time(
        classifier, rollout_filtered(model, seed, protocol.rollout_frames, seq.fps).frames, e.true_class, seq.fps);
    e.unfiltered_series = classify_over_time(
        classifier, rollout_unfiltered(model.lstm, seed, protocol.rollout_frames, seq.fps).frames, e.true_class,
        seq.fps);
    e.filtered = classification_longevity(e.filtered_series, threshold, warmup_s);
    e.unfiltered = classification_longevity(e.unfiltered_series, threshold, warmup_s);
    if (baseline != nullptr) {
      const ClassProbSeries b = classify_over_time(
          classifier, rollout_unfiltered(*baseline, seed, protocol.rollout_frames, seq.fps).frames, e.true_class,
          seq.fps);
      e.baseline = classification_longevity(b, threshold, warmup_s);
    }
    report.rollout_s = static_cast<double>(protocol.rollout_frames) / seq.fps;
    report.entries.push_back(std::move(e));
  }
  if (report.entries.empty()) throw DataError("longevity: no labelled test sequence covers the seed");
  return report;
}

}  // namespace daelstm
