#include "daelstm/dae/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "daelstm/errors.hpp"

namespace daelstm {

namespace {

double stretched(const Vector& values, std::size_t s, std::size_t stages) {
  if (values.empty()) return 0.0;
  const std::size_t idx = std::min(values.size() - 1, s * values.size() / stages);
  return values[idx];
}

}  // namespace

CurriculumSchedule CurriculumSchedule::dropout_noise() {
  return {{0.01, 0.05, 0.1}, {0.01, 0.02, 0.04, 0.08, 0.1}, false};
}

CurriculumSchedule CurriculumSchedule::gaussian_only() { return {{0.01, 0.05, 0.1}, {}, false}; }

CurriculumSchedule CurriculumSchedule::none() { return {}; }

void CurriculumSchedule::validate() const {
  for (double v : noise_variance) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("noise variance stage outside [0, 1]");
  }
  for (double v : dropout_rate) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("dropout stage outside [0, 1]");
  }
}

std::size_t CurriculumSchedule::stage_count() const {
  return std::max<std::size_t>({1, noise_variance.size(), dropout_rate.size()});
}

CurriculumStage CurriculumSchedule::stage(std::size_t s) const {
  const std::size_t stages = stage_count();
  s = std::min(s, stages - 1);
  if (reverse) s = stages - 1 - s;
  return {stretched(noise_variance, s, stages), stretched(dropout_rate, s, stages)};
}

std::vector<std::size_t> CurriculumSchedule::epochs_per_stage(std::size_t total_epochs) const {
  const std::size_t stages = stage_count();
  std::vector<std::size_t> out(stages, total_epochs / stages);
  out.back() += total_epochs % stages;
  return out;
}

std::size_t CurriculumSchedule::stage_for_epoch(std::size_t epoch, std::size_t total_epochs) const {
  const std::size_t stages = stage_count();
  const std::size_t per = total_epochs / stages;
  if (per == 0) return stages - 1;
  return std::min(epoch / per, stages - 1);
}

std::size_t CurriculumSchedule::stage_for_progress(double fraction) const {
  const std::size_t stages = stage_count();
  const double clamped = std::clamp(fraction, 0.0, 1.0);
  return std::min(stages - 1, static_cast<std::size_t>(std::floor(clamped * static_cast<double>(stages))));
}

nlohmann::json CurriculumSchedule::to_json() const {
  return {{"noise_variance", noise_variance}, {"dropout_rate", dropout_rate}, {"reverse", reverse}};
}

CurriculumSchedule CurriculumSchedule::from_json(const nlohmann::json& doc) {
  CurriculumSchedule s;
  s.noise_variance = doc.value("noise_variance", Vector{});
  s.dropout_rate = doc.value("dropout_rate", Vector{});
  s.reverse = doc.value("reverse", false);
  s.validate();
  return s;
}

}  // namespace daelstm
