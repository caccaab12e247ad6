#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace daelstm {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double learning_rate = 0.0;
  double noise_variance = 0.0;
  double dropout_rate = 0.0;
  double internal_dropout = 0.0;
};

/// Per-epoch losses of one training run. `initial_validation_loss` is
/// measured before the first update.
struct TrainingReport {
  std::string stage;
  double initial_validation_loss = 0.0;
  std::vector<EpochRecord> epochs;
  std::size_t halvings = 0;

  double final_validation_loss() const {
    return epochs.empty() ? initial_validation_loss : epochs.back().validation_loss;
  }
  nlohmann::json to_json() const;
};

inline nlohmann::json TrainingReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"validation_loss", e.validation_loss},
                    {"learning_rate", e.learning_rate},
                    {"noise_variance", e.noise_variance},
                    {"dropout_rate", e.dropout_rate},
                    {"internal_dropout", e.internal_dropout}});
  }
  return {{"stage", stage},
          {"initial_validation_loss", initial_validation_loss},
          {"halvings", halvings},
          {"epochs", rows}};
}

}  // namespace daelstm
